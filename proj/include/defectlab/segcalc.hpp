#pragma once

// Final segments, initial segments (cuts) and valuation-ring ideals over a
// finite-rank lexicographic value group.
//
// Every canonical final segment is stored as a boundary (level j, point xi in Q^j,
// closed flag) and denotes { g : (g_1..g_j) > xi } (open) or { g : (g_1..g_j) >= xi }
// (closed), lexicographically on the first j coordinates. ClosedAt(b) and OpenAt(b)
// are level-k boundaries, AboveSubgroup(H_j) is the open level-j boundary at 0, and a
// shifted AboveSubgroup is an open level-j boundary at a nonzero point.
//
// Canonical form: the point's coordinates lie in their slots except possibly the last
// one of an open boundary over a dense slot; a boundary over a discrete slot is always
// closed. Two canonical segments are equal iff they denote the same subset of G.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/ogroup.hpp"
#include "defectlab/rational.hpp"

namespace defectlab {

using GroupRef = std::shared_ptr<const OrderedGroup>;

inline GroupRef make_group(OrderedGroup g) { return std::make_shared<const OrderedGroup>(std::move(g)); }

class InitialSegment;

class FinalSegment {
 public:
  enum class Kind { empty, whole, cut };

  static FinalSegment empty(GroupRef g) { return FinalSegment(std::move(g), Kind::empty); }
  static FinalSegment whole(GroupRef g) { return FinalSegment(std::move(g), Kind::whole); }

  /// { g : (g_1..g_level) > point } or >=, canonicalised. `point` may lie in the divisible hull.
  static FinalSegment cut(GroupRef g, std::size_t level, std::vector<Rational> point, bool closed) {
    if (level == 0) return closed ? whole(std::move(g)) : empty(std::move(g));
    if (level > g->rank()) throw error(error_kind::invalid_argument, "boundary level exceeds group rank");
    if (point.size() != level) throw error(error_kind::malformed_element, "boundary point has wrong number of coordinates");
    FinalSegment s(std::move(g), Kind::cut);
    s.level_ = level;
    s.point_ = std::move(point);
    s.closed_ = closed;
    s.canonicalize();
    return s;
  }

  static FinalSegment closed_at(GroupRef g, const GroupElement& b) {
    check_rank(*g, b);
    std::size_t k = g->rank();
    return cut(std::move(g), k, b.coords, true);
  }
  static FinalSegment open_at(GroupRef g, const GroupElement& b) {
    check_rank(*g, b);
    std::size_t k = g->rank();
    return cut(std::move(g), k, b.coords, false);
  }
  static FinalSegment closed_at(GroupRef g, const Rational& b) { return closed_at(std::move(g), GroupElement{b}); }
  static FinalSegment open_at(GroupRef g, const Rational& b) { return open_at(std::move(g), GroupElement{b}); }

  /// { g : g > H }.
  static FinalSegment above_subgroup(GroupRef g, ConvexSubgroup h) {
    if (h.index > g->rank()) throw error(error_kind::invalid_argument, "convex subgroup index out of range");
    return cut(g, h.index, std::vector<Rational>(h.index, Rational(0)), false);
  }

  /// G^{>0}.
  static FinalSegment positive(GroupRef g) { return above_subgroup(g, g->trivial_subgroup()); }

  const OrderedGroup& group() const { return *group_; }
  const GroupRef& group_ref() const { return group_; }
  Kind kind() const { return kind_; }
  bool is_empty() const { return kind_ == Kind::empty; }
  bool is_whole() const { return kind_ == Kind::whole; }
  std::size_t level() const { return level_; }
  const std::vector<Rational>& point() const { return point_; }
  bool closed() const { return closed_; }

  /// Minimum of the segment, when it has one.
  std::optional<GroupElement> minimum() const {
    if (kind_ != Kind::cut || !closed_ || level_ != group_->rank()) return std::nullopt;
    return GroupElement(point_);
  }

  bool contains(const GroupElement& x) const {
    if (x.rank() != group_->rank()) throw error(error_kind::group_mismatch, "element rank differs from segment group rank");
    switch (kind_) {
      case Kind::empty: return false;
      case Kind::whole: return true;
      case Kind::cut: break;
    }
    for (std::size_t i = 0; i < level_; ++i) {
      if (x.coords[i] > point_[i]) return true;
      if (x.coords[i] < point_[i]) return false;
    }
    return closed_;
  }

  /// Inclusion order of segments; a <= b means a is a subset of b.
  bool subset_of(const FinalSegment& other) const {
    same_group(other);
    return boundary_compare(*this, other) >= 0;
  }

  bool is_positive() const { return !contains(group_->zero()); }

  std::string str() const;

  friend bool operator==(const FinalSegment& a, const FinalSegment& b) {
    if (!(*a.group_ == *b.group_) || a.kind_ != b.kind_) return false;
    if (a.kind_ != Kind::cut) return true;
    return a.level_ == b.level_ && a.closed_ == b.closed_ && a.point_ == b.point_;
  }

  void same_group(const FinalSegment& other) const {
    if (!(*group_ == *other.group_)) throw error(error_kind::group_mismatch, "segments over different groups: " + group_->name() + " vs " + other.group_->name());
  }

  /// Position of the boundary in the completion: smaller boundary means larger segment.
  /// Returns <0, 0, >0 comparing a's boundary with b's.
  static int boundary_compare(const FinalSegment& a, const FinalSegment& b) {
    auto rank_kind = [](const FinalSegment& s) { return s.kind_ == Kind::whole ? 0 : s.kind_ == Kind::cut ? 1 : 2; };
    int ra = rank_kind(a), rb = rank_kind(b);
    if (ra != rb || ra != 1) return ra - rb;
    std::size_t j = std::min(a.level_, b.level_);
    for (std::size_t i = 0; i < j; ++i) {
      if (a.point_[i] < b.point_[i]) return -1;
      if (a.point_[i] > b.point_[i]) return 1;
    }
    // Past the shorter point the boundary continues with -inf (closed) or +inf (open).
    if (a.level_ == b.level_) return a.closed_ == b.closed_ ? 0 : (a.closed_ ? -1 : 1);
    if (a.level_ < b.level_) return a.closed_ ? -1 : 1;
    return b.closed_ ? 1 : -1;
  }

 private:
  FinalSegment(GroupRef g, Kind k) : group_(std::move(g)), kind_(k) {
    if (!group_) throw error(error_kind::invalid_argument, "segment without a group");
  }

  static void check_rank(const OrderedGroup& g, const GroupElement& b) {
    if (b.rank() != g.rank()) throw error(error_kind::group_mismatch, "boundary " + b.str() + " has rank " + std::to_string(b.rank()) + ", group " + g.name() + " has rank " + std::to_string(g.rank()));
  }

  void canonicalize() {
    for (std::size_t i = 0; i < level_; ++i) {
      const Slot& slot = group_->slots()[i];
      if (slot.contains(point_[i])) continue;
      // No element matches the boundary at coordinate i, so later coordinates and
      // the closed flag are irrelevant.
      level_ = i + 1;
      point_.resize(level_);
      if (slot.is_discrete()) {
        point_[i] = slot.ceiling(point_[i]);
        closed_ = true;
      } else {
        closed_ = false;
      }
      return;
    }
    const Slot& last = group_->slots()[level_ - 1];
    if (!closed_ && last.is_discrete()) {
      point_[level_ - 1] = last.successor(point_[level_ - 1]);
      closed_ = true;
    }
  }

  GroupRef group_;
  Kind kind_;
  std::size_t level_ = 0;
  std::vector<Rational> point_;
  bool closed_ = false;
};

/// An initial segment, stored through its complementary final segment (the cut's right side).
class InitialSegment {
 public:
  explicit InitialSegment(FinalSegment upper) : upper_(std::move(upper)) {}

  static InitialSegment complement_of(const FinalSegment& f) { return InitialSegment(f); }

  /// { g : g < b }.
  static InitialSegment below(GroupRef g, const GroupElement& b) { return InitialSegment(FinalSegment::closed_at(std::move(g), b)); }
  /// { g : g <= b }.
  static InitialSegment at_most(GroupRef g, const GroupElement& b) { return InitialSegment(FinalSegment::open_at(std::move(g), b)); }
  static InitialSegment below(GroupRef g, const Rational& b) { return below(std::move(g), GroupElement{b}); }
  static InitialSegment at_most(GroupRef g, const Rational& b) { return at_most(std::move(g), GroupElement{b}); }
  /// { g : g < H }.
  static InitialSegment below_subgroup(GroupRef g, ConvexSubgroup h) {
    return InitialSegment(FinalSegment::cut(g, h.index, std::vector<Rational>(h.index, Rational(0)), true));
  }

  const FinalSegment& complement() const { return upper_; }
  const OrderedGroup& group() const { return upper_.group(); }
  const GroupRef& group_ref() const { return upper_.group_ref(); }
  bool is_empty() const { return upper_.is_whole(); }
  bool is_whole() const { return upper_.is_empty(); }
  bool contains(const GroupElement& x) const { return !upper_.contains(x); }

  /// Maximum, when it has one (the boundary of an open level-k complement over a member point).
  std::optional<GroupElement> maximum() const {
    if (upper_.kind() != FinalSegment::Kind::cut || upper_.closed() || upper_.level() != group().rank()) return std::nullopt;
    GroupElement b(upper_.point());
    if (!group().contains(b)) return std::nullopt;
    return b;
  }

  /// True iff some element of the segment is >= x (x in the divisible hull).
  bool reaches(const GroupElement& x) const {
    FinalSegment above = FinalSegment::closed_at(group_ref(), x);
    return !above.subset_of(upper_);
  }

  bool subset_of(const InitialSegment& other) const { return other.upper_.subset_of(upper_); }

  std::string str() const;

  friend bool operator==(const InitialSegment& a, const InitialSegment& b) { return a.upper_ == b.upper_; }

 private:
  FinalSegment upper_;
};

// ---------------------------------------------------------------------------
// Cut arithmetic

/// -S as an initial segment.
inline InitialSegment negate(const FinalSegment& s) {
  switch (s.kind()) {
    case FinalSegment::Kind::empty: return InitialSegment(FinalSegment::whole(s.group_ref()));
    case FinalSegment::Kind::whole: return InitialSegment(FinalSegment::empty(s.group_ref()));
    case FinalSegment::Kind::cut: break;
  }
  std::vector<Rational> p = s.point();
  for (auto& c : p) c = -c;
  return InitialSegment(FinalSegment::cut(s.group_ref(), s.level(), std::move(p), !s.closed()));
}

/// -D as a final segment.
inline FinalSegment negate(const InitialSegment& d) {
  const FinalSegment& u = d.complement();
  switch (u.kind()) {
    case FinalSegment::Kind::empty: return FinalSegment::whole(u.group_ref());
    case FinalSegment::Kind::whole: return FinalSegment::empty(u.group_ref());
    case FinalSegment::Kind::cut: break;
  }
  std::vector<Rational> p = u.point();
  for (auto& c : p) c = -c;
  return FinalSegment::cut(u.group_ref(), u.level(), std::move(p), !u.closed());
}

/// gamma + S. gamma may lie in the divisible hull; the boundary is translated.
inline FinalSegment shift(const GroupElement& gamma, const FinalSegment& s) {
  if (gamma.rank() != s.group().rank()) throw error(error_kind::group_mismatch, "shift element rank differs from group rank");
  if (s.kind() != FinalSegment::Kind::cut) return s;
  std::vector<Rational> p = s.point();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += gamma.coords[i];
  return FinalSegment::cut(s.group_ref(), s.level(), std::move(p), s.closed());
}

inline InitialSegment shift(const GroupElement& gamma, const InitialSegment& d) {
  return InitialSegment(shift(gamma, d.complement()));
}

/// (nS) upward closure.
inline FinalSegment scale_up(unsigned n, const FinalSegment& s) {
  if (n == 0) throw error(error_kind::invalid_argument, "scale factor must be >= 1");
  if (s.kind() != FinalSegment::Kind::cut) return s;
  std::vector<Rational> p = s.point();
  for (auto& c : p) c *= n;
  return FinalSegment::cut(s.group_ref(), s.level(), std::move(p), s.closed());
}

/// The set nS itself, for groups where nG = G (every slot divisible by n); then nS is a segment.
inline FinalSegment scale_exact(unsigned n, const FinalSegment& s) {
  for (const auto& f : prime_factors(n))
    if (!s.group().is_p_divisible(static_cast<unsigned>(f)))
      throw error(error_kind::invalid_argument, "nS is a segment only when the group is n-divisible");
  return scale_up(n, s);
}

inline InitialSegment scale_exact(unsigned n, const InitialSegment& d) {
  return negate(scale_exact(n, negate(d)));
}

/// The segment whose boundary is q times the boundary of S (q > 0 rational).
/// For q = 1/n this is { g : n g in S }.
inline FinalSegment scale_boundary(const Rational& q, const FinalSegment& s) {
  if (q <= 0) throw error(error_kind::invalid_argument, "boundary scale factor must be positive");
  if (s.kind() != FinalSegment::Kind::cut) return s;
  std::vector<Rational> p = s.point();
  for (auto& c : p) c *= q;
  return FinalSegment::cut(s.group_ref(), s.level(), std::move(p), s.closed());
}

inline InitialSegment scale_boundary(const Rational& q, const InitialSegment& d) {
  return InitialSegment(scale_boundary(q, d.complement()));
}

/// (S + T) upward closure.
inline FinalSegment segment_sum(const FinalSegment& a, const FinalSegment& b) {
  a.same_group(b);
  if (a.is_empty() || b.is_empty()) return FinalSegment::empty(a.group_ref());
  if (a.is_whole() || b.is_whole()) return FinalSegment::whole(a.group_ref());
  std::size_t j = std::min(a.level(), b.level());
  std::vector<Rational> p(j);
  for (std::size_t i = 0; i < j; ++i) p[i] = a.point()[i] + b.point()[i];
  bool closed;
  if (a.level() < b.level()) closed = a.closed();
  else if (b.level() < a.level()) closed = b.closed();
  else closed = a.closed() && b.closed();
  return FinalSegment::cut(a.group_ref(), j, std::move(p), closed);
}

/// Upward closure of a finite set of group elements.
inline FinalSegment upward_closure(GroupRef g, const std::vector<GroupElement>& points) {
  for (const auto& x : points)
    if (!g->contains(x)) throw error(error_kind::group_mismatch, "point " + x.str() + " is not an element of " + g->name());
  if (points.empty()) return FinalSegment::empty(g);
  auto m = std::min_element(points.begin(), points.end());
  return FinalSegment::closed_at(std::move(g), *m);
}

/// Upward closure of gamma + S (already a final segment).
inline FinalSegment upward_closure_shifted(const GroupElement& gamma, const FinalSegment& s) { return shift(gamma, s); }

/// Upward closure of nS.
inline FinalSegment upward_closure_scaled(unsigned n, const FinalSegment& s) { return scale_up(n, s); }

// ---------------------------------------------------------------------------
// Convex subgroup recognition

/// H if S = G^{>=0} \ H = { g > H } for a convex subgroup H, otherwise none.
inline std::optional<ConvexSubgroup> complement_subgroup(const FinalSegment& s) {
  const OrderedGroup& g = s.group();
  for (std::size_t j = 0; j <= g.rank(); ++j) {
    ConvexSubgroup h{j};
    if (FinalSegment::above_subgroup(s.group_ref(), h) == s) return h;
  }
  return std::nullopt;
}

struct LemmaSdVerdict {
  bool matches = false;
  std::optional<ConvexSubgroup> delta;
};

/// Decides S = (mS) upward closure for a nonempty final segment of the positive cone and,
/// when it holds, recovers the convex subgroup Delta with S = G^{>=0} \ Delta.
inline LemmaSdVerdict lemma_sd_classify(const FinalSegment& s, unsigned m) {
  if (m < 2) throw error(error_kind::invalid_argument, "lemma_sd_classify needs m >= 2");
  if (s.is_empty()) throw error(error_kind::empty_segment, "lemma_sd_classify needs a nonempty segment");
  if (!s.is_positive()) throw error(error_kind::unit_ideal, "segment " + s.str() + " contains 0; it is not a segment of the positive cone");
  LemmaSdVerdict v;
  v.matches = scale_up(m, s) == s;
  if (!v.matches) return v;
  v.delta = complement_subgroup(s);
  if (!v.delta || !is_strongly_convex(s.group(), *v.delta))
    throw error(error_kind::invalid_argument, "internal: idempotent segment " + s.str() + " is not above a strongly convex subgroup");
  for (unsigned n = 2; n <= 7; ++n)
    if (!(scale_up(n, s) == s)) throw error(error_kind::invalid_argument, "internal: segment fixed by m but not by n=" + std::to_string(n));
  return v;
}

// ---------------------------------------------------------------------------
// Ideals of the valuation ring

/// A proper ideal I_S = (a : va in S) described by its value segment S (S = empty is the zero ideal).
class IdealDesc {
 public:
  explicit IdealDesc(FinalSegment s) : segment_(std::move(s)) {
    if (!segment_.is_empty() && !segment_.is_positive())
      throw error(error_kind::unit_ideal, "segment " + segment_.str() + " contains 0; the unit ideal is excluded");
  }

  static IdealDesc maximal(GroupRef g) { return IdealDesc(FinalSegment::positive(std::move(g))); }
  /// The ideal generated by elements with the given values.
  static IdealDesc generated_by_values(GroupRef g, const std::vector<GroupElement>& values) {
    return IdealDesc(upward_closure(std::move(g), values));
  }

  const FinalSegment& segment() const { return segment_; }
  bool contains_value(const GroupElement& x) const { return segment_.contains(x); }
  bool subset_of(const IdealDesc& other) const { return segment_.subset_of(other.segment_); }
  std::string str() const { return segment_.str(); }

  friend bool operator==(const IdealDesc& a, const IdealDesc& b) { return a.segment_ == b.segment_; }

 private:
  FinalSegment segment_;
};

/// I^m, whose segment is (mS) upward closure.
inline IdealDesc ideal_power(const IdealDesc& i, unsigned m) {
  if (m == 0) throw error(error_kind::invalid_argument, "ideal_power needs m >= 1");
  return IdealDesc(scale_up(m, i.segment()));
}

/// I J, whose segment is (S + T) upward closure.
inline IdealDesc ideal_product(const IdealDesc& i, const IdealDesc& j) {
  return IdealDesc(segment_sum(i.segment(), j.segment()));
}

inline bool is_idempotent(const IdealDesc& i, unsigned p) { return ideal_power(i, p) == i; }

/// H when I = M_{v_H}, i.e. the segment is G^{>=0} \ H; none otherwise.
inline std::optional<ConvexSubgroup> is_prime(const IdealDesc& i) { return complement_subgroup(i.segment()); }

// ---------------------------------------------------------------------------
// Literals: "empty", "all", ">0", ">=1", ">H1", ">1/2+H1", ">=(1,0)+H1", ">(0,1/2)"
// and for initial segments "<1/2", "<=0", "<H1", "<(1)+H1".

namespace detail {

inline std::string point_str(const std::vector<Rational>& p) {
  if (p.size() == 1) return to_string(p[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += to_string(p[i]);
  }
  return s + ")";
}

inline bool all_zero(const std::vector<Rational>& p) {
  return std::all_of(p.begin(), p.end(), [](const Rational& r) { return r == 0; });
}

/// Boundary text without the comparison operator, e.g. "1/2", "H1", "(1,0)+H1".
inline std::string boundary_str(const FinalSegment& s, bool zero_as_subgroup) {
  std::size_t k = s.group().rank();
  if (s.level() == k) return point_str(s.point());
  std::string h = "H" + std::to_string(s.level());
  if (zero_as_subgroup && all_zero(s.point())) return h;
  return point_str(s.point()) + "+" + h;
}

struct ParsedBoundary {
  std::size_t level;
  std::vector<Rational> point;
};

inline std::vector<Rational> parse_point(std::string_view t) {
  std::vector<Rational> out;
  if (!t.empty() && t.front() == '(') {
    if (t.back() != ')') throw parse_error("unterminated tuple in '" + std::string(t) + "'");
    t = t.substr(1, t.size() - 2);
    std::size_t start = 0;
    while (true) {
      std::size_t comma = t.find(',', start);
      out.push_back(parse_rational(t.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  } else {
    out.push_back(parse_rational(t));
  }
  return out;
}

inline ParsedBoundary parse_boundary(std::string_view t, const OrderedGroup& g) {
  auto parse_h = [&](std::string_view h) -> std::size_t {
    if (h.size() < 2 || h[0] != 'H') throw parse_error("expected Hj in '" + std::string(t) + "'");
    std::size_t j = 0;
    for (char c : h.substr(1)) {
      if (c < '0' || c > '9') throw parse_error("bad subgroup index in '" + std::string(t) + "'");
      j = j * 10 + static_cast<std::size_t>(c - '0');
    }
    if (j > g.rank()) throw parse_error("subgroup index " + std::to_string(j) + " exceeds rank " + std::to_string(g.rank()));
    return j;
  };
  if (!t.empty() && t.front() == 'H') {
    std::size_t j = parse_h(t);
    return {j, std::vector<Rational>(j, Rational(0))};
  }
  std::size_t plus = t.rfind("+H");
  if (plus != std::string_view::npos && plus > 0) {
    std::size_t j = parse_h(t.substr(plus + 1));
    auto p = parse_point(t.substr(0, plus));
    if (p.size() != j) throw parse_error("point in '" + std::string(t) + "' must have " + std::to_string(j) + " coordinates");
    return {j, std::move(p)};
  }
  auto p = parse_point(t);
  if (p.size() != g.rank()) throw parse_error("point in '" + std::string(t) + "' must have " + std::to_string(g.rank()) + " coordinates");
  return {g.rank(), std::move(p)};
}

inline std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline std::string FinalSegment::str() const {
  switch (kind_) {
    case Kind::empty: return "empty";
    case Kind::whole: return "all";
    case Kind::cut: break;
  }
  return (closed_ ? ">=" : ">") + detail::boundary_str(*this, !closed_);
}

inline std::string InitialSegment::str() const {
  switch (upper_.kind()) {
    case FinalSegment::Kind::empty: return "all";
    case FinalSegment::Kind::whole: return "empty";
    case FinalSegment::Kind::cut: break;
  }
  return (upper_.closed() ? "<" : "<=") + detail::boundary_str(upper_, upper_.closed());
}

inline FinalSegment parse_final_segment(std::string_view text, GroupRef g) {
  std::string_view t = detail::strip(text);
  if (t == "empty") return FinalSegment::empty(g);
  if (t == "all") return FinalSegment::whole(g);
  bool closed;
  if (t.substr(0, 2) == ">=") {
    closed = true;
    t.remove_prefix(2);
  } else if (t.substr(0, 1) == ">") {
    closed = false;
    t.remove_prefix(1);
  } else {
    throw parse_error("final segment literal must start with '>' or '>=': '" + std::string(text) + "'");
  }
  auto b = detail::parse_boundary(detail::strip(t), *g);
  return FinalSegment::cut(std::move(g), b.level, std::move(b.point), closed);
}

inline InitialSegment parse_initial_segment(std::string_view text, GroupRef g) {
  std::string_view t = detail::strip(text);
  if (t == "empty") return InitialSegment(FinalSegment::whole(g));
  if (t == "all") return InitialSegment(FinalSegment::empty(g));
  bool upper_closed;
  if (t.substr(0, 2) == "<=") {
    upper_closed = false;
    t.remove_prefix(2);
  } else if (t.substr(0, 1) == "<") {
    upper_closed = true;
    t.remove_prefix(1);
  } else {
    throw parse_error("initial segment literal must start with '<' or '<=': '" + std::string(text) + "'");
  }
  auto b = detail::parse_boundary(detail::strip(t), *g);
  return InitialSegment(FinalSegment::cut(std::move(g), b.level, std::move(b.point), upper_closed));
}

}  // namespace defectlab
