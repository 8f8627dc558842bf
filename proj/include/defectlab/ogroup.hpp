#pragma once

// Ordered abelian groups of finite rank realised as lexicographic products of
// subgroups of Q, together with their convex subgroups.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/rational.hpp"

namespace defectlab {

/// Denominator exponents beyond this bound are rejected by slot membership.
inline constexpr unsigned default_exponent_bound = 64;

/// A rank-one building block: { sum n_i g_i / m : m a product of divisibility primes }.
class Slot {
 public:
  static Slot trivial() { return Slot{}; }

  static Slot cyclic(const Rational& generator) { return localized({generator}, {}); }

  static Slot rationals() {
    Slot s;
    s.generator_ = 1;
    s.all_primes_ = true;
    return s;
  }

  static Slot localized(std::vector<Rational> generators, std::vector<unsigned> primes,
                        unsigned exponent_bound = default_exponent_bound) {
    Slot s;
    for (auto& g : generators)
      if (g <= 0) throw error(error_kind::invalid_argument, "slot generators must be positive rationals");
    if (generators.empty()) throw error(error_kind::invalid_argument, "slot needs generators (use Slot::trivial())");
    for (unsigned p : primes)
      if (!is_prime_number(p)) throw error(error_kind::invalid_argument, "divisibility entry " + std::to_string(p) + " is not prime");
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    s.generator_ = rational_gcd(generators);
    // Generators that differ only by divisibility primes describe the same group; normalise
    // the generator by stripping those primes so equal groups compare equal.
    Integer n = num(s.generator_), d = den(s.generator_);
    for (unsigned p : primes) {
      while (n % p == 0) n /= p;
      while (d % p == 0) d /= p;
    }
    s.generator_ = Rational(n, d);
    s.primes_ = std::move(primes);
    s.exponent_bound_ = exponent_bound;
    return s;
  }

  bool is_trivial() const { return generator_ == 0; }
  bool is_discrete() const { return !is_trivial() && !all_primes_ && primes_.empty(); }
  bool is_dense() const { return !is_trivial() && (all_primes_ || !primes_.empty()); }
  bool is_full_rationals() const { return all_primes_; }
  const Rational& generator() const { return generator_; }
  const std::vector<unsigned>& divisibility_primes() const { return primes_; }

  bool divisible_by(unsigned prime) const {
    return all_primes_ || std::find(primes_.begin(), primes_.end(), prime) != primes_.end();
  }

  bool contains(const Rational& x) const {
    if (x == 0) return true;
    if (is_trivial()) return false;
    if (all_primes_) return true;
    Rational q = x / generator_;
    Integer d = den(q);
    for (unsigned p : primes_) {
      unsigned e = 0;
      while (d % p == 0) {
        d /= p;
        if (++e > exponent_bound_) return false;
      }
    }
    return d == 1;
  }

  /// Least element strictly greater than x (discrete slots only).
  Rational successor(const Rational& x) const {
    if (!is_discrete()) throw error(error_kind::invalid_argument, "successor is defined on discrete slots only");
    return generator_ * Rational(floor_div(x / generator_) + 1);
  }

  /// Least element greater than or equal to x (discrete slots only).
  Rational ceiling(const Rational& x) const {
    if (!is_discrete()) throw error(error_kind::invalid_argument, "ceiling is defined on discrete slots only");
    return generator_ * Rational(ceil_div(x / generator_));
  }

  std::string name() const {
    if (is_trivial()) return "0";
    if (all_primes_) return "Q";
    std::string base = generator_ == 1 ? "Z" : to_string(generator_) + "Z";
    if (primes_.empty()) return base;
    Integer prod = 1;
    for (unsigned p : primes_) prod *= p;
    return base + "[1/" + prod.str() + "]";
  }

  friend bool operator==(const Slot& a, const Slot& b) {
    return a.generator_ == b.generator_ && a.all_primes_ == b.all_primes_ && a.primes_ == b.primes_;
  }

 private:
  Slot() = default;

  Rational generator_ = 0;
  bool all_primes_ = false;
  std::vector<unsigned> primes_;
  unsigned exponent_bound_ = default_exponent_bound;
};

/// Element of a finite lexicographic product of subgroups of Q (or of its divisible hull).
struct GroupElement {
  std::vector<Rational> coords;

  GroupElement() = default;
  explicit GroupElement(std::vector<Rational> c) : coords(std::move(c)) {}
  GroupElement(std::initializer_list<Rational> c) : coords(c) {}

  static GroupElement zero(std::size_t rank) { return GroupElement(std::vector<Rational>(rank, Rational(0))); }

  std::size_t rank() const { return coords.size(); }
  bool is_zero() const {
    return std::all_of(coords.begin(), coords.end(), [](const Rational& r) { return r == 0; });
  }

  friend GroupElement operator+(const GroupElement& a, const GroupElement& b) {
    check_rank(a, b);
    GroupElement r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
    return r;
  }
  friend GroupElement operator-(const GroupElement& a, const GroupElement& b) {
    check_rank(a, b);
    GroupElement r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
    return r;
  }
  friend GroupElement operator-(const GroupElement& a) {
    GroupElement r = a;
    for (auto& c : r.coords) c = -c;
    return r;
  }
  friend GroupElement operator*(const Rational& k, const GroupElement& a) {
    GroupElement r = a;
    for (auto& c : r.coords) c *= k;
    return r;
  }

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.coords == b.coords; }

  friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
    check_rank(a, b);
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
      if (a.coords[i] < b.coords[i]) return std::strong_ordering::less;
      if (a.coords[i] > b.coords[i]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  std::string str() const {
    if (coords.size() == 1) return to_string(coords[0]);
    std::string s = "(";
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (i) s += ",";
      s += to_string(coords[i]);
    }
    return s + ")";
  }

 private:
  static void check_rank(const GroupElement& a, const GroupElement& b) {
    if (a.coords.size() != b.coords.size()) throw error(error_kind::group_mismatch, "elements of different rank");
  }
};

/// H_j = {0}^j x Slot_{j+1} x ... x Slot_k. H_0 is the whole group, H_k = {0}.
struct ConvexSubgroup {
  std::size_t index = 0;
  friend bool operator==(ConvexSubgroup, ConvexSubgroup) = default;
};

/// Finite lexicographic product Slot_1 x ... x Slot_k, coarsest slot first.
class OrderedGroup {
 public:
  explicit OrderedGroup(std::vector<Slot> slots) : slots_(std::move(slots)) {
    if (slots_.empty()) throw error(error_kind::invalid_argument, "an ordered group needs rank >= 1");
    for (const auto& s : slots_)
      if (s.is_trivial()) throw error(error_kind::invalid_argument, "trivial slots are not allowed inside a lexicographic product");
  }

  static OrderedGroup integers() { return OrderedGroup({Slot::cyclic(1)}); }
  static OrderedGroup rationals() { return OrderedGroup({Slot::rationals()}); }
  static OrderedGroup p_adic_rationals(unsigned p) { return OrderedGroup({Slot::localized({1}, {p})}); }

  std::size_t rank() const { return slots_.size(); }
  const std::vector<Slot>& slots() const { return slots_; }
  /// Slot_i with 1-based index, as in H_j notation.
  const Slot& slot(std::size_t i) const { return slots_.at(i - 1); }

  bool contains(const GroupElement& g) const {
    if (g.rank() != rank()) return false;
    for (std::size_t i = 0; i < rank(); ++i)
      if (!slots_[i].contains(g.coords[i])) return false;
    return true;
  }

  void require_member(const GroupElement& g) const {
    if (g.rank() != rank())
      throw error(error_kind::malformed_element, "element " + g.str() + " has rank " + std::to_string(g.rank()) + ", group has rank " + std::to_string(rank()));
    for (std::size_t i = 0; i < rank(); ++i)
      if (!slots_[i].contains(g.coords[i]))
        throw error(error_kind::malformed_element, "coordinate " + std::to_string(i + 1) + " of " + g.str() + " is not in slot " + slots_[i].name());
  }

  GroupElement zero() const { return GroupElement::zero(rank()); }

  bool is_p_divisible(unsigned p) const {
    return std::all_of(slots_.begin(), slots_.end(), [p](const Slot& s) { return s.divisible_by(p); });
  }

  ConvexSubgroup trivial_subgroup() const { return {rank()}; }
  ConvexSubgroup whole() const { return {0}; }

  bool in_subgroup(const GroupElement& g, ConvexSubgroup h) const {
    for (std::size_t i = 0; i < h.index && i < g.rank(); ++i)
      if (g.coords[i] != 0) return false;
    return true;
  }

  std::string name() const {
    std::string s;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (i) s += "x";
      s += slots_[i].name();
    }
    return s;
  }

  std::string subgroup_name(ConvexSubgroup h) const {
    if (h.index == rank()) return "{0}";
    if (h.index == 0) return "G";
    return "H" + std::to_string(h.index);
  }

  friend bool operator==(const OrderedGroup& a, const OrderedGroup& b) { return a.slots_ == b.slots_; }

 private:
  std::vector<Slot> slots_;
};

inline std::strong_ordering compare(const OrderedGroup& g, const GroupElement& a, const GroupElement& b) {
  g.require_member(a);
  g.require_member(b);
  return a <=> b;
}

/// True iff G/H_j has no smallest positive element, i.e. Slot_j is dense.
inline bool is_strongly_convex(const OrderedGroup& g, ConvexSubgroup h) {
  if (h.index == 0) throw error(error_kind::not_proper, "the whole group is not a proper convex subgroup");
  if (h.index > g.rank()) throw error(error_kind::invalid_argument, "convex subgroup index out of range");
  return g.slot(h.index).is_dense();
}

struct ArchimedeanComponent {
  ConvexSubgroup smallest_containing;    // C(g)
  ConvexSubgroup largest_not_containing; // C+(g)
  Slot component;
};

inline ArchimedeanComponent archimedean_component(const OrderedGroup& g, const GroupElement& x) {
  g.require_member(x);
  for (std::size_t i = 0; i < g.rank(); ++i) {
    if (x.coords[i] != 0) return {ConvexSubgroup{i}, ConvexSubgroup{i + 1}, g.slots()[i]};
  }
  throw error(error_kind::undefined_component, "the archimedean component of 0 is undefined");
}

/// No archimedean component is discrete.
inline bool satisfies_drvg(const OrderedGroup& g) {
  return std::all_of(g.slots().begin(), g.slots().end(), [](const Slot& s) { return s.is_dense(); });
}

namespace detail {

inline Slot parse_slot_name(std::string_view s) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  if (s == "Q") return Slot::rationals();
  if (s == "Z") return Slot::cyclic(1);
  if (s.size() > 5 && s.substr(0, 4) == "Z[1/" && s.back() == ']') {
    Integer n(std::string(s.substr(4, s.size() - 5)));
    std::vector<unsigned> primes;
    for (const auto& f : prime_factors(n)) primes.push_back(static_cast<unsigned>(f));
    return Slot::localized({1}, primes);
  }
  throw parse_error("unknown slot name '" + std::string(s) + "' (expected Q, Z or Z[1/n])");
}

}  // namespace detail

/// Parses shorthand group names: "Q", "Z", "Z[1/2]", "QxZ", "Q x Z[1/3]", "Q×Z".
inline OrderedGroup parse_group_name(std::string_view text) {
  std::string s(text);
  for (std::string_view times : {"×", " x ", "*"}) {
    std::size_t pos;
    while ((pos = s.find(times)) != std::string::npos) s.replace(pos, times.size(), "x");
  }
  std::vector<Slot> slots;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('x', start);
    if (end == std::string::npos) end = s.size();
    slots.push_back(detail::parse_slot_name(std::string_view(s).substr(start, end - start)));
    start = end + 1;
  }
  return OrderedGroup(std::move(slots));
}

}  // namespace defectlab
