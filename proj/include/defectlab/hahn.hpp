#pragma once

// Truncated generalized power series over F_p with rational exponents.
//
// A series is a finite map exponent -> nonzero coefficient plus a precision bound pi:
// coefficients at exponents >= pi are unknown. Exact series have pi = +infinity.
// Every stored coefficient is exact; operations compute the output precision
// pessimistically from the inputs' precisions and valuations.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/ogroup.hpp"
#include "defectlab/rational.hpp"

namespace defectlab {

/// Result of v(x): a definite value, a lower bound (indeterminate zero), or +infinity (exact zero).
struct SeriesValuation {
  enum class Kind { value, at_least, infinite };
  Kind kind;
  Rational bound;  // the value for Kind::value, the precision for Kind::at_least

  static SeriesValuation value(Rational v) { return {Kind::value, std::move(v)}; }
  static SeriesValuation at_least(Rational v) { return {Kind::at_least, std::move(v)}; }
  static SeriesValuation infinite() { return {Kind::infinite, 0}; }

  bool is_value() const { return kind == Kind::value; }
  const Rational& get() const {
    if (kind != Kind::value) throw error(error_kind::precision_loss, "valuation is not determinate");
    return bound;
  }

  friend bool operator==(const SeriesValuation& a, const SeriesValuation& b) {
    return a.kind == b.kind && (a.kind == Kind::infinite || a.bound == b.bound);
  }
};

class HahnSeries {
 public:
  using Terms = std::map<Rational, unsigned>;

  explicit HahnSeries(unsigned p) : p_(p) {
    if (!is_prime_number(p)) throw error(error_kind::invalid_argument, "characteristic " + std::to_string(p) + " is not prime");
  }

  HahnSeries(unsigned p, Terms terms, std::optional<Rational> precision = std::nullopt) : HahnSeries(p) {
    precision_ = std::move(precision);
    for (auto& [e, c] : terms) {
      unsigned r = c % p_;
      if (r != 0 && (!precision_ || e < *precision_)) terms_.emplace(e, r);
    }
  }

  static HahnSeries zero(unsigned p) { return HahnSeries(p); }
  static HahnSeries indeterminate(unsigned p, Rational precision) { return HahnSeries(p, {}, std::move(precision)); }
  static HahnSeries constant(unsigned p, long long c) {
    long long r = ((c % static_cast<long long>(p)) + p) % p;
    return HahnSeries(p, Terms{{Rational(0), static_cast<unsigned>(r)}});
  }
  static HahnSeries monomial(unsigned p, const Rational& exponent, unsigned coeff = 1) {
    return HahnSeries(p, Terms{{exponent, coeff}});
  }

  unsigned characteristic() const { return p_; }
  const Terms& terms() const { return terms_; }
  const std::optional<Rational>& precision() const { return precision_; }
  bool is_exact() const { return !precision_.has_value(); }
  bool is_exact_zero() const { return terms_.empty() && is_exact(); }
  bool is_indeterminate_zero() const { return terms_.empty() && !is_exact(); }

  unsigned coefficient(const Rational& e) const {
    if (precision_ && e >= *precision_) throw error(error_kind::precision_loss, "coefficient at t^" + to_string(e) + " is beyond precision");
    auto it = terms_.find(e);
    return it == terms_.end() ? 0u : it->second;
  }

  SeriesValuation valuation() const {
    if (!terms_.empty()) return SeriesValuation::value(terms_.begin()->first);
    if (precision_) return SeriesValuation::at_least(*precision_);
    return SeriesValuation::infinite();
  }

  /// Leading monomial (requires a determinate nonzero value).
  HahnSeries leading_term() const {
    if (terms_.empty()) throw error(error_kind::precision_loss, "leading term of a (possibly indeterminate) zero series");
    return HahnSeries(p_, Terms{*terms_.begin()});
  }

  /// Drops everything at exponents >= bound and lowers the precision to bound.
  HahnSeries truncated(const Rational& bound) const {
    HahnSeries r(p_);
    r.precision_ = precision_ && *precision_ < bound ? *precision_ : bound;
    for (const auto& [e, c] : terms_)
      if (e < *r.precision_) r.terms_.emplace(e, c);
    return r;
  }

  /// Terms strictly below `bound`, keeping the result exact (a polynomial truncation).
  HahnSeries part_below(const Rational& bound) const {
    HahnSeries r(p_);
    for (const auto& [e, c] : terms_)
      if (e < bound) r.terms_.emplace(e, c);
    if (precision_ && *precision_ < bound) r.precision_ = precision_;
    return r;
  }

  HahnSeries operator-() const {
    HahnSeries r = *this;
    for (auto& [e, c] : r.terms_) c = p_ - c;
    return r;
  }

  friend HahnSeries operator+(const HahnSeries& x, const HahnSeries& y) {
    check_char(x, y);
    HahnSeries r(x.p_);
    r.precision_ = min_precision(x.precision_, y.precision_);
    r.terms_ = x.terms_;
    for (const auto& [e, c] : y.terms_) {
      unsigned s = (r.terms_[e] + c) % x.p_;
      if (s == 0) r.terms_.erase(e);
      else r.terms_[e] = s;
    }
    r.drop_beyond_precision();
    return r;
  }

  friend HahnSeries operator-(const HahnSeries& x, const HahnSeries& y) { return x + (-y); }

  friend HahnSeries operator*(const HahnSeries& x, const HahnSeries& y) {
    check_char(x, y);
    HahnSeries r(x.p_);
    if (x.is_exact_zero() || y.is_exact_zero()) return r;
    // Unknown tails contribute at exponents >= pi_x + v(y) and >= pi_y + v(x).
    auto low = [](const HahnSeries& s) { return s.terms_.empty() ? *s.precision_ : s.terms_.begin()->first; };
    std::optional<Rational> px, py;
    if (x.precision_) px = *x.precision_ + low(y);
    if (y.precision_) py = *y.precision_ + low(x);
    r.precision_ = min_precision(px, py);
    std::vector<std::pair<Rational, unsigned long long>> prods;
    prods.reserve(x.terms_.size() * y.terms_.size());
    for (const auto& [ex, cx] : x.terms_) {
      for (const auto& [ey, cy] : y.terms_) {
        Rational e = ex + ey;
        if (r.precision_ && e >= *r.precision_) break;
        prods.emplace_back(std::move(e), static_cast<unsigned long long>(cx) * cy);
      }
    }
    std::sort(prods.begin(), prods.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < prods.size();) {
      std::size_t j = i;
      unsigned long long sum = 0;
      for (; j < prods.size() && prods[j].first == prods[i].first; ++j) sum = (sum + prods[j].second) % x.p_;
      if (sum != 0) r.terms_.emplace_hint(r.terms_.end(), std::move(prods[i].first), static_cast<unsigned>(sum));
      i = j;
    }
    return r;
  }

  HahnSeries& operator+=(const HahnSeries& y) { return *this = *this + y; }
  HahnSeries& operator-=(const HahnSeries& y) { return *this = *this - y; }
  HahnSeries& operator*=(const HahnSeries& y) { return *this = *this * y; }

  /// Multiplication by an F_p scalar.
  HahnSeries scaled(unsigned k) const {
    k %= p_;
    HahnSeries r(p_);
    r.precision_ = precision_;
    if (k == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, static_cast<unsigned>((static_cast<unsigned long long>(c) * k) % p_));
    return r;
  }

  /// Multiplication by t^e.
  HahnSeries shifted(const Rational& e) const {
    HahnSeries r(p_);
    if (precision_) r.precision_ = *precision_ + e;
    for (const auto& [x, c] : terms_) r.terms_.emplace(x + e, c);
    return r;
  }

  HahnSeries pow(unsigned n) const {
    HahnSeries r = constant(p_, 1);
    for (unsigned i = 0; i < n; ++i) r *= *this;
    return r;
  }

  /// x^p computed through Frobenius: exponents times p, coefficients fixed (they lie in F_p).
  HahnSeries frobenius() const {
    HahnSeries r(p_);
    if (precision_) r.precision_ = *precision_ * p_;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e * p_, c);
    return r;
  }

  /// The unique y with y^p = x.
  HahnSeries pth_root() const {
    HahnSeries r(p_);
    if (precision_) r.precision_ = *precision_ / p_;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e / p_, c);
    return r;
  }

  /// 1/x, expanded up to absolute exponent `cap` when the expansion is infinite.
  HahnSeries inverse(const std::optional<Rational>& cap = std::nullopt) const {
    if (terms_.empty()) throw error(error_kind::precision_loss, "cannot invert a (possibly indeterminate) zero series");
    const auto& [alpha, kappa] = *terms_.begin();
    unsigned kinv = inverse_mod(kappa);
    // x = kappa t^alpha (1 + u) with v(u) > 0.
    HahnSeries u = shifted(-alpha).scaled(kinv) - constant(p_, 1);
    std::optional<Rational> rel;  // relative precision of the result
    if (precision_) rel = *precision_ - alpha;
    if (cap) rel = min_precision(rel, *cap + alpha);
    if (u.is_exact_zero()) {
      HahnSeries r = monomial(p_, -alpha, kinv);
      if (rel) r = r.truncated(*rel - alpha);
      return r;
    }
    if (!rel) throw error(error_kind::precision_loss, "inverse of " + str() + " has infinite support; supply a precision cap");
    HahnSeries sum = constant(p_, 1).truncated(*rel);
    HahnSeries term = constant(p_, 1);
    HahnSeries neg_u = (-u).truncated(*rel);
    while (true) {
      term = (term * neg_u).truncated(*rel);
      if (term.terms_.empty()) break;
      sum = sum + term;
    }
    return sum.shifted(-alpha).scaled(kinv);
  }

  friend bool operator==(const HahnSeries& a, const HahnSeries& b) {
    return a.p_ == b.p_ && a.terms_ == b.terms_ && a.precision_ == b.precision_;
  }

  /// Agreement below the smaller precision.
  bool agrees_with(const HahnSeries& other) const {
    auto bound = min_precision(precision_, other.precision_);
    HahnSeries a = bound ? truncated(*bound) : *this;
    HahnSeries b = bound ? other.truncated(*bound) : other;
    return a.terms_ == b.terms_;
  }

  std::string str() const {
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      if (e == 0) {
        s += std::to_string(c);
        continue;
      }
      if (c != 1) s += std::to_string(c) + "*";
      s += "t";
      if (e != 1) s += "^" + to_string(e);
    }
    if (precision_) {
      if (!s.empty()) s += " + ";
      s += "O(t^" + to_string(*precision_) + ")";
    }
    return s.empty() ? "0" : s;
  }

 private:
  static void check_char(const HahnSeries& x, const HahnSeries& y) {
    if (x.p_ != y.p_) throw error(error_kind::invalid_argument, "series over different characteristics");
  }

  static std::optional<Rational> min_precision(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? a : b;
  }

  void drop_beyond_precision() {
    if (!precision_) return;
    terms_.erase(terms_.lower_bound(*precision_), terms_.end());
  }

  unsigned inverse_mod(unsigned k) const {
    unsigned long long r = 1, b = k % p_;
    for (unsigned e = p_ - 2; e > 0; e >>= 1) {
      if (e & 1u) r = r * b % p_;
      b = b * b % p_;
    }
    return static_cast<unsigned>(r);
  }

  unsigned p_;
  Terms terms_;
  std::optional<Rational> precision_;
};

/// Artin-Schreier polynomial X^p - X evaluated at c.
inline HahnSeries wp(const HahnSeries& c) { return c.frobenius() - c; }

// ---------------------------------------------------------------------------
// Series literals: "t^-1 + O(t^2)", "2*t^3 + t^6", "t^(-1/2) + 1", "-t^1/2".

namespace detail {

class SeriesParser {
 public:
  SeriesParser(std::string_view text, unsigned p) : s_(text), p_(p) {}

  HahnSeries parse() {
    HahnSeries::Terms terms;
    std::optional<Rational> precision;
    skip();
    if (pos_ == s_.size()) throw parse_error("empty series literal");
    bool first = true;
    while (pos_ < s_.size()) {
      bool neg = false;
      if (peek() == '+' || peek() == '-') {
        neg = peek() == '-';
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      if (peek() == 'O') {
        if (neg) fail("negative precision marker");
        ++pos_;
        expect('(');
        expect('t');
        expect('^');
        precision = exponent();
        expect(')');
        skip();
        if (pos_ != s_.size()) fail("precision marker must come last");
        break;
      }
      long long coeff = 1;
      Rational e = 0;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        coeff = integer();
        skip();
        if (peek() == '*') {
          ++pos_;
          skip();
          expect('t');
          e = power();
        } else if (peek() == 't') {
          fail("use '*' between coefficient and t");
        }
      } else if (peek() == 't') {
        ++pos_;
        e = power();
      } else {
        fail("expected a term");
      }
      long long c = ((neg ? -coeff : coeff) % static_cast<long long>(p_) + p_) % p_;
      terms[e] = static_cast<unsigned>((terms[e] + static_cast<unsigned>(c)) % p_);
      skip();
    }
    return HahnSeries(p_, std::move(terms), std::move(precision));
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(msg + " at position " + std::to_string(pos_) + " in series literal '" + std::string(s_) + "'");
  }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    skip();
  }
  long long integer() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::stoll(std::string(s_.substr(start, pos_ - start)));
  }
  Rational power() {
    skip();
    if (peek() != '^') return 1;
    ++pos_;
    return exponent();
  }
  Rational exponent() {
    skip();
    bool paren = peek() == '(';
    if (paren) ++pos_;
    skip();
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '/') ++pos_;
    Rational e = parse_rational(s_.substr(start, pos_ - start));
    if (paren) expect(')');
    return e;
  }

  std::string_view s_;
  unsigned p_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline HahnSeries parse_series(std::string_view text, unsigned p) { return detail::SeriesParser(text, p).parse(); }

// ---------------------------------------------------------------------------
// Base fields

/// The valued base field K in which series are interpreted.
struct BaseFieldSpec {
  enum class Kind { perfect_hull_rational_function, perfect_hull_laurent, truncated_hahn };

  Kind kind = Kind::perfect_hull_rational_function;
  unsigned p = 2;
  std::optional<OrderedGroup> hahn_group;  // TruncatedHahn only; rank 1

  static BaseFieldSpec perfect_hull_rational_function(unsigned p) { return {Kind::perfect_hull_rational_function, p, std::nullopt}; }
  static BaseFieldSpec perfect_hull_laurent(unsigned p) { return {Kind::perfect_hull_laurent, p, std::nullopt}; }
  static BaseFieldSpec truncated_hahn(unsigned p, OrderedGroup g) {
    if (g.rank() != 1) throw error(error_kind::invalid_argument, "truncated Hahn base fields need a rank-1 value group");
    return {Kind::truncated_hahn, p, std::move(g)};
  }

  OrderedGroup value_group() const {
    if (kind == Kind::truncated_hahn) return *hahn_group;
    return OrderedGroup::p_adic_rationals(p);
  }

  /// Membership up to precision: every support exponent lies in the value group.
  bool contains(const HahnSeries& x) const {
    if (x.characteristic() != p) return false;
    OrderedGroup g = value_group();
    for (const auto& [e, c] : x.terms())
      if (!g.contains(GroupElement{e})) return false;
    return true;
  }

  std::string kind_name() const {
    switch (kind) {
      case Kind::perfect_hull_rational_function: return "perfect_hull_rational_function";
      case Kind::perfect_hull_laurent: return "perfect_hull_laurent";
      case Kind::truncated_hahn: return "truncated_hahn";
    }
    return "unknown";
  }
};

}  // namespace defectlab
