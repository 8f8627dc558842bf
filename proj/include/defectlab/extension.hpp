#pragma once

// Arithmetic in L = K(theta), theta^p - theta = a, on the basis 1, theta, ..., theta^(p-1),
// plus polynomials over K and the Taylor-expansion valuation of elements of L.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/hahn.hpp"
#include "defectlab/rational.hpp"

namespace defectlab {

/// X^p - X = a over the base field K.
struct ASExtensionSpec {
  unsigned p;
  BaseFieldSpec base;
  HahnSeries a;

  ASExtensionSpec(unsigned p_, BaseFieldSpec base_, HahnSeries a_) : p(p_), base(std::move(base_)), a(std::move(a_)) {
    if (base.p != p || a.characteristic() != p) throw error(error_kind::invalid_argument, "characteristic mismatch in extension spec");
    if (!base.contains(a)) throw error(error_kind::invalid_argument, "right-hand side " + a.str() + " is not an element of the base field");
  }
};

using ExtensionRef = std::shared_ptr<const ASExtensionSpec>;

inline ExtensionRef make_extension(unsigned p, BaseFieldSpec base, HahnSeries a) {
  return std::make_shared<const ASExtensionSpec>(p, std::move(base), std::move(a));
}

/// Polynomial over K; entry i is the coefficient of X^i.
using Polynomial = std::vector<HahnSeries>;

inline unsigned binomial_mod(unsigned n, unsigned k, unsigned p) {
  if (k > n) return 0;
  // Lucas' theorem.
  unsigned long long r = 1;
  while (n || k) {
    unsigned ni = n % p, ki = k % p;
    if (ki > ni) return 0;
    unsigned long long c = 1;
    for (unsigned i = 0; i < ki; ++i) c = c * (ni - i);
    unsigned long long d = 1;
    for (unsigned i = 1; i <= ki; ++i) d = d * i;
    r = r * ((c / d) % p) % p;
    n /= p;
    k /= p;
  }
  return static_cast<unsigned>(r);
}

inline Polynomial derivative(const Polynomial& g) {
  if (g.empty()) return {};
  unsigned p = g.front().characteristic();
  Polynomial d;
  for (std::size_t i = 1; i < g.size(); ++i) d.push_back(g[i].scaled(static_cast<unsigned>(i % p)));
  if (d.empty()) d.push_back(HahnSeries::zero(p));
  return d;
}

/// Hasse derivatives: entry i is the coefficient of (X - c)^i in g.
inline std::vector<HahnSeries> taylor_coefficients(const Polynomial& g, const HahnSeries& c) {
  unsigned p = c.characteristic();
  std::vector<HahnSeries> powers{HahnSeries::constant(p, 1)};
  for (std::size_t k = 1; k < g.size(); ++k) powers.push_back(powers.back() * c);
  std::vector<HahnSeries> out(g.size(), HahnSeries::zero(p));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t k = i; k < g.size(); ++k) {
      unsigned b = binomial_mod(static_cast<unsigned>(k), static_cast<unsigned>(i), p);
      if (b) out[i] += (g[k] * powers[k - i]).scaled(b);
    }
  return out;
}

/// h(s X + c).
inline Polynomial compose_linear(const Polynomial& h, const HahnSeries& s, const HahnSeries& c) {
  unsigned p = c.characteristic();
  Polynomial out(h.size(), HahnSeries::zero(p));
  auto shifted = taylor_coefficients(h, c);  // h(Y) = sum shifted[i] (Y - c)^i
  HahnSeries spow = HahnSeries::constant(p, 1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    out[i] = shifted[i] * spow;
    spow *= s;
  }
  return out;
}

class ExtensionElement {
 public:
  ExtensionElement(ExtensionRef ext, std::vector<HahnSeries> coeffs) : ext_(std::move(ext)), coeffs_(std::move(coeffs)) {
    unsigned p = ext_->p;
    if (coeffs_.empty()) coeffs_.push_back(HahnSeries::zero(p));
    reduce();
  }

  static ExtensionElement from_base(ExtensionRef ext, const HahnSeries& b) { return ExtensionElement(std::move(ext), {b}); }

  static ExtensionElement theta(ExtensionRef ext) {
    unsigned p = ext->p;
    return ExtensionElement(std::move(ext), {HahnSeries::zero(p), HahnSeries::constant(p, 1)});
  }

  const ExtensionRef& extension() const { return ext_; }
  const std::vector<HahnSeries>& coeffs() const { return coeffs_; }
  const HahnSeries& coeff(std::size_t i) const { return coeffs_.at(i); }
  unsigned p() const { return ext_->p; }

  bool is_exact_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const HahnSeries& s) { return s.is_exact_zero(); });
  }
  /// Zero as far as the precision of every coefficient can tell.
  bool is_zero_within_precision() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const HahnSeries& s) { return s.terms().empty(); });
  }
  bool in_base_field() const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      if (!coeffs_[i].is_exact_zero()) return false;
    return true;
  }

  friend ExtensionElement operator+(const ExtensionElement& x, const ExtensionElement& y) {
    std::vector<HahnSeries> c = x.coeffs_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += y.coeffs_[i];
    return ExtensionElement(x.ext_, std::move(c));
  }
  friend ExtensionElement operator-(const ExtensionElement& x, const ExtensionElement& y) {
    std::vector<HahnSeries> c = x.coeffs_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= y.coeffs_[i];
    return ExtensionElement(x.ext_, std::move(c));
  }
  friend ExtensionElement operator*(const ExtensionElement& x, const ExtensionElement& y) {
    unsigned p = x.p();
    std::vector<HahnSeries> c(2 * p - 1, HahnSeries::zero(p));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        if (!x.coeffs_[i].is_exact_zero() && !y.coeffs_[j].is_exact_zero()) c[i + j] += x.coeffs_[i] * y.coeffs_[j];
    return ExtensionElement(x.ext_, std::move(c));
  }
  friend ExtensionElement operator*(const HahnSeries& k, const ExtensionElement& x) {
    std::vector<HahnSeries> c = x.coeffs_;
    for (auto& s : c) s = k * s;
    return ExtensionElement(x.ext_, std::move(c));
  }

  ExtensionElement pow(unsigned n) const {
    ExtensionElement r = from_base(ext_, HahnSeries::constant(p(), 1));
    for (unsigned i = 0; i < n; ++i) r = r * *this;
    return r;
  }

  /// Image under the automorphism theta -> theta + k.
  ExtensionElement sigma(unsigned k = 1) const {
    unsigned p = this->p();
    std::vector<HahnSeries> c(p, HahnSeries::zero(p));
    for (unsigned j = 0; j < p; ++j) {
      if (coeffs_[j].is_exact_zero()) continue;
      // coefficient of theta^i in (theta + k)^j is C(j,i) k^(j-i)
      unsigned long long kp = 1;
      for (unsigned i = j + 1; i-- > 0;) {
        unsigned b = static_cast<unsigned>(binomial_mod(j, i, p) * kp % p);
        if (b) c[i] += coeffs_[j].scaled(b);
        kp = kp * k % p;
      }
    }
    return ExtensionElement(ext_, std::move(c));
  }

  /// The coefficients read as a polynomial g with this element = g(theta).
  Polynomial as_polynomial() const { return coeffs_; }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].is_exact_zero()) continue;
      if (!s.empty()) s += " + ";
      std::string c = "(" + coeffs_[i].str() + ")";
      if (i == 0) s += c;
      else s += c + (i == 1 ? "*th" : "*th^" + std::to_string(i));
    }
    return s.empty() ? "0" : s;
  }

 private:
  void reduce() {
    unsigned p = ext_->p;
    for (std::size_t k = coeffs_.size(); k-- > p;) {
      // theta^k = theta^(k-p) (theta + a)
      HahnSeries ck = coeffs_[k];
      if (!ck.is_exact_zero()) {
        coeffs_[k - p + 1] += ck;
        coeffs_[k - p] += ck * ext_->a;
      }
    }
    coeffs_.resize(p, HahnSeries::zero(p));
  }

  ExtensionRef ext_;
  std::vector<HahnSeries> coeffs_;
};

inline ExtensionElement evaluate(const Polynomial& g, const ExtensionElement& x) {
  ExtensionElement r = ExtensionElement::from_base(x.extension(), HahnSeries::zero(x.p()));
  for (std::size_t i = g.size(); i-- > 0;) r = r * x + ExtensionElement::from_base(x.extension(), g[i]);
  return r;
}

/// Points of approximation c with known distances v(theta - c), ascending.
struct ApproxPoint {
  HahnSeries c;
  Rational distance;
};

/// v(x) via Taylor expansion around approximations c: once the minimum of the values
/// v(d_i g(c)) + i v(theta - c) is attained by a single term it equals v(x); the value
/// is re-derived at the next approximation as a consistency check.
/// Returns nullopt for the zero element.
inline std::optional<Rational> element_valuation(const ExtensionElement& x, const std::vector<ApproxPoint>& approx) {
  if (x.is_exact_zero()) return std::nullopt;
  if (x.in_base_field()) {
    auto v = x.coeff(0).valuation();
    if (!v.is_value()) throw error(error_kind::valuation_unresolved, "base-field coefficient is zero within precision");
    return v.get();
  }
  Polynomial g = x.as_polynomial();
  auto at = [&](const ApproxPoint& pt) -> std::optional<Rational> {
    auto taylor = taylor_coefficients(g, pt.c);
    std::vector<Rational> vals;
    for (std::size_t i = 0; i < taylor.size(); ++i) {
      if (taylor[i].is_exact_zero()) continue;
      auto v = taylor[i].valuation();
      if (!v.is_value()) return std::nullopt;
      vals.push_back(v.get() + Rational(static_cast<long long>(i)) * pt.distance);
    }
    if (vals.empty()) return std::nullopt;
    std::sort(vals.begin(), vals.end());
    if (vals.size() > 1 && vals[0] == vals[1]) return std::nullopt;
    return vals.front();
  };
  for (std::size_t s = 0; s < approx.size(); ++s) {
    auto v = at(approx[s]);
    if (!v) continue;
    for (std::size_t t = s + 1; t < approx.size(); ++t) {
      auto w = at(approx[t]);
      if (!w) continue;
      if (*w != *v) throw error(error_kind::valuation_unresolved, "Taylor valuation unstable: " + to_string(*v) + " vs " + to_string(*w));
      break;
    }
    return v;
  }
  throw error(error_kind::valuation_unresolved, "Taylor-term values never became pairwise distinct for " + x.str());
}

}  // namespace defectlab
