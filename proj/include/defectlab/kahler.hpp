#pragma once

// Omega_{O_L|O_K} presented as U/UV by ideal data; for degree-p defect extensions
// U = I_E and V = I_E^(p-1).

#include <algorithm>
#include <cstddef>
#include <vector>

#include "defectlab/asext.hpp"
#include "defectlab/extension.hpp"
#include "defectlab/hahn.hpp"
#include "defectlab/rational.hpp"
#include "defectlab/segcalc.hpp"

namespace defectlab {

struct PresentedModule {
  IdealDesc u;
  IdealDesc v;
  IdealDesc uv;
};

/// U = I_E, V = I_E^(p-1) and UV, the latter two built as iterated ideal products.
inline PresentedModule omega_presentation(const IdealDesc& ramification_ideal, unsigned p) {
  if (p < 2) throw error(error_kind::invalid_argument, "p must be a prime");
  IdealDesc v = ramification_ideal;
  for (unsigned i = 2; i < p; ++i) v = ideal_product(v, ramification_ideal);
  IdealDesc uv = ideal_product(ramification_ideal, v);
  return {ramification_ideal, v, uv};
}

inline bool is_zero(const PresentedModule& m) { return m.u.segment() == m.uv.segment(); }

struct ChainRuleCheck {
  std::size_t alpha = 0, beta = 0;  // indices into the sorted chain, alpha before beta
  HahnSeries a_ratio;               // a_alpha / a_beta
  bool composed_identity = false;   // h_alpha(r X + c) = r^p h_beta(X) with r = a_alpha / a_beta
  bool derivative_scaled = false;   // h_alpha'(b_alpha) * r = r^p h_beta'(b_beta)
  bool monic_identity = false;      // h_beta'(b_beta) = h_alpha'(b_alpha) (a_beta / a_alpha)^(p-1)
  bool value_identity = false;      // (p-1) v t_beta = (p-1) v t_alpha - (p-1)(v t_alpha - v t_beta)

  bool ok() const { return composed_identity && derivative_scaled && monic_identity && value_identity; }
};

struct FiniteChainReport {
  GeneratorChain chain;
  std::vector<ThetaCPolynomial> polynomials;  // h_alpha = g_{c_alpha}, in chain order
  std::vector<ChainRuleCheck> checks;
  FinalSegment u_segment;   // generated by the values v t_c
  FinalSegment v_segment;   // generated by the values (p-1) v t_c

  bool ok() const {
    return chain.consistent() &&
           std::all_of(polynomials.begin(), polynomials.end(), [](const ThetaCPolynomial& g) { return g.consistent(); }) &&
           std::all_of(checks.begin(), checks.end(), [](const ChainRuleCheck& c) { return c.ok(); });
  }
};

namespace detail {

inline bool same_polynomial(const Polynomial& x, const Polynomial& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] - y[i]).terms().empty()) return false;
  return true;
}

}  // namespace detail

/// Directed-system data of the finite chain O_K[theta_c1] in ... in O_K[theta_cn]:
/// generators a_alpha = t_c, derivative values h'_alpha(b_alpha) = -t_c^(p-1), and the
/// transition relations between consecutive members, all as exact series identities.
inline FiniteChainReport finite_chain_presentation_check(const ExtensionRef& ext, const std::vector<HahnSeries>& cs) {
  const unsigned p = ext->p;
  GroupRef vk = value_group_of(*ext);
  GeneratorChain chain = generator_chain(ext, cs);
  std::vector<ThetaCPolynomial> polys;
  std::vector<GroupElement> uvals, vvals;
  for (const auto& e : chain.entries) {
    polys.push_back(minimal_polynomial_theta_c(ext, e.c));
    uvals.push_back(GroupElement{-e.distance});
    vvals.push_back(GroupElement{Rational(static_cast<long long>(p - 1)) * -e.distance});
  }
  FiniteChainReport out{chain, polys, {}, upward_closure(vk, uvals), upward_closure(vk, vvals)};
  for (const auto& tr : chain.transitions) {
    if (tr.to != tr.from + 1) continue;
    const ThetaCPolynomial& ha = polys[tr.from];
    const ThetaCPolynomial& hb = polys[tr.to];
    ChainRuleCheck ck{tr.from, tr.to, tr.ratio};
    HahnSeries rp = tr.ratio.pow(p);
    Polynomial composed = compose_linear(ha.g, tr.ratio, tr.offset);
    Polynomial scaled_b = hb.g;
    for (auto& coef : scaled_b) coef = rp * coef;
    ck.composed_identity = detail::same_polynomial(composed, scaled_b);
    ck.derivative_scaled = (ha.derivative_value * tr.ratio - rp * hb.derivative_value).terms().empty();
    HahnSeries inv = tr.ratio.inverse();
    ck.monic_identity = (hb.derivative_value - ha.derivative_value * inv.pow(p - 1)).terms().empty();
    Rational pm1(static_cast<long long>(p - 1));
    Rational vta = -chain.entries[tr.from].distance, vtb = -chain.entries[tr.to].distance;
    ck.value_identity = hb.derivative_valuation == pm1 * vtb && pm1 * vtb == pm1 * vta - pm1 * (vta - vtb);
    out.checks.push_back(std::move(ck));
  }
  return out;
}

}  // namespace defectlab
