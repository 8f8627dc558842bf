#pragma once

// Kummer extensions of degree p in mixed characteristic, at the level of value data:
// the distance cut v(eta - K) together with vp.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "defectlab/asext.hpp"
#include "defectlab/errors.hpp"
#include "defectlab/ogroup.hpp"
#include "defectlab/rational.hpp"
#include "defectlab/segcalc.hpp"

namespace defectlab {

struct KummerValueData {
  unsigned p;
  GroupRef group;
  GroupElement vp;
  InitialSegment distance;  // v(eta - K)
  std::optional<InitialSegment> supplied_residual;

  KummerValueData(unsigned p_, GroupRef g, GroupElement vp_, InitialSegment d)
      : p(p_), group(std::move(g)), vp(std::move(vp_)), distance(std::move(d)) {
    if (!is_prime_number(p)) throw error(error_kind::invalid_argument, std::to_string(p) + " is not prime");
    if (!group->contains(vp)) throw error(error_kind::malformed_element, "vp = " + vp.str() + " is not an element of " + group->name());
    if (!(distance.group() == *group)) throw error(error_kind::group_mismatch, "distance cut lives in a different group");
    if (vp <= group->zero()) throw error(error_kind::invalid_characteristic_data, "vp = " + vp.str() + " must be positive");
  }

  /// Distance derived from a cut R of vK with v(a - K^p) = R n p vK, via v(a - K^p) = p v(eta - K).
  static KummerValueData from_residual(unsigned p, GroupRef g, GroupElement vp, const InitialSegment& residual) {
    KummerValueData d(p, std::move(g), std::move(vp), scale_boundary(Rational(1) / p, residual));
    d.supplied_residual = residual;
    return d;
  }

  /// vp/(p-1), in the divisible hull.
  GroupElement bound() const { return (Rational(1) / (p - 1)) * vp; }
  bool bound_in_group() const { return group->contains(bound()); }
  /// v(a - K^p) as a cut of vK: the supplied one, else p times the distance cut.
  InitialSegment residual() const {
    if (supplied_residual) return *supplied_residual;
    return scale_boundary(Rational(static_cast<long long>(p)), distance);
  }
};

/// v(chi) = -vp/(p-1), with v(1 - zeta_p) = vp/(p-1).
inline GroupElement chi_value(unsigned p, const GroupElement& vp) {
  for (const auto& c : vp.coords) {
    if (c > 0) return (Rational(-1) / (p - 1)) * vp;
    if (c < 0) break;
  }
  throw error(error_kind::invalid_characteristic_data, "vp = " + vp.str() + " must be positive");
}

/// Every element of the distance cut must lie strictly below vp/(p-1).
inline void check_distance_bound(const KummerValueData& d) {
  if (d.distance.reaches(d.bound()))
    throw error(error_kind::invalid_distance, "distance cut " + d.distance.str() + " reaches vp/(p-1) = " + d.bound().str());
}

/// Sigma_E = vp/(p-1) - v(eta - K).
inline FinalSegment sigma_e_kummer(const KummerValueData& d) {
  check_distance_bound(d);
  return shift(d.bound(), negate(d.distance));
}

/// The same segment through the complement: { x : vp/(p-1) - x not in the distance cut }.
inline FinalSegment sigma_e_kummer_via_negation(const KummerValueData& d) {
  check_distance_bound(d);
  InitialSegment moved = shift(-d.bound(), d.distance);
  return negate(moved);
}

/// vT_c = vp/(p-1) - v(eta - c).
inline GroupElement tc_value(const KummerValueData& d, const GroupElement& v_eta_c) {
  GroupElement t = d.bound() - v_eta_c;
  if (t <= GroupElement::zero(t.rank()))
    throw error(error_kind::bound_violation, "v(eta - c) = " + v_eta_c.str() + " is not below vp/(p-1) = " + d.bound().str());
  return t;
}

struct KummerReport {
  FinalSegment sigma_e;
  bool independent = false;
  std::optional<ConvexSubgroup> h_e;
  Thm14Report conditions;
  bool bound_in_group = true;
  bool vp_in_h_e = false;
  std::vector<std::string> flags;

  bool consistent() const { return conditions.coherent() && !vp_in_h_e; }
};

inline KummerReport check_thm14_part2(const KummerValueData& d) {
  const unsigned p = d.p;
  const GroupRef& gref = d.group;
  const OrderedGroup& g = *gref;
  FinalSegment sigma = sigma_e_kummer(d);
  LemmaSdVerdict sd = lemma_sd_classify(sigma, p);
  KummerReport out{sigma, sd.matches, sd.delta, {}, d.bound_in_group()};
  if (!out.bound_in_group) out.flags.push_back("vp/(p-1) = " + d.bound().str() + " lies outside " + g.name());
  if (sd.matches && g.in_subgroup(d.vp, *sd.delta)) {
    out.vp_in_h_e = true;
    out.flags.push_back("H_E = " + g.subgroup_name(*sd.delta) + " contains vp = " + d.vp.str() + "; the data cannot come from a Kummer defect extension");
  }

  Thm14Report& r = out.conditions;
  r.independent = sd.matches;
  InitialSegment residual = d.residual();
  GroupElement pbound = Rational(static_cast<long long>(p)) * d.bound();
  std::vector<ConvexSubgroup> strong;
  for (std::size_t j = 1; j <= g.rank(); ++j)
    if (is_strongly_convex(g, ConvexSubgroup{j})) strong.push_back(ConvexSubgroup{j});

  r.b = false;
  r.c = false;
  for (const auto& h : strong) {
    InitialSegment below_h = negate(FinalSegment::above_subgroup(gref, h));
    if (d.distance == shift(d.bound(), below_h)) {
      r.b = true;
      r.h = h;
    }
    if (residual == shift(pbound, below_h)) r.c = true;
  }

  // exists c with v(a - c^p) >= p/(p-1) vp - vb  iff  the distance cut reaches vp/(p-1) - vb/p
  auto holds_above = [&](ConvexSubgroup h) {
    bool all = true;
    for (const auto& vb : detail::sample_above(g, h, p)) {
      ++r.d_samples;
      if (!d.distance.reaches(d.bound() - (Rational(1) / p) * vb)) all = false;
    }
    return all;
  };
  auto none_inside = [&](ConvexSubgroup h) {
    for (const auto& vb : detail::sample_inside(g, h, p)) {
      ++r.d_samples;
      if (d.distance.reaches(d.bound() - (Rational(1) / p) * vb)) return false;
    }
    return true;
  };
  r.d = false;
  r.d_literal = false;
  for (const auto& h : strong)
    if (holds_above(h)) {
      r.d_literal = true;
      if (none_inside(h)) r.d = true;
    }
  if (g.is_p_divisible(p)) {
    r.e = scale_exact(p, d.distance) == shift(d.vp, d.distance);
    r.f = residual == shift(d.vp, d.distance);
  }
  if (g.rank() == 1) r.g = holds_above(g.trivial_subgroup());
  return out;
}

}  // namespace defectlab
