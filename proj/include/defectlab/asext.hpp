#pragma once

// Artin-Schreier defect extensions of degree p: root approximation, the distance cut
// v(theta - K), the ramification jump and ideal, ramification-value sampling, generator
// chains and the elementary conditions characterising independent defect.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/extension.hpp"
#include "defectlab/hahn.hpp"
#include "defectlab/ogroup.hpp"
#include "defectlab/rational.hpp"
#include "defectlab/segcalc.hpp"

namespace defectlab {

inline Rational default_target(unsigned p) { return Rational(1) / rpow(Rational(p), 10); }

inline GroupRef value_group_of(const ASExtensionSpec& ext) { return make_group(ext.base.value_group()); }

struct ApproxStep {
  HahnSeries c;
  HahnSeries residual;  // a - wp(c)
  Rational residual_value;
  Rational distance;  // v(theta - c)
};

struct ApproxSequence {
  ExtensionRef ext;
  std::vector<ApproxStep> steps;
  Rational target;
  bool precision_exhausted = false;

  std::vector<Rational> distances() const {
    std::vector<Rational> out;
    for (const auto& s : steps) out.push_back(s.distance);
    return out;
  }
  std::vector<Rational> residual_values() const {
    std::vector<Rational> out;
    for (const auto& s : steps) out.push_back(s.residual_value);
    return out;
  }
  std::vector<ApproxPoint> points() const {
    std::vector<ApproxPoint> out;
    for (const auto& s : steps) out.push_back({s.c, s.distance});
    return out;
  }
};

/// Successive approximations c_i of theta: each step removes the leading term of the
/// residual a - wp(c) by adding its p-th root. Stops once v(theta - c) >= -target.
inline ApproxSequence solve_as_root(ExtensionRef ext, const Rational& target, std::size_t max_steps = 4096) {
  if (target <= 0) throw error(error_kind::invalid_argument, "target precision must be positive");
  const unsigned p = ext->p;
  OrderedGroup vk = ext->base.value_group();
  ApproxSequence seq{ext, {}, target};
  HahnSeries c = HahnSeries::zero(p);
  for (std::size_t n = 0; n < max_steps; ++n) {
    HahnSeries r = ext->a - wp(c);
    if (r.is_exact_zero()) throw error(error_kind::no_defect, "root in base field: " + c.str());
    SeriesValuation vr = r.valuation();
    if (!vr.is_value()) {
      if (vr.bound > 0) throw error(error_kind::no_defect, "residual vanishes below precision " + to_string(vr.bound) + "; root in base field near " + c.str());
      seq.precision_exhausted = true;
      return seq;
    }
    const Rational& val = vr.get();
    if (val == 0) throw error(error_kind::not_immediate, "residual of value 0 at c = " + c.str() + ": the residue field extends");
    if (val > 0) throw error(error_kind::no_defect, "residual of positive value at c = " + c.str() + ": the polynomial splits over the henselization");
    Rational d = val / p;
    if (!vk.contains(GroupElement{d}))
      throw error(error_kind::not_immediate, "v(a - wp(c)) = " + to_string(val) + " is not in p*vK within precision");
    seq.steps.push_back({c, r, val, d});
    if (d >= -target) return seq;
    c = c + r.leading_term().pth_root();
  }
  throw error(error_kind::precision_loss, "solver did not reach the target after " + std::to_string(max_steps) + " steps");
}

inline ApproxSequence solve_as_root(ExtensionRef ext) {
  Rational t = default_target(ext->p);
  return solve_as_root(std::move(ext), t);
}

/// v(theta - c) read off the residual: v(a - wp(c)) = p v(theta - c).
inline Rational distance_of(const ASExtensionSpec& ext, const HahnSeries& c) {
  HahnSeries r = ext.a - wp(c);
  SeriesValuation v = r.valuation();
  if (!v.is_value()) throw error(error_kind::precision_loss, "v(a - wp(c)) is not determinate for c = " + c.str());
  if (v.get() >= 0) throw error(error_kind::precision_loss, "v(a - wp(c)) = " + to_string(v.get()) + " >= 0 for c = " + c.str() + "; outside the computed range");
  return v.get() / ext.p;
}

// ---------------------------------------------------------------------------
// Distance cut and ramification jump

enum class CutStatus { converged, inconclusive };

struct LimitEstimate {
  CutStatus status = CutStatus::inconclusive;
  std::optional<Rational> limit;
  Rational lower;  // last value of the sequence
  Rational upper;  // limit when converged, else the a-priori bound
  std::vector<Rational> estimates;
};

namespace detail {

inline LimitEstimate aitken(const std::vector<Rational>& values, const Rational& upper) {
  LimitEstimate out;
  out.lower = values.back();
  out.upper = upper;
  for (std::size_t i = 2; i < values.size(); ++i) {
    Rational d1 = values[i - 1] - values[i - 2];
    Rational d2 = values[i] - values[i - 1];
    if (d2 == d1) continue;
    out.estimates.push_back(values[i] - d2 * d2 / (d2 - d1));
  }
  std::size_t m = out.estimates.size();
  if (m >= 3 && out.estimates[m - 1] == out.estimates[m - 2] && out.estimates[m - 2] == out.estimates[m - 3]) {
    const Rational& beta = out.estimates.back();
    if (beta > out.lower && beta <= upper) {
      out.status = CutStatus::converged;
      out.limit = beta;
      out.upper = beta;
    }
  }
  return out;
}

}  // namespace detail

/// Limit of a strictly increasing sequence of negative rationals bounded by `upper`.
/// Aitken extrapolation; three successive agreeing estimates count as convergence.
/// Interleaved sequences (several monomial families in a) are split by stride 2 or 3,
/// and every residue class has to reach the same limit.
inline LimitEstimate estimate_limit(const std::vector<Rational>& values, const Rational& upper) {
  if (values.size() < 2) throw error(error_kind::insufficient_steps, "need at least 2 approximation steps, got " + std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= upper) throw error(error_kind::invalid_argument, "approximation value " + to_string(values[i]) + " is not below " + to_string(upper));
    if (i > 0 && !(values[i - 1] < values[i])) throw error(error_kind::invalid_argument, "approximation values are not strictly increasing");
  }
  LimitEstimate out = detail::aitken(values, upper);
  if (out.status == CutStatus::converged) return out;
  for (std::size_t stride : {2u, 3u}) {
    std::vector<LimitEstimate> parts;
    for (std::size_t r = 0; r < stride; ++r) {
      std::vector<Rational> sub;
      for (std::size_t i = r; i < values.size(); i += stride) sub.push_back(values[i]);
      parts.push_back(detail::aitken(sub, upper));
    }
    bool agree = std::all_of(parts.begin(), parts.end(), [&](const LimitEstimate& e) {
      return e.status == CutStatus::converged && *e.limit == *parts.front().limit && *e.limit > values.back();
    });
    if (agree) {
      LimitEstimate res = parts[(values.size() - 1) % stride];
      res.lower = values.back();
      return res;
    }
  }
  return out;
}

struct DistanceCut {
  CutStatus status = CutStatus::inconclusive;
  LimitEstimate estimate;
  std::optional<InitialSegment> distance;  // v(theta - K)
  std::optional<FinalSegment> sigma_e;

  Rational bracket_width() const { return estimate.upper - estimate.lower; }
};

/// v(theta - K) = { g < beta } and Sigma_E = -v(theta - K) from the values v(theta - c_i).
inline DistanceCut distance_and_sigma(GroupRef vk, const std::vector<Rational>& values) {
  if (vk->rank() != 1) throw error(error_kind::invalid_argument, "distance sequences are rank-1 data");
  DistanceCut out;
  out.estimate = estimate_limit(values, Rational(0));
  out.status = out.estimate.status;
  if (out.status == CutStatus::converged) {
    out.distance = InitialSegment::below(vk, *out.estimate.limit);
    out.sigma_e = negate(*out.distance);
  }
  return out;
}

inline DistanceCut distance_and_sigma(const ApproxSequence& seq) {
  return distance_and_sigma(value_group_of(*seq.ext), seq.distances());
}

inline IdealDesc ramification_ideal(const FinalSegment& sigma_e) {
  if (sigma_e.is_empty()) throw error(error_kind::empty_segment, "ramification jump is empty");
  return IdealDesc(sigma_e);
}

// ---------------------------------------------------------------------------
// Ramification values v((sigma b - b)/b), sigma: theta -> theta + 1

struct RamificationSample {
  std::size_t attempts = 0;
  std::size_t skipped_base = 0;        // b in K: sigma b = b
  std::size_t skipped_unresolved = 0;  // v(b) or v(sigma b - b) not resolvable
  std::vector<Rational> values;
  std::vector<Rational> chain_values;  // b = theta - c_i
};

inline std::optional<Rational> ramification_value(const ExtensionElement& b, const std::vector<ApproxPoint>& pts) {
  ExtensionElement diff = b.sigma(1) - b;
  auto vd = element_valuation(diff, pts);
  auto vb = element_valuation(b, pts);
  if (!vd || !vb) return std::nullopt;
  return *vd - *vb;
}

namespace detail {

inline HahnSeries random_coefficient(std::mt19937_64& rng, unsigned p) {
  if (rng() % 3 == 0) return HahnSeries::zero(p);
  const long long span = 2LL * p * p;
  Rational den(static_cast<long long>(p) * p);
  HahnSeries::Terms terms;
  std::size_t count = 1 + rng() % 2;
  for (std::size_t i = 0; i < count; ++i) {
    long long n = static_cast<long long>(rng() % static_cast<std::uint64_t>(2 * span + 1)) - span;
    unsigned k = 1 + static_cast<unsigned>(rng() % (p - 1));
    terms[Rational(n) / den] = k;
  }
  return HahnSeries(p, terms);
}

}  // namespace detail

inline ExtensionElement random_element(const ExtensionRef& ext, std::mt19937_64& rng) {
  std::vector<HahnSeries> coeffs;
  for (unsigned i = 0; i < ext->p; ++i) coeffs.push_back(detail::random_coefficient(rng, ext->p));
  return ExtensionElement(ext, std::move(coeffs));
}

/// Collects n values v(sigma b - b) - v(b) for random b of degree < p (at most 10 n draws),
/// plus the values of the chain family b = theta - c_i.
inline RamificationSample sample_ramification_values(const ApproxSequence& seq, std::size_t n, std::uint64_t seed) {
  RamificationSample out;
  auto pts = seq.points();
  std::mt19937_64 rng(seed);
  while (out.values.size() < n && out.attempts < 10 * n) {
    ++out.attempts;
    ExtensionElement b = random_element(seq.ext, rng);
    if (b.in_base_field()) {
      ++out.skipped_base;
      continue;
    }
    try {
      auto v = ramification_value(b, pts);
      if (v) out.values.push_back(*v);
      else ++out.skipped_unresolved;
    } catch (const error& e) {
      if (e.kind() != error_kind::valuation_unresolved && e.kind() != error_kind::precision_loss) throw;
      ++out.skipped_unresolved;
    }
  }
  ExtensionElement th = ExtensionElement::theta(seq.ext);
  for (const auto& s : seq.steps) {
    auto v = ramification_value(th - ExtensionElement::from_base(seq.ext, s.c), pts);
    if (v) out.chain_values.push_back(*v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generator chains O_K[theta_c], theta_c = t_c (theta - c)

/// t_gamma chosen as the monomial t^(-gamma).
inline HahnSeries t_gamma(unsigned p, const Rational& gamma) { return HahnSeries::monomial(p, -gamma); }

inline bool is_integral(const HahnSeries& x) {
  SeriesValuation v = x.valuation();
  switch (v.kind) {
    case SeriesValuation::Kind::infinite: return true;
    case SeriesValuation::Kind::at_least: return v.bound >= 0;
    case SeriesValuation::Kind::value: return v.bound >= 0;
  }
  return false;
}

inline bool same_element(const ExtensionElement& x, const ExtensionElement& y) { return (x - y).is_zero_within_precision(); }

struct ChainEntry {
  HahnSeries c;
  Rational distance;  // v(theta - c)
  HahnSeries t_c;
  ExtensionElement theta_c;
};

/// theta_i = ratio * theta_j + offset for i before j in the chain.
struct ChainTransition {
  std::size_t from = 0, to = 0;
  HahnSeries ratio;   // t_i / t_j
  HahnSeries offset;  // t_i (c_j - c_i)
  bool identity_holds = false;
  bool forward_integral = false;   // ratio, offset in O_K: O_K[theta_i] inside O_K[theta_j]
  bool backward_integral = false;  // 1/ratio, offset/ratio in O_K: the reverse inclusion
  bool strict = false;             // v(theta - c_i) < v(theta - c_j)

  bool consistent() const { return identity_holds && forward_integral && backward_integral == !strict; }
};

struct GeneratorChain {
  std::vector<ChainEntry> entries;  // ascending v(theta - c)
  std::vector<ChainTransition> transitions;

  bool consistent() const {
    return std::all_of(transitions.begin(), transitions.end(), [](const ChainTransition& t) { return t.consistent(); });
  }
};

inline GeneratorChain generator_chain(const ExtensionRef& ext, const std::vector<HahnSeries>& cs) {
  const unsigned p = ext->p;
  GeneratorChain chain;
  ExtensionElement th = ExtensionElement::theta(ext);
  for (const auto& c : cs) {
    Rational d = distance_of(*ext, c);
    HahnSeries tc = t_gamma(p, d);
    chain.entries.push_back({c, d, tc, tc * (th - ExtensionElement::from_base(ext, c))});
  }
  std::stable_sort(chain.entries.begin(), chain.entries.end(), [](const ChainEntry& x, const ChainEntry& y) { return x.distance < y.distance; });
  for (std::size_t i = 0; i < chain.entries.size(); ++i)
    for (std::size_t j = i + 1; j < chain.entries.size(); ++j) {
      const ChainEntry& a = chain.entries[i];
      const ChainEntry& b = chain.entries[j];
      ChainTransition tr{i, j, a.t_c * b.t_c.inverse(), a.t_c * (b.c - a.c)};
      tr.identity_holds = same_element(a.theta_c, tr.ratio * b.theta_c + ExtensionElement::from_base(ext, tr.offset));
      tr.forward_integral = is_integral(tr.ratio) && is_integral(tr.offset);
      HahnSeries inv = tr.ratio.inverse();
      tr.backward_integral = is_integral(inv) && is_integral(tr.offset * inv);
      tr.strict = a.distance < b.distance;
      chain.transitions.push_back(std::move(tr));
    }
  return chain;
}

/// g_c(X) = X^p - t_c^(p-1) X - t_c^p (a - wp(c)), the minimal polynomial of theta_c.
struct ThetaCPolynomial {
  HahnSeries c;
  Rational distance;
  HahnSeries t_c;
  Polynomial g;
  Polynomial derivative;
  HahnSeries derivative_value;  // g_c'(theta_c)
  bool annihilates = false;           // g_c(theta_c) = 0
  bool derivative_constant = false;   // g_c' has no X terms
  bool derivative_matches = false;    // g_c'(theta_c) = -t_c^(p-1)
  bool coefficients_integral = false;
  Rational derivative_valuation;

  bool consistent() const {
    return annihilates && derivative_constant && derivative_matches && coefficients_integral &&
           derivative_valuation == Rational(static_cast<long long>(g.size() - 2)) * (-distance);
  }
};

inline ThetaCPolynomial minimal_polynomial_theta_c(const ExtensionRef& ext, const HahnSeries& c) {
  const unsigned p = ext->p;
  ThetaCPolynomial out{c, distance_of(*ext, c), HahnSeries::zero(p), {}, {}, HahnSeries::zero(p)};
  out.t_c = t_gamma(p, out.distance);
  HahnSeries tpm1 = out.t_c.pow(p - 1);
  out.g.assign(p + 1, HahnSeries::zero(p));
  out.g[p] = HahnSeries::constant(p, 1);
  out.g[1] = -tpm1;
  out.g[0] = -(out.t_c.pow(p) * (ext->a - wp(c)));
  out.derivative = ::defectlab::derivative(out.g);
  out.derivative_constant = std::all_of(out.derivative.begin() + 1, out.derivative.end(), [](const HahnSeries& s) { return s.is_exact_zero(); });
  ExtensionElement theta_c = out.t_c * (ExtensionElement::theta(ext) - ExtensionElement::from_base(ext, c));
  out.annihilates = evaluate(out.g, theta_c).is_zero_within_precision();
  ExtensionElement dv = evaluate(out.derivative, theta_c);
  out.derivative_value = dv.coeff(0);
  out.derivative_matches = dv.in_base_field() && dv.coeff(0) == -tpm1;
  out.coefficients_integral = std::all_of(out.g.begin(), out.g.end(), is_integral);
  out.derivative_valuation = out.derivative_value.valuation().get();
  return out;
}

// ---------------------------------------------------------------------------
// Elementary conditions for independent defect (Artin-Schreier case)

struct Thm14Report {
  std::optional<bool> b, c, d, e, f, g;
  std::optional<ConvexSubgroup> h;  // subgroup witnessing b)
  std::optional<bool> d_literal;    // d) without the converse inside H; informational only
  bool independent = false;         // verdict the conditions are compared against
  std::size_t d_samples = 0;
  std::size_t d_solver_witnesses = 0;

  std::vector<std::pair<std::string, bool>> evaluated() const {
    std::vector<std::pair<std::string, bool>> out;
    const std::pair<const char*, const std::optional<bool>*> all[] = {{"b", &b}, {"c", &c}, {"d", &d}, {"e", &e}, {"f", &f}, {"g", &g}};
    for (const auto& [name, val] : all)
      if (val->has_value()) out.emplace_back(name, **val);
    return out;
  }
  bool coherent() const {
    for (const auto& [name, val] : evaluated())
      if (val != independent) return false;
    return true;
  }
};

namespace detail {

/// Elements x of g with x > H_j on a fixed grid, nearest the subgroup first.
inline std::vector<GroupElement> sample_above(const OrderedGroup& g, ConvexSubgroup h, unsigned p) {
  std::vector<Rational> lead;
  for (int e : {14, 12, 9, 6, 3, 1, 0}) lead.push_back(Rational(1) / rpow(Rational(p), e));
  for (Rational x : {Rational(1, 2), Rational(1, 3), Rational(2), Rational(7, 3), Rational(5)}) lead.push_back(x);
  std::vector<GroupElement> out;
  const std::size_t k = g.rank();
  for (std::size_t level = 1; level <= h.index; ++level) {
    const Slot& s = g.slot(level);
    std::vector<Rational> heads;
    for (const auto& x : lead)
      if (s.contains(x)) heads.push_back(x);
    if (s.is_discrete()) {
      heads.push_back(s.generator());
      heads.push_back(s.generator() * 3);
    }
    for (const auto& x : heads)
      for (Rational tail : {Rational(0), Rational(-5), Rational(3)}) {
        GroupElement y = GroupElement::zero(k);
        y.coords[level - 1] = x;
        for (std::size_t i = level; i < k; ++i) y.coords[i] = tail * g.slot(i + 1).generator();
        if (g.contains(y)) out.push_back(y);
      }
  }
  return out;
}

/// Positive elements of H_j on the same grid.
inline std::vector<GroupElement> sample_inside(const OrderedGroup& g, ConvexSubgroup h, unsigned p) {
  std::vector<GroupElement> out;
  for (auto& y : sample_above(g, g.trivial_subgroup(), p))
    if (g.in_subgroup(y, h)) out.push_back(std::move(y));
  return out;
}

}  // namespace detail

/// Conditions b-g on cut data: `distance` = v(theta - K); `residual` = the initial segment
/// of vK cutting out v(a - wp(K)) inside p vK. Solver steps, when given, supply witnesses c for d).
inline Thm14Report check_thm14_part1(unsigned p, const InitialSegment& distance, const InitialSegment& residual, bool independent,
                                     const ApproxSequence* seq = nullptr) {
  const GroupRef& gref = distance.group_ref();
  const OrderedGroup& g = *gref;
  Thm14Report r;
  r.independent = independent;
  std::vector<ConvexSubgroup> strong;
  for (std::size_t j = 1; j <= g.rank(); ++j)
    if (is_strongly_convex(g, ConvexSubgroup{j})) strong.push_back(ConvexSubgroup{j});

  r.b = false;
  r.c = false;
  for (const auto& h : strong) {
    InitialSegment below_h = negate(FinalSegment::above_subgroup(gref, h));
    if (distance == below_h) {
      r.b = true;
      r.h = h;
    }
    if (residual == below_h) r.c = true;
  }

  auto reachable = [&](const GroupElement& vb) {
    if (seq)
      for (const auto& s : seq->steps)
        if (s.residual_value >= -vb.coords[0]) {
          ++r.d_solver_witnesses;
          return true;
        }
    return distance.reaches(Rational(-1) / p * vb);
  };
  auto holds_above = [&](ConvexSubgroup h) {
    bool all = true;
    for (const auto& vb : detail::sample_above(g, h, p)) {
      ++r.d_samples;
      if (!reachable(vb)) all = false;
    }
    return all;
  };
  // d) is read two-sided: reachable exactly for vb > H, never for 0 < vb in H.
  auto none_inside = [&](ConvexSubgroup h) {
    for (const auto& vb : detail::sample_inside(g, h, p)) {
      ++r.d_samples;
      if (reachable(vb)) return false;
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

  bool p_divisible = g.is_p_divisible(p);
  if (p_divisible) {
    r.e = scale_exact(p, distance) == distance;
    r.f = residual == distance;
  }
  if (g.rank() == 1) r.g = holds_above(g.trivial_subgroup());
  return r;
}

/// The residual cut implied by v(a - wp(K)) = p v(theta - K).
inline InitialSegment residual_cut_from_distance(unsigned p, const InitialSegment& distance) {
  return scale_boundary(Rational(static_cast<long long>(p)), distance);
}

}  // namespace defectlab
