#pragma once

// The full analysis of a degree-p Artin-Schreier defect extension (or of an injected
// ramification jump): verdict, equivalences, elementary conditions and samples.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defectlab/asext.hpp"
#include "defectlab/kahler.hpp"
#include "defectlab/segcalc.hpp"
#include "defectlab/trace.hpp"

namespace defectlab {

struct RunConfig {
  std::optional<Rational> precision;  // target for v(theta - c); default p^-10
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  std::size_t trace_samples = 100;
  std::size_t trace_witnesses = 20;
  std::size_t chain_length = 6;
};

enum class Verdict { independent, dependent, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::independent: return "independent";
    case Verdict::dependent: return "dependent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

/// The five characterisations of independent defect, each computed on its own path.
struct Equivalences {
  bool lemma_sd = false;     // a) Sigma_E = (p Sigma_E) upward closed
  bool prime_shape = false;  // b) I_E = M_{v_H}, H strongly convex
  bool idempotent = false;   // c) I_E^p = I_E
  bool omega_zero = false;   // d) U = UV
  bool trace_shape = false;  // e) Tr(M_L) = M_{v_H} n K, H strongly convex

  bool coherent() const {
    return prime_shape == lemma_sd && idempotent == lemma_sd && omega_zero == lemma_sd && trace_shape == lemma_sd;
  }
};

struct DefectReport {
  std::string kind;  // "field" or "synthetic"
  unsigned p = 2;
  GroupRef group;
  Verdict verdict = Verdict::inconclusive;
  std::optional<ConvexSubgroup> h_e;
  std::optional<FinalSegment> sigma_e;
  std::optional<InitialSegment> distance;
  std::optional<IdealDesc> ideal;
  std::optional<PresentedModule> omega;
  std::optional<IdealDesc> trace_ideal;
  std::optional<Thm14Report> thm14;
  Equivalences equivalences;

  // field-level data
  std::optional<ASExtensionSpec> spec;
  std::optional<ApproxSequence> solver;
  std::optional<DistanceCut> cut;
  std::optional<RamificationSample> ramification;
  std::size_t ramification_in_sigma = 0;
  bool chain_values_monotone = true;
  std::optional<TraceReport> trace;
  std::optional<FiniteChainReport> chain;

  std::vector<std::string> notes;

  bool coherent() const {
    if (verdict == Verdict::inconclusive) return true;
    bool ok = equivalences.coherent() && (!thm14 || thm14->coherent());
    ok = ok && ((verdict == Verdict::independent) == equivalences.lemma_sd);
    if (ramification) ok = ok && ramification_in_sigma == ramification->values.size() && chain_values_monotone;
    if (trace) ok = ok && trace->passed == trace->tested && trace->witnesses_ok() == trace->witnesses.size();
    if (chain) ok = ok && chain->ok();
    return ok;
  }
};

inline Equivalences compute_equivalences(const FinalSegment& sigma_e, unsigned p, std::optional<ConvexSubgroup>* h_out = nullptr) {
  Equivalences eq;
  const OrderedGroup& g = sigma_e.group();
  LemmaSdVerdict sd = lemma_sd_classify(sigma_e, p);
  eq.lemma_sd = sd.matches;
  if (h_out) *h_out = sd.delta;
  IdealDesc ie = ramification_ideal(sigma_e);
  auto h = is_prime(ie);
  eq.prime_shape = h && h->index >= 1 && is_strongly_convex(g, *h);
  eq.idempotent = is_idempotent(ie, p);
  eq.omega_zero = is_zero(omega_presentation(ie, p));
  auto ht = complement_subgroup(trace_ideal(sigma_e, p).segment());
  eq.trace_shape = ht && ht->index >= 1 && is_strongly_convex(g, *ht);
  return eq;
}

namespace detail {

inline void fill_segment_data(DefectReport& r, const FinalSegment& sigma_e) {
  r.sigma_e = sigma_e;
  r.ideal = ramification_ideal(sigma_e);
  r.equivalences = compute_equivalences(sigma_e, r.p, &r.h_e);
  r.verdict = r.equivalences.lemma_sd ? Verdict::independent : Verdict::dependent;
  r.omega = omega_presentation(*r.ideal, r.p);
  r.trace_ideal = trace_ideal(sigma_e, r.p);
}

}  // namespace detail

/// Analysis of an injected ramification jump Sigma_E (no field-level data).
inline DefectReport classify_synthetic(unsigned p, const FinalSegment& sigma_e) {
  if (!is_prime_number(p)) throw error(error_kind::invalid_argument, std::to_string(p) + " is not prime");
  DefectReport r;
  r.kind = "synthetic";
  r.p = p;
  r.group = sigma_e.group_ref();
  detail::fill_segment_data(r, sigma_e);
  r.distance = negate(sigma_e);
  r.thm14 = check_thm14_part1(p, *r.distance, residual_cut_from_distance(p, *r.distance), r.verdict == Verdict::independent);
  return r;
}

/// Full pipeline for X^p - X = a over a supported base field.
inline DefectReport classify_extension(const ExtensionRef& ext, const RunConfig& cfg) {
  const unsigned p = ext->p;
  DefectReport r;
  r.kind = "field";
  r.p = p;
  r.group = value_group_of(*ext);
  r.spec = *ext;
  Rational target = cfg.precision ? *cfg.precision : default_target(p);
  r.solver = solve_as_root(ext, target);
  if (r.solver->precision_exhausted) r.notes.push_back("series precision exhausted before the target was reached");
  r.cut = distance_and_sigma(*r.solver);
  if (r.cut->status != CutStatus::converged) {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("distance cut not resolved; boundary in [" + to_string(r.cut->estimate.lower) + ", " + to_string(r.cut->estimate.upper) + "]");
    return r;
  }
  r.distance = *r.cut->distance;
  detail::fill_segment_data(r, *r.cut->sigma_e);

  // v(a - wp(K)) from the residual values on their own.
  LimitEstimate res = estimate_limit(r.solver->residual_values(), Rational(0));
  InitialSegment residual = res.status == CutStatus::converged ? InitialSegment::below(r.group, *res.limit)
                                                               : residual_cut_from_distance(p, *r.distance);
  if (res.status != CutStatus::converged) r.notes.push_back("residual values did not converge; residual cut taken as p * distance");
  r.thm14 = check_thm14_part1(p, *r.distance, residual, r.verdict == Verdict::independent, &*r.solver);

  r.ramification = sample_ramification_values(*r.solver, cfg.samples, cfg.seed);
  for (const auto& v : r.ramification->values) r.ramification_in_sigma += r.sigma_e->contains(GroupElement{v});
  const auto& cv = r.ramification->chain_values;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    if (!r.sigma_e->contains(GroupElement{cv[i]})) r.chain_values_monotone = false;
    if (i > 0 && !(cv[i] < cv[i - 1])) r.chain_values_monotone = false;
  }

  r.trace = verify_trace_theorem(*r.solver, *r.sigma_e, cfg.trace_samples, cfg.trace_witnesses, cfg.seed + 1);

  std::vector<HahnSeries> cs;
  for (std::size_t i = 0; i < r.solver->steps.size() && i < cfg.chain_length; ++i) cs.push_back(r.solver->steps[i].c);
  r.chain = finite_chain_presentation_check(ext, cs);
  return r;
}

}  // namespace defectlab
