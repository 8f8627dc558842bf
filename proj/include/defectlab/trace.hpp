#pragma once

// Traces on Artin-Schreier extensions and the sample-scale check of
// Tr(M_L) = (b in K : vb in (p-1) Sigma_E).

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <random>
#include <set>
#include <vector>

#include "defectlab/asext.hpp"
#include "defectlab/errors.hpp"
#include "defectlab/extension.hpp"
#include "defectlab/hahn.hpp"
#include "defectlab/rational.hpp"
#include "defectlab/segcalc.hpp"

namespace defectlab {

/// Tr(sum b_i theta^i) = p b_0 - b_(p-1) = -b_(p-1).
inline HahnSeries trace_element(const ExtensionElement& x) { return -x.coeff(x.p() - 1); }

/// Trace of the K-linear map y -> x y on the basis 1, theta, ..., theta^(p-1).
inline HahnSeries trace_by_matrix(const ExtensionElement& x) {
  const unsigned p = x.p();
  HahnSeries tr = HahnSeries::zero(p);
  ExtensionElement basis = ExtensionElement::from_base(x.extension(), HahnSeries::constant(p, 1));
  ExtensionElement th = ExtensionElement::theta(x.extension());
  for (unsigned i = 0; i < p; ++i) {
    tr += (x * basis).coeff(i);
    basis = basis * th;
  }
  return tr;
}

/// sum over k of sigma^k x, which must land in K.
inline HahnSeries trace_by_conjugates(const ExtensionElement& x) {
  ExtensionElement s = x;
  for (unsigned k = 1; k < x.p(); ++k) s = s + x.sigma(k);
  if (!s.in_base_field()) throw error(error_kind::invalid_argument, "sum of conjugates is not in the base field");
  return s.coeff(0);
}

/// Tr(M_L) = I_E^(p-1) n K, segment (p-1) Sigma_E upward closed.
inline IdealDesc trace_ideal(const FinalSegment& sigma_e, unsigned p) { return IdealDesc(scale_up(p - 1, sigma_e)); }

struct TraceWitness {
  Rational target;
  HahnSeries b;
  HahnSeries c;
  HahnSeries trace;
  bool ok = false;
};

struct TraceReport {
  std::size_t attempts = 0;
  std::size_t tested = 0;   // sampled elements of M_L
  std::size_t passed = 0;   // v(Tr m) in the trace segment (Tr m = 0 included)
  std::size_t skipped = 0;  // unresolved valuation or outside M_L
  std::vector<TraceWitness> witnesses;

  std::size_t witnesses_ok() const {
    std::size_t n = 0;
    for (const auto& w : witnesses) n += w.ok;
    return n;
  }
};

namespace detail {

/// Random element with coefficients biased toward positive exponents.
inline ExtensionElement random_integral_candidate(const ExtensionRef& ext, std::mt19937_64& rng) {
  const unsigned p = ext->p;
  std::vector<HahnSeries> coeffs;
  Rational den(static_cast<long long>(p) * p * p);
  for (unsigned i = 0; i < p; ++i) {
    if (rng() % 4 == 0) {
      coeffs.push_back(HahnSeries::zero(p));
      continue;
    }
    long long span = 3LL * p * p * p;
    long long n = static_cast<long long>(rng() % static_cast<std::uint64_t>(span + 1));
    unsigned k = 1 + static_cast<unsigned>(rng() % (p - 1));
    coeffs.push_back(HahnSeries::monomial(p, Rational(n) / den, k));
  }
  return ExtensionElement(ext, std::move(coeffs));
}

}  // namespace detail

/// (i) for n sampled m in M_L, v(Tr m) lies in the trace segment; (ii) for `witnesses`
/// targets beta in that segment, Tr(b (theta - c)^(p-1)) = -b with vb = beta.
inline TraceReport verify_trace_theorem(const ApproxSequence& seq, const FinalSegment& sigma_e, std::size_t n, std::size_t witnesses,
                                        std::uint64_t seed) {
  const ExtensionRef& ext = seq.ext;
  const unsigned p = ext->p;
  FinalSegment seg = trace_ideal(sigma_e, p).segment();
  auto pts = seq.points();
  TraceReport out;
  std::mt19937_64 rng(seed);
  while (out.tested < n && out.attempts < 20 * n) {
    ++out.attempts;
    ExtensionElement m = detail::random_integral_candidate(ext, rng);
    if (m.is_exact_zero()) continue;
    std::optional<Rational> vm;
    try {
      vm = element_valuation(m, pts);
    } catch (const error& e) {
      if (e.kind() != error_kind::valuation_unresolved && e.kind() != error_kind::precision_loss) throw;
      ++out.skipped;
      continue;
    }
    if (!vm || *vm <= 0) {
      ++out.skipped;
      continue;
    }
    ++out.tested;
    HahnSeries tr = trace_element(m);
    SeriesValuation v = tr.valuation();
    if (v.kind == SeriesValuation::Kind::infinite || (v.is_value() && seg.contains(GroupElement{v.get()}))) ++out.passed;
  }

  // Targets: the smallest grid values of the segment reachable with the available steps.
  std::set<Rational> grid;
  Rational base = seg.is_whole() || seg.is_empty() ? Rational(0) : seg.point()[0];
  Rational reach = seq.steps.empty() ? Rational(0) : Rational(static_cast<long long>(p - 1)) * -seq.steps.back().distance;
  OrderedGroup vk = ext->base.value_group();
  for (int e = 0; e <= 14; ++e)
    for (long long k = 1; k <= 3LL * p; ++k) {
      Rational beta = base + Rational(k) / rpow(Rational(p), e);
      if (beta > reach && seg.contains(GroupElement{beta}) && vk.contains(GroupElement{beta})) grid.insert(beta);
    }
  std::vector<Rational> targets(grid.begin(), grid.end());
  if (targets.size() > witnesses) targets.resize(witnesses);
  ExtensionElement th = ExtensionElement::theta(ext);
  std::map<const ApproxStep*, std::pair<ExtensionElement, std::optional<Rational>>> powers;
  for (const auto& beta : targets) {
    TraceWitness w{beta, HahnSeries::monomial(p, beta), HahnSeries::zero(p), HahnSeries::zero(p)};
    // need (p-1)(-v(theta - c)) < beta so that b (theta - c)^(p-1) lies in M_L
    const ApproxStep* pick = nullptr;
    for (const auto& s : seq.steps)
      if (Rational(static_cast<long long>(p - 1)) * -s.distance < beta) {
        pick = &s;
        break;
      }
    if (pick) {
      w.c = pick->c;
      auto it = powers.find(pick);
      if (it == powers.end()) {
        ExtensionElement lin = th - ExtensionElement::from_base(ext, w.c);
        it = powers.emplace(pick, std::make_pair(lin.pow(p - 1), element_valuation(lin, pts))).first;
      }
      ExtensionElement x = w.b * it->second.first;
      w.trace = trace_element(x);
      const auto& vlin = it->second.second;
      bool in_m = vlin && beta + Rational(static_cast<long long>(p - 1)) * *vlin > 0;
      w.ok = in_m && w.trace == -w.b && w.trace.valuation().get() == beta;
    }
    out.witnesses.push_back(std::move(w));
  }
  return out;
}

}  // namespace defectlab
