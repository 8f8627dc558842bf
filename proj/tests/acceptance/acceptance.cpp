// Acceptance run: one PASS/FAIL line per criterion. All comparisons are exact rationals;
// the only numeric thresholds are the sample counts and the bracket width p^-8.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "defectlab/classify.hpp"
#include "defectlab/io.hpp"
#include "oracles.hpp"

using namespace defectlab;

namespace {

constexpr std::size_t kRamificationSamples = 200;
constexpr std::size_t kTraceSamples = 100;
constexpr std::size_t kTraceWitnesses = 20;
constexpr std::size_t kResidualSteps = 50;
constexpr std::size_t kPowerChecks = 1000;
constexpr std::size_t kSyntheticCuts = 20;
constexpr std::size_t kKummerCuts = 10;
constexpr unsigned kBracketExponent = 8;

const unsigned kPrimes[] = {2, 3, 5};

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  Outcome& out;
  void require(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

std::string spec_path(const std::string& stem) { return std::string(DEFECTLAB_DATA_DIR) + "/" + stem + ".json"; }

ExtensionRef bundled_extension(unsigned p) {
  return std::get<FieldSpec>(parse_spec(read_json_file(spec_path("abhyankar_p" + std::to_string(p))))).ext;
}

Rational inv_pow(unsigned p, unsigned n) { return Rational(1) / rpow(Rational(p), n); }

// 1. Abhyankar pipeline
Outcome abhyankar_pipeline() {
  Outcome o;
  Check c{o};
  for (unsigned p : kPrimes) {
    auto ext = bundled_extension(p);
    DefectReport r = classify_extension(ext, RunConfig{});
    const auto& steps = r.solver->steps;
    c.require(steps.size() == 10, "p=" + std::to_string(p) + ": expected 10 steps to reach p^-10");
    for (std::size_t n = 0; n < steps.size(); ++n)
      c.require(steps[n].distance == -inv_pow(p, static_cast<unsigned>(n + 1)), "p=" + std::to_string(p) + ": v(theta - c_" + std::to_string(n) + ") = " + to_string(steps[n].distance));
    c.require(r.sigma_e && *r.sigma_e == FinalSegment::open_at(r.group, Rational(0)), "Sigma_E is not OpenAt(0)");
    c.require(r.verdict == Verdict::independent, "verdict not independent");
    c.require(r.h_e && *r.h_e == r.group->trivial_subgroup(), "H_E is not {0}");
    c.require(r.equivalences.omega_zero && r.omega && is_zero(*r.omega), "Omega is not zero");
    c.require(r.trace_ideal && *r.trace_ideal == IdealDesc::maximal(r.group), "trace ideal is not M_K");
    c.require(r.coherent(), "report incoherent for p=" + std::to_string(p));
  }
  if (o.pass) o.detail = "p=2,3,5: v(theta-c_N) = -p^-(N+1) for N<10, Sigma_E=>0, H={0}, Omega=0, Tr=M_K";
  return o;
}

// 2. Residual law, recomputed from the approximations alone
Outcome residual_law() {
  Outcome o;
  Check c{o};
  std::size_t total = 0;
  const std::pair<unsigned, unsigned> targets[] = {{2, 30}, {3, 15}, {5, 10}};
  for (auto [p, e] : targets) {
    auto ext = bundled_extension(p);
    ApproxSequence seq = solve_as_root(ext, inv_pow(p, e));
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
      const ApproxStep& s = seq.steps[i];
      Rational direct = (ext->a - wp(s.c)).valuation().get();
      c.require(Rational(p) * s.distance == direct, "p=" + std::to_string(p) + " step " + std::to_string(i));
      c.require(s.distance == -inv_pow(p, static_cast<unsigned>(i + 1)), "distance off closed form");
      ++total;
    }
  }
  c.require(total >= kResidualSteps, "only " + std::to_string(total) + " steps");
  if (o.pass) o.detail = std::to_string(total) + " steps, p v(theta-c_i) = v(a - wp(c_i)) exactly";
  return o;
}

// 3. Lemma SD against the quantifier oracle
Outcome lemma_sd_oracle() {
  Outcome o;
  Check c{o};
  std::size_t segments = 0, comparisons = 0;
  for (const auto& g : oracle::test_groups()) {
    auto grid = oracle::make_grid(*g);
    auto coarse = oracle::product(grid.coarse);
    auto fine = oracle::product(grid.fine);
    for (const auto& s : oracle::positive_segments(g)) {
      ++segments;
      auto lo = oracle::grid_minimum(s, fine);
      bool first = lemma_sd_classify(s, 2).matches;
      for (unsigned m = 2; m <= 7; ++m) {
        bool lib = lemma_sd_classify(s, m).matches;
        c.require(lib == first, g->name() + " " + s.str() + ": verdict depends on m");
        c.require(lib == oracle::sd_quantifier(s, m, coarse, lo), g->name() + " " + s.str() + " m=" + std::to_string(m) + ": oracle disagrees");
        ++comparisons;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(segments) + " segments over 6 groups, " + std::to_string(comparisons) + " comparisons, 100% agreement";
  return o;
}

// 4. Ideal power law against products of values
Outcome power_law() {
  Outcome o;
  Check c{o};
  std::mt19937_64 rng(4);
  std::size_t min_checks = SIZE_MAX;
  for (const auto& g : oracle::test_groups()) {
    auto grid = oracle::make_grid(*g);
    auto coarse = oracle::product(grid.coarse);
    auto fine = oracle::product(grid.fine);
    auto segs = oracle::positive_segments(g);
    std::vector<std::optional<GroupElement>> lows;
    std::vector<std::vector<GroupElement>> mems;
    for (const auto& s : segs) {
      lows.push_back(oracle::grid_minimum(s, fine));
      mems.push_back(oracle::members(s, fine));
    }
    std::size_t checks = 0;
    while (checks < kPowerChecks) {
      std::size_t k = rng() % segs.size();
      unsigned m = 2 + static_cast<unsigned>(rng() % 6);
      IdealDesc pw = ideal_power(IdealDesc(segs[k]), m);
      // gamma in I^m iff some product of m generators has value <= gamma
      const GroupElement& gamma = coarse[rng() % coarse.size()];
      c.require(pw.contains_value(gamma) == oracle::in_power(m, gamma, lows[k]), g->name() + " (" + segs[k].str() + ")^" + std::to_string(m) + " at " + gamma.str());
      // the value of a product a_1...a_m is the sum of the values
      GroupElement sum = g->zero();
      for (unsigned i = 0; i < m; ++i) sum = sum + mems[k][rng() % mems[k].size()];
      c.require(pw.contains_value(sum), g->name() + ": product value " + sum.str() + " outside I^" + std::to_string(m));
      checks += 2;
    }
    min_checks = std::min(min_checks, checks);
  }
  if (o.pass) o.detail = ">= " + std::to_string(min_checks) + " checks per group, zero failures";
  return o;
}

// 5. Equivalence ledger
Outcome equivalence_ledger() {
  Outcome o;
  Check c{o};
  std::size_t bundled = 0, inconclusive = 0, synthetic = 0, indep = 0, dep = 0;
  for (const auto& e : std::filesystem::directory_iterator(DEFECTLAB_DATA_DIR)) {
    if (e.path().extension() != ".json") continue;
    AnySpec spec = parse_spec(read_json_file(e.path().string()));
    std::optional<DefectReport> r;
    if (auto* f = std::get_if<FieldSpec>(&spec)) {
      RunConfig cfg;
      cfg.samples = 20;
      cfg.trace_samples = 10;
      cfg.trace_witnesses = 5;
      r = classify_extension(f->ext, cfg);
    } else if (auto* s = std::get_if<SyntheticSpec>(&spec)) {
      r = classify_synthetic(s->p, s->sigma_e);
    } else {
      continue;
    }
    ++bundled;
    if (r->verdict == Verdict::inconclusive) {
      ++inconclusive;
      continue;
    }
    c.require(r->equivalences.coherent(), e.path().stem().string() + ": equivalences disagree");
  }
  const char* groups[] = {"Q", "Z[1/2]", "Z[1/3]", "QxZ", "QxZ[1/2]", "QxQ", "Z[1/2]xZ[1/2]", "ZxQ"};
  std::mt19937_64 rng(5);
  for (const char* name : groups) {
    auto g = make_group(parse_group_name(name));
    auto segs = oracle::positive_segments(g);
    for (int i = 0; i < 6; ++i) {
      const FinalSegment& s = i < 2 ? FinalSegment::above_subgroup(g, ConvexSubgroup{1 + static_cast<std::size_t>(i) % g->rank()}) : segs[rng() % segs.size()];
      unsigned p = kPrimes[rng() % 3];
      Equivalences eq = compute_equivalences(s, p);
      ++synthetic;
      (eq.lemma_sd ? indep : dep) += 1;
      c.require(eq.coherent(), std::string(name) + " " + s.str() + " p=" + std::to_string(p) + ": equivalences disagree");
    }
  }
  c.require(synthetic >= kSyntheticCuts, "too few synthetic cuts");
  c.require(indep > 0 && dep > 0, "synthetic cuts cover only one shape");
  if (o.pass)
    o.detail = std::to_string(bundled - inconclusive) + " bundled (" + std::to_string(inconclusive) + " inconclusive skipped) + " + std::to_string(synthetic) +
               " synthetic cuts (" + std::to_string(indep) + " independent, " + std::to_string(dep) + " dependent), zero disagreements";
  return o;
}

// 6. Trace suite
Outcome trace_suite() {
  Outcome o;
  Check c{o};
  std::size_t tested = 0, witnesses = 0;
  for (unsigned p : kPrimes) {
    auto ext = bundled_extension(p);
    ExtensionElement th = ExtensionElement::theta(ext);
    ExtensionElement x = ExtensionElement::from_base(ext, HahnSeries::constant(p, 1));
    for (unsigned i = 0; i < p; ++i) {
      HahnSeries want = i == p - 1 ? HahnSeries::constant(p, -1) : HahnSeries::zero(p);
      c.require(trace_element(x) == want && trace_by_matrix(x) == want && trace_by_conjugates(x) == want,
                "Tr(theta^" + std::to_string(i) + ") wrong for p=" + std::to_string(p));
      x = x * th;
    }
    ApproxSequence seq = solve_as_root(ext);
    DistanceCut cut = distance_and_sigma(seq);
    TraceReport r = verify_trace_theorem(seq, *cut.sigma_e, kTraceSamples, kTraceWitnesses, 2);
    c.require(r.tested >= kTraceSamples, "p=" + std::to_string(p) + ": only " + std::to_string(r.tested) + " elements of M_L tested");
    c.require(r.passed == r.tested, "p=" + std::to_string(p) + ": v(Tr m) outside (p-1)Sigma_E");
    c.require(r.witnesses_ok() >= kTraceWitnesses, "p=" + std::to_string(p) + ": " + std::to_string(r.witnesses_ok()) + " witnesses");
    tested += r.tested;
    witnesses += r.witnesses_ok();
  }
  if (o.pass) o.detail = "trace tables exact; " + std::to_string(tested) + " elements of M_L in (p-1)Sigma_E; " + std::to_string(witnesses) + " surjectivity witnesses";
  return o;
}

// 7. Derivative values, evaluated here term by term
Outcome derivative_values() {
  Outcome o;
  Check c{o};
  std::size_t count = 0;
  for (unsigned p : kPrimes) {
    auto ext = bundled_extension(p);
    ApproxSequence seq = solve_as_root(ext);
    for (const auto& s : seq.steps) {
      ThetaCPolynomial g = minimal_polynomial_theta_c(ext, s.c);
      HahnSeries tc = t_gamma(p, s.distance);
      ExtensionElement thc = tc * (ExtensionElement::theta(ext) - ExtensionElement::from_base(ext, s.c));
      // g_c(X) = X^p - t^(p-1) X - t^p (a - wp(c));  g_c'(X) = p X^(p-1) - t^(p-1) = -t^(p-1)
      HahnSeries tpm1 = tc.pow(p - 1);
      ExtensionElement gval = thc.pow(p) - tpm1 * thc - ExtensionElement::from_base(ext, tc.pow(p) * (ext->a - wp(s.c)));
      ExtensionElement dval = HahnSeries::constant(p, static_cast<long long>(p)) * thc.pow(p - 1) - ExtensionElement::from_base(ext, tpm1);
      c.require(gval.is_zero_within_precision(), "g_c(theta_c) != 0");
      c.require(dval.in_base_field() && dval.coeff(0) == -tpm1, "hand-evaluated derivative differs");
      c.require(g.consistent() && g.derivative_value == -tpm1, "library derivative value differs");
      c.require(g.derivative_valuation == Rational(static_cast<long long>(p - 1)) * tc.valuation().get(), "v(g_c'(theta_c)) != (p-1) v t_c");
      ++count;
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " chain elements: g_c'(theta_c) = -t_c^(p-1), v = (p-1) v t_c";
  return o;
}

// 8. Ramification sampling
Outcome ramification_sampling() {
  Outcome o;
  Check c{o};
  std::size_t values = 0;
  for (unsigned p : kPrimes) {
    ApproxSequence seq = solve_as_root(bundled_extension(p));
    DistanceCut cut = distance_and_sigma(seq);
    c.require(cut.status == CutStatus::converged, "cut not converged");
    if (!cut.sigma_e) continue;
    RamificationSample s = sample_ramification_values(seq, kRamificationSamples, 1);
    c.require(s.values.size() >= kRamificationSamples, "p=" + std::to_string(p) + ": " + std::to_string(s.values.size()) + " values");
    for (const auto& v : s.values) c.require(cut.sigma_e->contains(GroupElement{v}), "sampled value " + to_string(v) + " outside Sigma_E");
    for (std::size_t i = 0; i < s.chain_values.size(); ++i) {
      c.require(cut.sigma_e->contains(GroupElement{s.chain_values[i]}), "chain value outside Sigma_E");
      if (i) c.require(s.chain_values[i] < s.chain_values[i - 1], "chain values not decreasing");
    }
    c.require(cut.bracket_width() <= inv_pow(p, kBracketExponent), "p=" + std::to_string(p) + ": bracket width " + to_string(cut.bracket_width()));
    values += s.values.size();
  }
  if (o.pass) o.detail = std::to_string(values) + " values in Sigma_E, chain monotone towards 0, bracket width <= p^-8";
  return o;
}

// 9. Kummer value calculus
Outcome kummer_calculus() {
  Outcome o;
  Check c{o};
  for (unsigned p : kPrimes)
    for (long long k : {1LL, 2LL, static_cast<long long>(p - 1)}) {
      GroupElement vp{Rational(k)};
      // v(1 - zeta_p) = vp/(p-1): the p-1 conjugates of 1 - zeta_p multiply to p.
      GroupElement v1z = Rational(1, static_cast<long long>(p - 1)) * vp;
      c.require(chi_value(p, vp) == -v1z, "chi_value wrong for p=" + std::to_string(p));
    }
  auto q = make_group(OrderedGroup::rationals());
  auto r2 = make_group(parse_group_name("QxZ[1/3]"));
  auto rz = make_group(parse_group_name("QxZ"));
  struct Case {
    unsigned p;
    GroupRef g;
    const char* vp;
    const char* distance;
    bool independent;
    bool vp_in_h;
  };
  const Case cases[] = {
      {2, q, "1", "<1", true, false},         {3, q, "1", "<1/2", true, false},
      {5, q, "1", "<1/4", true, false},       {2, q, "1", "<1/2", false, false},
      {3, q, "1", "<1/3", false, false},      {3, q, "2", "<=1/2", false, false},
      {5, q, "4", "<-1", false, false},       {3, r2, "(1,0)", "<1/2+H1", true, false},
      {3, r2, "(1,0)", "<(1/2,-1)", false, false}, {3, r2, "(0,1)", "<H1", true, true},
      {2, rz, "(0,1)", "<H1", true, true},    {2, rz, "(2,0)", "<=(1,0)", false, false},
  };
  std::size_t n = 0, flagged = 0;
  for (const auto& k : cases) {
    std::string tag = k.g->name() + " p=" + std::to_string(k.p) + " vp=" + k.vp + " D=" + k.distance;
    KummerValueData d(k.p, k.g, parse_element(k.vp, *k.g), parse_initial_segment(k.distance, k.g));
    KummerReport r = check_thm14_part2(d);
    c.require(r.sigma_e == sigma_e_kummer_via_negation(d), tag + ": Sigma_E differs between the two constructions");
    c.require(r.conditions.coherent(), tag + ": condition table incoherent");
    c.require(r.independent == k.independent, tag + ": verdict");
    c.require(r.vp_in_h_e == k.vp_in_h, tag + ": vp in H_E flag");
    flagged += r.vp_in_h_e;
    ++n;
  }
  c.require(n >= kKummerCuts, "too few distance cuts");
  c.require(flagged > 0, "rank-2 vp in H case missing");
  if (o.pass) o.detail = "chi exact for p=2,3,5; " + std::to_string(n) + " distance cuts coherent, " + std::to_string(flagged) + " rank-2 vp in H_E cases flagged";
  return o;
}

// 10. Determinism of the CLI
std::string run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + DEFECTLAB_CLI + "\" " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  return out;
}

Outcome determinism() {
  Outcome o;
  Check c{o};
  std::size_t runs = 0;
  for (const char* stem : {"abhyankar_p3", "synthetic_rank2_independent", "kummer_p3_independent"}) {
    std::string args = "--seed 17 --format json classify \"" + spec_path(stem) + "\"";
    std::string a = run_cli(args), b = run_cli(args);
    c.require(!a.empty() && a == b, std::string(stem) + ": reports differ");
    runs += 2;
  }
  std::string t1 = run_cli("--seed 3 examples run abhyankar_p2"), t2 = run_cli("--seed 3 examples run abhyankar_p2");
  c.require(t1 == t2, "text reports differ");
  runs += 2;
  if (o.pass) o.detail = std::to_string(runs) + " runs, byte-identical pairs";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"abhyankar pipeline", abhyankar_pipeline}, {"residual law", residual_law},
      {"lemma SD oracle", lemma_sd_oracle},       {"ideal power law", power_law},
      {"equivalence ledger", equivalence_ledger}, {"trace suite", trace_suite},
      {"derivative values", derivative_values},   {"ramification sampling", ramification_sampling},
      {"kummer value calculus", kummer_calculus}, {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& cr : criteria) {
    ++index;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << cr.name << " (" << secs << " s): " << o.detail;
    std::cout << line.str() << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
