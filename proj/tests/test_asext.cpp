#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "defectlab/asext.hpp"

using namespace defectlab;

namespace {

ExtensionRef abhyankar(unsigned p) {
  return make_extension(p, BaseFieldSpec::perfect_hull_rational_function(p), parse_series("t^-1", p).truncated(Rational(2)));
}

error_kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return error_kind::invalid_argument;
}

}  // namespace

TEST(Solver, AbhyankarDistances) {
  for (unsigned p : {2u, 3u, 5u}) {
    ApproxSequence seq = solve_as_root(abhyankar(p));
    ASSERT_EQ(seq.steps.size(), 10u) << p;
    for (std::size_t n = 0; n < seq.steps.size(); ++n) {
      EXPECT_EQ(seq.steps[n].distance, -Rational(1) / rpow(Rational(p), static_cast<unsigned>(n + 1)));
      EXPECT_EQ(Rational(p) * seq.steps[n].distance, seq.steps[n].residual_value);
    }
    EXPECT_FALSE(seq.precision_exhausted);
  }
}

TEST(Solver, ApproximationsAreTheExpectedSums) {
  ApproxSequence seq = solve_as_root(abhyankar(3), Rational(1, 81));
  // c_N = t^-1/3 + t^-1/9 + ... + t^-1/3^N
  HahnSeries c = HahnSeries::zero(3);
  for (std::size_t n = 0; n < seq.steps.size(); ++n) {
    EXPECT_EQ(seq.steps[n].c, c);
    c = c + HahnSeries::monomial(3, -Rational(1) / rpow(Rational(3), static_cast<unsigned>(n + 1)));
  }
}

TEST(Solver, Errors) {
  auto hull = BaseFieldSpec::perfect_hull_rational_function(2);
  // a = wp(t^-1) has the root t^-1 in K.
  EXPECT_EQ(kind_of([&] { solve_as_root(make_extension(2, hull, wp(parse_series("t^-1", 2)))); }), error_kind::no_defect);
  // a of positive value: the polynomial splits over the henselization.
  EXPECT_EQ(kind_of([&] { solve_as_root(make_extension(2, hull, parse_series("t", 2))); }), error_kind::no_defect);
  // a = 1: residue field extension.
  EXPECT_EQ(kind_of([&] { solve_as_root(make_extension(2, hull, parse_series("1", 2))); }), error_kind::not_immediate);
  // t^-1 over a base with value group Z: v(a)/p = -1/2 is not a value of K.
  EXPECT_EQ(kind_of([&] { solve_as_root(make_extension(2, BaseFieldSpec::truncated_hahn(2, OrderedGroup::integers()), parse_series("t^-1", 2))); }),
            error_kind::not_immediate);
  EXPECT_EQ(kind_of([&] { solve_as_root(abhyankar(2), Rational(1, 1024), 3); }), error_kind::precision_loss);
  EXPECT_THROW(solve_as_root(abhyankar(2), Rational(0)), error);
}

TEST(Limit, AitkenOnGeometricSequences) {
  std::vector<Rational> w;
  for (unsigned n = 1; n <= 6; ++n) w.push_back(Rational(1, 2) - Rational(1) / rpow(Rational(3), n));
  LimitEstimate e = estimate_limit(w, Rational(1));
  ASSERT_EQ(e.status, CutStatus::converged);
  EXPECT_EQ(*e.limit, Rational(1, 2));
  std::vector<Rational> down(w.rbegin(), w.rend());
  EXPECT_THROW(estimate_limit(down, Rational(1)), error);
  EXPECT_EQ(kind_of([&] { estimate_limit({Rational(-1)}, Rational(0)); }), error_kind::insufficient_steps);
  // Too short for three agreeing estimates.
  EXPECT_EQ(estimate_limit({Rational(-1), Rational(-1, 2), Rational(-1, 4)}, Rational(0)).status, CutStatus::inconclusive);
}

TEST(Limit, InterleavedFamilies) {
  // two geometric families -3/2^k and -1/2^k, merged in increasing order
  std::vector<Rational> w;
  for (unsigned k = 1; k <= 8; ++k) {
    w.push_back(Rational(-3) / rpow(Rational(2), k));
    if (k < 8) w.push_back(Rational(-1) / rpow(Rational(2), k));
  }
  std::sort(w.begin(), w.end());
  LimitEstimate e = estimate_limit(w, Rational(0));
  ASSERT_EQ(e.status, CutStatus::converged);
  EXPECT_EQ(*e.limit, Rational(0));
  EXPECT_EQ(e.lower, w.back());
}

TEST(Limit, DistanceCutOfAbhyankar) {
  for (unsigned p : {2u, 3u, 5u}) {
    DistanceCut cut = distance_and_sigma(solve_as_root(abhyankar(p)));
    ASSERT_EQ(cut.status, CutStatus::converged);
    EXPECT_EQ(cut.distance->str(), "<0");
    EXPECT_EQ(cut.sigma_e->str(), ">0");
    EXPECT_LE(cut.estimate.upper - cut.estimate.lower, Rational(1) / rpow(Rational(p), 8));
    EXPECT_EQ(ramification_ideal(*cut.sigma_e).str(), ">0");
  }
}

TEST(Ramification, SampledValuesLieInSigma) {
  ApproxSequence seq = solve_as_root(abhyankar(3));
  RamificationSample s = sample_ramification_values(seq, 50, 9);
  EXPECT_EQ(s.values.size(), 50u);
  for (const auto& v : s.values) EXPECT_GT(v, 0);
  ASSERT_EQ(s.chain_values.size(), seq.steps.size());
  for (std::size_t i = 0; i < s.chain_values.size(); ++i) {
    EXPECT_EQ(s.chain_values[i], -seq.steps[i].distance);  // v(1) - v(theta - c)
    if (i) EXPECT_LT(s.chain_values[i], s.chain_values[i - 1]);
  }
  RamificationSample again = sample_ramification_values(seq, 50, 9);
  EXPECT_EQ(again.values, s.values);
}

TEST(Chain, TransitionsAndInclusions) {
  ApproxSequence seq = solve_as_root(abhyankar(2), Rational(1, 64));
  std::vector<HahnSeries> cs;
  for (const auto& st : seq.steps) cs.push_back(st.c);
  GeneratorChain chain = generator_chain(seq.ext, cs);
  EXPECT_TRUE(chain.consistent());
  ASSERT_FALSE(chain.transitions.empty());
  for (const auto& t : chain.transitions) {
    EXPECT_TRUE(t.identity_holds);
    EXPECT_TRUE(t.strict);
    EXPECT_FALSE(t.backward_integral);  // the inclusions are proper
  }
  // Duplicate c: the two generators coincide.
  GeneratorChain dup = generator_chain(seq.ext, {cs[1], cs[1]});
  ASSERT_EQ(dup.transitions.size(), 1u);
  EXPECT_TRUE(dup.transitions[0].backward_integral);
  EXPECT_TRUE(dup.consistent());
}

TEST(Chain, MinimalPolynomialOfThetaC) {
  for (unsigned p : {2u, 3u, 5u}) {
    ApproxSequence seq = solve_as_root(abhyankar(p), Rational(1) / rpow(Rational(p), 4));
    for (const auto& st : seq.steps) {
      ThetaCPolynomial g = minimal_polynomial_theta_c(seq.ext, st.c);
      EXPECT_TRUE(g.consistent()) << p << " " << st.c.str();
      EXPECT_EQ(g.derivative_value, -g.t_c.pow(p - 1));
      EXPECT_EQ(g.derivative_valuation, Rational(static_cast<long long>(p - 1)) * g.t_c.valuation().get());
    }
  }
}

TEST(ElementaryConditions, AbhyankarAllConditionsHold) {
  ApproxSequence seq = solve_as_root(abhyankar(3));
  DistanceCut cut = distance_and_sigma(seq);
  Thm14Report r = check_thm14_part1(3, *cut.distance, residual_cut_from_distance(3, *cut.distance), true, &seq);
  EXPECT_EQ(r.evaluated().size(), 6u);
  EXPECT_TRUE(r.coherent());
  EXPECT_EQ(r.h->index, 1u);
  EXPECT_GT(r.d_samples, 0u);
}

TEST(ElementaryConditions, DependentCutFailsEveryCondition) {
  auto q = make_group(OrderedGroup::rationals());
  InitialSegment d = InitialSegment::below(q, Rational(-1));
  Thm14Report r = check_thm14_part1(2, d, residual_cut_from_distance(2, d), false);
  for (const auto& [name, v] : r.evaluated()) EXPECT_FALSE(v) << name;
  EXPECT_TRUE(r.coherent());
}

TEST(ElementaryConditions, RankTwoIndependent) {
  auto g = make_group(parse_group_name("QxZ[1/3]"));
  InitialSegment d = negate(FinalSegment::above_subgroup(g, ConvexSubgroup{1}));
  Thm14Report r = check_thm14_part1(3, d, residual_cut_from_distance(3, d), true);
  EXPECT_TRUE(r.coherent());
  EXPECT_TRUE(*r.b && *r.c && *r.d && *r.e && *r.f);
  EXPECT_FALSE(r.g.has_value());
}
