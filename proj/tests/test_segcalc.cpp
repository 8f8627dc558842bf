#include <gtest/gtest.h>

#include <random>

#include "defectlab/segcalc.hpp"
#include "oracles.hpp"

using namespace defectlab;

namespace {

GroupRef group(const char* name) { return make_group(parse_group_name(name)); }

Rational random_hull(std::mt19937_64& rng) {
  return Rational(static_cast<long long>(rng() % 17) - 8, static_cast<long long>(rng() % 6) + 1);
}

/// A raw (uncanonicalised) cut: level, point in the divisible hull, closed flag.
struct RawCut {
  std::size_t level;
  std::vector<Rational> point;
  bool closed;

  bool holds(const GroupElement& x) const {
    std::vector<Rational> prefix(x.coords.begin(), x.coords.begin() + static_cast<std::ptrdiff_t>(level));
    int c = oracle::lex(prefix, point);
    return closed ? c >= 0 : c > 0;
  }
};

RawCut random_cut(std::mt19937_64& rng, std::size_t rank) {
  RawCut c{1 + rng() % rank, {}, static_cast<bool>(rng() % 2)};
  for (std::size_t i = 0; i < c.level; ++i) c.point.push_back(random_hull(rng));
  return c;
}

}  // namespace

TEST(FinalSegment, CanonicalFormPreservesMembership) {
  std::mt19937_64 rng(11);
  for (const auto& g : oracle::test_groups()) {
    auto grid = oracle::make_grid(*g);
    auto pool = oracle::product(grid.coarse);
    for (int trial = 0; trial < 60; ++trial) {
      RawCut raw = random_cut(rng, g->rank());
      FinalSegment s = FinalSegment::cut(g, raw.level, raw.point, raw.closed);
      for (const auto& x : pool) {
        ASSERT_EQ(s.contains(x), raw.holds(x)) << g->name() << " " << s.str() << " at " << x.str();
        ASSERT_EQ(oracle::member(s, x), raw.holds(x));
      }
    }
  }
}

TEST(FinalSegment, CanonicalFormIsUnique) {
  auto z = group("Z");
  EXPECT_EQ(FinalSegment::open_at(z, Rational(1)), FinalSegment::closed_at(z, Rational(2)));
  EXPECT_EQ(FinalSegment::open_at(z, Rational(3, 2)), FinalSegment::closed_at(z, Rational(2)));
  EXPECT_EQ(FinalSegment::open_at(z, Rational(1)).str(), ">=2");
  auto z2 = group("Z[1/2]");
  // 1/3 is not in Z[1/2]: the closed flag is irrelevant.
  EXPECT_EQ(FinalSegment::open_at(z2, Rational(1, 3)), FinalSegment::closed_at(z2, Rational(1, 3)));
  auto qz = group("QxZ");
  EXPECT_EQ(FinalSegment::open_at(qz, GroupElement{0, 0}).str(), ">=(0,1)");
  EXPECT_EQ(FinalSegment::above_subgroup(qz, ConvexSubgroup{1}).str(), ">H1");
  EXPECT_EQ(FinalSegment::cut(qz, 2, {Rational(1, 2), Rational(7, 3)}, false), FinalSegment::cut(qz, 2, {Rational(1, 2), Rational(3)}, true));
}

TEST(FinalSegment, LiteralsRoundTrip) {
  auto q = group("Q");
  auto qz = group("QxZ[1/2]");
  for (const char* lit : {">0", ">=1", ">1/2", "empty", "all"}) EXPECT_EQ(parse_final_segment(lit, q).str(), lit);
  for (const char* lit : {">H1", ">1/2+H1", ">=(1,0)", ">(0,1/2)", ">=(2,-1/4)"}) EXPECT_EQ(parse_final_segment(lit, qz).str(), lit);
  EXPECT_EQ(parse_initial_segment("<1/2", q).str(), "<1/2");
  EXPECT_EQ(parse_initial_segment("<=0", q).str(), "<=0");
  EXPECT_EQ(parse_initial_segment("<H1", qz).str(), "<H1");
  EXPECT_THROW(parse_final_segment("=1", q), parse_error);
}

TEST(SegmentOps, NegateShiftProperties) {
  std::mt19937_64 rng(12);
  for (const auto& g : oracle::test_groups()) {
    auto grid = oracle::make_grid(*g);
    auto pool = oracle::product(grid.coarse);
    for (int trial = 0; trial < 30; ++trial) {
      RawCut raw = random_cut(rng, g->rank());
      FinalSegment s = FinalSegment::cut(g, raw.level, raw.point, raw.closed);
      InitialSegment neg = negate(s);
      const GroupElement& gamma = pool[rng() % pool.size()];
      FinalSegment sh = shift(gamma, s);
      EXPECT_EQ(negate(neg), s);
      for (const auto& x : pool) {
        ASSERT_EQ(neg.contains(x), raw.holds(-x)) << s.str();
        ASSERT_EQ(sh.contains(x), raw.holds(x - gamma)) << s.str() << " shifted by " << gamma.str();
      }
      EXPECT_EQ(shift(-gamma, sh), s);
      EXPECT_EQ(shift(gamma, neg), negate(shift(-gamma, s)));
    }
  }
}

TEST(SegmentOps, ScaleUpMatchesPowerOracle) {
  std::mt19937_64 rng(13);
  for (const auto& g : oracle::test_groups()) {
    auto grid = oracle::make_grid(*g);
    auto coarse = oracle::product(grid.coarse);
    auto fine = oracle::product(grid.fine);
    auto segs = oracle::positive_segments(g);
    for (int trial = 0; trial < 40; ++trial) {
      const FinalSegment& s = segs[rng() % segs.size()];
      unsigned m = 2 + static_cast<unsigned>(rng() % 6);
      FinalSegment up = scale_up(m, s);
      auto lo = oracle::grid_minimum(s, fine);
      for (const auto& x : coarse) ASSERT_EQ(up.contains(x), oracle::in_power(m, x, lo)) << g->name() << " " << m << "*" << s.str() << " at " << x.str();
    }
  }
}

TEST(SegmentOps, ScaleExactNeedsDivisibility) {
  auto z = group("Z");
  EXPECT_THROW(scale_exact(2, FinalSegment::closed_at(z, Rational(1))), error);
  auto q = group("Q");
  EXPECT_EQ(scale_exact(3, FinalSegment::open_at(q, Rational(1, 3))).str(), ">1");
  EXPECT_EQ(scale_boundary(Rational(1, 2), FinalSegment::closed_at(q, Rational(1))).str(), ">=1/2");
}

TEST(SegmentOps, SumMatchesOracle) {
  std::mt19937_64 rng(14);
  for (const auto& g : oracle::test_groups()) {
    auto grid = oracle::make_grid(*g);
    auto coarse = oracle::product(grid.coarse);
    auto fine = oracle::product(grid.fine);
    auto segs = oracle::positive_segments(g);
    for (int trial = 0; trial < 20; ++trial) {
      const FinalSegment& a = segs[rng() % segs.size()];
      const FinalSegment& b = segs[rng() % segs.size()];
      FinalSegment sum = segment_sum(a, b);
      auto la = oracle::grid_minimum(a, fine), lb = oracle::grid_minimum(b, fine);
      ASSERT_TRUE(la && lb);
      GroupElement low = *la + *lb;
      for (const auto& x : coarse) ASSERT_EQ(sum.contains(x), oracle::lex(low.coords, x.coords) <= 0) << a.str() << " + " << b.str();
    }
  }
}

TEST(SegmentOps, UpwardClosure) {
  auto q = group("Q");
  EXPECT_EQ(upward_closure(q, {GroupElement{1}, GroupElement{Rational(1, 2)}, GroupElement{5}}).str(), ">=1/2");
  EXPECT_TRUE(upward_closure(q, {}).is_empty());
}

TEST(LemmaSd, Examples) {
  auto q = group("Q");
  auto v = lemma_sd_classify(parse_final_segment(">0", q), 2);
  ASSERT_TRUE(v.matches);
  EXPECT_EQ(q->subgroup_name(*v.delta), "{0}");
  EXPECT_FALSE(lemma_sd_classify(parse_final_segment(">=1", q), 2).matches);
  EXPECT_FALSE(lemma_sd_classify(parse_final_segment(">0", group("Z")), 3).matches);
  auto qz = group("QxZ");
  auto w = lemma_sd_classify(parse_final_segment(">H1", qz), 5);
  ASSERT_TRUE(w.matches);
  EXPECT_EQ(w.delta->index, 1u);
  EXPECT_FALSE(lemma_sd_classify(parse_final_segment(">=(0,1)", qz), 2).matches);
  EXPECT_THROW(lemma_sd_classify(parse_final_segment(">=0", q), 2), error);
  EXPECT_THROW(lemma_sd_classify(parse_final_segment(">0", q), 1), error);
}

TEST(LemmaSd, AgreesWithQuantifierOracleOnRankOne) {
  for (const char* name : {"Z", "Z[1/2]", "Q"}) {
    auto g = group(name);
    auto grid = oracle::make_grid(*g);
    auto coarse = oracle::product(grid.coarse);
    auto fine = oracle::product(grid.fine);
    for (const auto& s : oracle::positive_segments(g)) {
      auto lo = oracle::grid_minimum(s, fine);
      for (unsigned m = 2; m <= 7; ++m) ASSERT_EQ(lemma_sd_classify(s, m).matches, oracle::sd_quantifier(s, m, coarse, lo)) << name << " " << s.str() << " m=" << m;
    }
  }
}

TEST(Ideals, PrimeAndIdempotent) {
  auto qz = group("QxZ");
  IdealDesc m = IdealDesc::maximal(qz);
  EXPECT_EQ(is_prime(m)->index, 2u);
  EXPECT_FALSE(is_idempotent(m, 2));  // (0,1) is the smallest positive element
  IdealDesc h1(parse_final_segment(">H1", qz));
  EXPECT_EQ(is_prime(h1)->index, 1u);
  EXPECT_TRUE(is_idempotent(h1, 3));
  EXPECT_FALSE(is_prime(IdealDesc(parse_final_segment(">1/2+H1", qz))));
  EXPECT_EQ(ideal_power(IdealDesc(parse_final_segment(">=1/2", group("Q"))), 3).str(), ">=3/2");
  EXPECT_EQ(ideal_product(h1, IdealDesc(parse_final_segment(">=(1,0)", qz))).str(), ">1+H1");
  try {
    IdealDesc bad(parse_final_segment(">=(0,0)", qz));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::unit_ideal);
  }
}
