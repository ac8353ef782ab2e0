#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "carrystate/bench.hpp"
#include "carrystate/error.hpp"

using namespace cs;

namespace {

BenchConfig small(const std::string& family) {
  BenchConfig c;
  c.family = family;
  c.n_fine = family_template(family).d == 2 ? 32 : 64;
  c.samples = 8;
  c.calib_samples = 8;
  c.T_r = 3;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(Bench, RegimeLabels) {
  EXPECT_EQ(parse_budget_ratio("tight"), 0.125);
  EXPECT_EQ(parse_budget_ratio("0.75"), 0.75);
  EXPECT_EQ(parse_retain_frac("dense"), 0.5);
  EXPECT_EQ(budget_label(0.25), "medium");
  EXPECT_EQ(retain_label(0.125), "coarse");
  EXPECT_THROW(parse_budget_ratio("loose"), Error);
}

TEST(Bench, ResolveRegimeIncompressibleTight) {
  BenchConfig c;
  const ResolvedRegime r = resolve_regime(c, family_template(Family::IncompNS));
  EXPECT_EQ(r.grid.n_fine, 128);
  EXPECT_EQ(r.grid.n_coarse, 32);
  EXPECT_EQ(r.m_primitive, 2);
  EXPECT_DOUBLE_EQ(r.budget_B, 4.0);
  EXPECT_TRUE(std::isfinite(r.dq_bound_sqrt));
  c.retain_frac = 0.3;
  EXPECT_THROW(resolve_regime(c, family_template(Family::IncompNS)), Error);
}

TEST(Bench, SeedStreamsDisjoint) {
  std::set<std::uint64_t> train, test;
  for (std::size_t i = 0; i < 1000; ++i) {
    train.insert(train_seed(7, i));
    test.insert(test_seed(7, i));
  }
  EXPECT_EQ(train.size(), 1000u);
  for (auto s : test) EXPECT_EQ(train.count(s), 0u);
}

TEST(Bench, LadderRowsInOrder) {
  const LadderResult r = run_input_stage_ladder(small("incomp_ns"));
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].label, "Primitive");
  EXPECT_EQ(r.rows[1].label, "BestSingleDerived");
  EXPECT_EQ(r.rows[2].label, "DerivBase");
  EXPECT_EQ(r.rows[3].label, "DerivOpt");
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.samples, 8u);
    EXPECT_TRUE(std::isfinite(row.fine_rel));
    EXPECT_GE(row.t_gen, 0.0);
    EXPECT_LE(row.t_gen, 1.0);
  }
  EXPECT_LE(r.rows[3].score, r.rows[2].score * (1 + 1e-12));
  EXPECT_EQ(r.fine_rel_samples.size(), 4u);
}

TEST(Bench, ThreadCountDoesNotChangeResults) {
  BenchConfig a = small("diffreact");
  BenchConfig b = a;
  b.threads = 4;
  const LadderResult ra = run_input_stage_ladder(a), rb = run_input_stage_ladder(b);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(ra.rows[i].design, rb.rows[i].design);
    EXPECT_EQ(ra.rows[i].fine_rel, rb.rows[i].fine_rel);
    EXPECT_EQ(ra.rows[i].t_gen, rb.rows[i].t_gen);
  }
}

TEST(Bench, SingleCellSweepEqualsLadder) {
  const BenchConfig c = small("advection");
  const LadderResult l = run_input_stage_ladder(c);
  const SweepResult s = sweep({"advection"}, {c.budget_ratio}, {c.retain_frac}, c);
  ASSERT_EQ(s.cells.size(), 1u);
  ASSERT_TRUE(s.cells[0].ok);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.cells[0].result.rows[i].fine_rel, l.rows[i].fine_rel);
    EXPECT_NEAR(s.pooled[i].fine_rel, l.rows[i].fine_rel, 1e-15);
  }
}

TEST(Bench, PooledMeanIsSampleWeighted) {
  BenchConfig c = small("incomp_ns");
  const SweepResult s = sweep({"incomp_ns", "rdb"}, {0.25}, {0.25}, c);
  ASSERT_EQ(s.cells.size(), 2u);
  for (int i = 0; i < 4; ++i) {
    double num = 0, den = 0;
    for (const auto& cell : s.cells) {
      ASSERT_TRUE(cell.ok) << cell.error;
      num += cell.result.rows[i].samples * cell.result.rows[i].fine_rel;
      den += cell.result.rows[i].samples;
    }
    EXPECT_NEAR(s.pooled[i].fine_rel, num / den, 1e-14);
  }
  int wins = 0;
  for (int w : s.wins) wins += w;
  EXPECT_EQ(wins, 2);
}

TEST(Bench, BadCellRecordedNotThrown) {
  BenchConfig c = small("incomp_ns");
  const SweepResult s = sweep({"incomp_ns"}, {0.25}, {0.3}, c);
  ASSERT_EQ(s.cells.size(), 1u);
  EXPECT_FALSE(s.cells[0].ok);
  EXPECT_FALSE(s.cells[0].error.empty());
}
