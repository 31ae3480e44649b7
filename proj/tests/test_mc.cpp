#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "plaque/mc.hpp"

namespace plaque {
namespace {

constexpr std::uint64_t kSeed = 1234;

TEST(Planner, KnownValues) {
  const auto tight = plan_iterations(0.001, 0.001);
  EXPECT_GE(tight.iterations, 15'200'000u);
  EXPECT_LE(tight.iterations, 15'300'000u);
  const auto mid = plan_iterations(0.01, 0.001);
  EXPECT_GE(mid.iterations, 152'000u);
  EXPECT_LE(mid.iterations, 153'000u);
  EXPECT_EQ(plan_iterations(0.5, 0.5).iterations, 12u);
  EXPECT_EQ(plan_iterations(0.01, 0.01).iterations, 105'967u);
  EXPECT_TRUE(mid.from_bound);
  EXPECT_FALSE(McPlan::fixed(10).from_bound);
}

TEST(Planner, Monotone) {
  const double eps[] = {0.2, 0.1, 0.05, 0.01};
  for (std::size_t i = 1; i < std::size(eps); ++i) {
    EXPECT_GT(plan_iterations(eps[i], 0.05).iterations, plan_iterations(eps[i - 1], 0.05).iterations);
    EXPECT_GT(plan_iterations(0.05, eps[i]).iterations, plan_iterations(0.05, eps[i - 1]).iterations);
  }
  const double ratio = double(plan_iterations(0.005, 0.01).iterations) / double(plan_iterations(0.01, 0.01).iterations);
  EXPECT_NEAR(ratio, 4.0, 1e-3);
}

TEST(Planner, EpsilonRoundTrip) {
  for (double eps : {0.3, 0.05, 0.002}) {
    auto plan = plan_iterations(eps, 0.02);
    EXPECT_LE(hoeffding_epsilon(plan.iterations, 0.02), eps);
    EXPECT_GT(hoeffding_epsilon(plan.iterations - 1, 0.02), eps * (1 - 1e-6));
  }
}

TEST(Planner, RejectsOutOfRange) {
  EXPECT_THROW(plan_iterations(0.0, 0.1), ValidationError);
  EXPECT_THROW(plan_iterations(1.0, 0.1), ValidationError);
  EXPECT_THROW(plan_iterations(0.1, 0.0), ValidationError);
  EXPECT_THROW(plan_iterations(0.1, 1.5), ValidationError);
  EXPECT_THROW(plan_iterations(std::nan(""), 0.1), ValidationError);
  EXPECT_THROW(McPlan::fixed(0), ValidationError);
}

TEST(Estimate, UniqueCellIsExactlyOne) {
  auto inst = test::abcd();
  auto e = estimate_entropy(inst, inst.position(2, "C"), test::abcd_fds(inst), McPlan::fixed(5000), kSeed);
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.successes, 5000u);
}

TEST(Estimate, RejectsViolationAndBadPosition) {
  auto bad = Instance::from_values(Schema({"A", "B"}), {{1, 2}, {1, 3}});
  EXPECT_THROW(estimate_entropy(bad, {0, 1}, parse_fds("A -> B", bad.schema()), McPlan::fixed(10), kSeed),
               PreconditionError);
  auto inst = test::abcd();
  EXPECT_THROW(estimate_entropy(inst, {5, 0}, FdSet{}, McPlan::fixed(10), kSeed), AddressError);
}

TEST(Estimate, AbcdFixtureWithPlannedSamples) {
  auto inst = test::abcd();
  auto plan = plan_iterations(0.01, 0.01);
  auto e = estimate_entropy(inst, inst.position(1, "C"), test::abcd_fds(inst), plan, kSeed);
  EXPECT_NEAR(e.value, 0.875, 0.02);
  EXPECT_EQ(e.iterations, plan.iterations);
  ASSERT_TRUE(e.epsilon.has_value());
  EXPECT_EQ(*e.epsilon, 0.01);
}

TEST(Estimate, FullCheckPathAgreesStatistically) {
  auto inst = test::abcd();
  McOptions full;
  full.path = IndicatorPath::full_check;
  const std::uint64_t n = 40'000;
  auto e = estimate_entropy(inst, inst.position(1, "C"), test::abcd_fds(inst), McPlan::fixed(n), kSeed, full);
  const double sigma = std::sqrt(0.875 * 0.125 / n);
  EXPECT_NEAR(e.value, 0.875, 4 * sigma);
}

TEST(Estimate, WitnessIndicatorMatchesMaskedCheck) {
  // Coin-flip sampling over the witness cells must give the same indicator as
  // the definition for every mask restricted to those cells.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = test::random_case(rng, 3, 3, 2, 3);
    Position p = c.instance.position_of(rng() % c.instance.positions());
    auto witnesses = enumerate_witnesses(c.instance, p, c.fds);
    std::vector<bool> bits(c.instance.positions());
    for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = k != c.instance.cell_index(p) && (rng() & 1U);
    bool any_present = false;
    for (const auto& w : witnesses) {
      bool present = true;
      for (Position q : w.cells) present = present && !bits[c.instance.cell_index(q)];
      any_present = any_present || present;
    }
    EXPECT_EQ(!any_present, test::literal_satisfies(c.instance, bits, p, test::column_fresh(c.instance, p.attribute),
                                                    c.fds));
  }
}

TEST(Estimate, UnbiasedAcrossSeeds) {
  auto inst = Instance::from_values(Schema({"A", "B", "C"}), {{1, 1, 1}, {1, 2, 1}, {2, 1, 1}});
  auto fds = parse_fds("A -> C\nB -> C", inst.schema());
  const double truth = 49.0 / 64.0;
  double total = 0;
  const int runs = 100;
  const std::uint64_t n = 2000;
  for (int s = 0; s < runs; ++s) total += estimate_entropy(inst, {0, 2}, fds, McPlan::fixed(n), s).value;
  const double sigma = std::sqrt(truth * (1 - truth) / (runs * n));
  EXPECT_NEAR(total / runs, truth, 3 * sigma);
}

TEST(Estimate, HoeffdingCoverage) {
  auto inst = test::abcd();
  auto fds = test::abcd_fds(inst);
  auto plan = plan_iterations(0.05, 0.1);
  int misses = 0;
  const int runs = 200;
  for (int s = 0; s < runs; ++s)
    if (std::abs(estimate_entropy(inst, inst.position(1, "C"), fds, plan, 9000 + s).value - 0.875) >= 0.05) ++misses;
  EXPECT_LE(double(misses) / runs, 0.1);
}

TEST(Estimate, MultiWordWitnessUnion) {
  // 79 witness cells: the sampler crosses a 64-bit word boundary.
  std::vector<std::vector<ValueId>> rows(16, std::vector<ValueId>{1, 1, 1, 1, 1});
  auto inst = Instance::from_values(test::letters(5), rows);
  auto fds = parse_fds("A, B, C, D -> E", inst.schema());
  const double truth = exact_entropy_witness(inst, {0, 4}, fds).to_double();
  const std::uint64_t n = 200'000;
  auto e = estimate_entropy(inst, {0, 4}, fds, McPlan::fixed(n), kSeed);
  EXPECT_NEAR(e.value, truth, 4 * std::sqrt(truth * (1 - truth) / n));
}

TEST(MatrixMc, SameSeedSameResultAnyThreadCount) {
  auto inst = test::cd();
  auto fds = parse_fds(test::kCdFds, inst.schema());
  McOptions one, many;
  many.threads = 4;
  many.chunk = 1000;
  one.chunk = 1000;
  auto a = entropy_matrix_mc(inst, fds, McPlan::fixed(20'000), kSeed, one);
  auto b = entropy_matrix_mc(inst, fds, McPlan::fixed(20'000), kSeed, many);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.cells()[i].successes, b.cells()[i].successes);
    EXPECT_EQ(a.cells()[i].value, b.cells()[i].value);
  }
  auto c = entropy_matrix_mc(inst, fds, McPlan::fixed(20'000), kSeed + 1, one);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a.cells()[i].successes != c.cells()[i].successes;
  EXPECT_TRUE(differs);
}

TEST(MatrixMc, ReducedRunMatchesDirectEstimate) {
  auto inst = test::abcd();
  auto fds = test::abcd_fds(inst);
  auto m = entropy_matrix_mc(inst, fds, McPlan::fixed(30'000), kSeed);
  auto direct = estimate_entropy(inst, inst.position(1, "C"), fds, McPlan::fixed(30'000), kSeed);
  EXPECT_EQ(m.at({0, 2}).successes, direct.successes);
}

TEST(MatrixMc, AllUniqueDrawsNothing) {
  auto inst = Instance::from_values(Schema({"A", "B"}), {{1, 1}, {2, 1}});
  auto m = entropy_matrix_mc(inst, parse_fds("A -> B", inst.schema()), McPlan::fixed(1000), kSeed);
  EXPECT_EQ(m.info().samples_drawn, 0u);
  for (const auto& c : m.cells()) EXPECT_EQ(c.value, 1.0);
}

TEST(MatrixMc, CdFixtureShading) {
  auto inst = test::cd();
  auto fds = parse_fds(test::kCdFds, inst.schema());
  auto m = entropy_matrix_mc(inst, fds, McPlan::fixed(100'000), kSeed);
  const auto& s = inst.schema();
  for (std::size_t r = 0; r < inst.rows(); ++r)
    for (std::size_t a = 0; a < inst.arity(); ++a) {
      const auto& name = s.name(a);
      const bool first_album = r < 3 && (name == "AlbumTitle" || name == "Band" || name == "RYear");
      const bool anastacia_year = name == "BYear" && r != 3;
      const double v = m.value(r, a);
      if (first_album) {
        EXPECT_NEAR(v, 25.0 / 32.0, 0.01);
      } else if (anastacia_year) {
        EXPECT_NEAR(v, 91.0 / 128.0, 0.01);
      } else {
        EXPECT_EQ(v, 1.0) << "row " << r << " " << name;
      }
    }
}

}  // namespace
}  // namespace plaque
