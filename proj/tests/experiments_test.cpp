#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cfgsimple/experiments.hpp"

namespace cfgsimple {
namespace {

TEST(EstimateTest, Examples) {
  auto one = estimate_prob_simple(DegreeSequence::validate({1, 1}), 1000, 1);
  EXPECT_EQ(one.value, 1.0);
  EXPECT_EQ(one.std_error, 0.0);
  EXPECT_EQ(one.replicates, 1000);

  auto tri = estimate_prob_simple(DegreeSequence::validate({2, 2, 2}), 200000, 3);
  EXPECT_NEAR(tri.value, 8.0 / 15.0, 4 * tri.std_error);
}

TEST(EstimateTest, IndependentOfThreadCount) {
  auto ds = make_regular(60, 3);
  const MonteCarloConfig one{7, 20000, 1};
  const MonteCarloConfig four{7, 20000, 4};
  EXPECT_EQ(z_histogram(ds, one), z_histogram(ds, four));
  auto model = SurrogateModel::build(ds);
  EXPECT_EQ(zhat_histogram(model, one), zhat_histogram(model, four));
}

TEST(EstimateTest, ReportAgainstExactAndPrediction) {
  auto small = estimate_report(DegreeSequence::validate({3, 3, 2}), {1, 100000, 1});
  EXPECT_TRUE(small.passed());
  EXPECT_NEAR(small.exact("prob_simple_exact"), enumerate_exact(DegreeSequence::validate({3, 3, 2})).prob_simple,
              1e-15);
  auto large = estimate_report(make_regular(300, 3), {2, 20000, 1});
  EXPECT_NO_THROW(large.verdict("matches_prediction"));
  EXPECT_TRUE(large.passed());
}

TEST(HistogramTest, MomentsAndTotalVariation) {
  Histogram h{{0, 2}, {1, 1}, {3, 1}};
  EXPECT_EQ(histogram_total(h), 4);
  EXPECT_DOUBLE_EQ(histogram_moment(h, 1).value, 1.0);
  EXPECT_DOUBLE_EQ(histogram_moment(h, 2).value, 2.5);
  EXPECT_DOUBLE_EQ(histogram_prob_zero(h).value, 0.5);
  EXPECT_EQ(total_variation(h, h), 0.0);
  Histogram other{{5, 10}};
  EXPECT_DOUBLE_EQ(total_variation(h, other), 1.0);
  Histogram half{{0, 1}, {1, 1}};
  EXPECT_DOUBLE_EQ(total_variation(h, half), 0.25);
}

TEST(HistogramTest, ResamplePreservesTotal) {
  Histogram h{{0, 500}, {1, 300}, {4, 200}};
  auto rng = Xoshiro256ss::stream(1, Domain::Bootstrap, 0);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(histogram_total(resample(h, rng)), 1000);
}

TEST(HistogramTest, SlopeAndQuantile) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 1, -1, -3};
  EXPECT_DOUBLE_EQ(least_squares_slope(x, y), -2.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.25), 2.5);
}

TEST(MomentGapTest, OnesFamilyHasZeroGap) {
  MomentGapConfig cfg;
  cfg.orders = {1, 2, 3};
  cfg.sizes = {10, 100, 1000};
  cfg.mc = {1, 2000, 1};
  cfg.bootstrap = 50;
  auto report = moment_gap_study(DegreeFamily::parse("ones"), cfg);
  EXPECT_TRUE(report.passed());
  for (int m = 2; m <= 3; ++m) EXPECT_EQ(report.estimate("gap_m=" + std::to_string(m) + "@N=100").value, 0.0);
}

TEST(MomentGapTest, RegularFirstOrderClosedForm) {
  MomentGapConfig cfg;
  cfg.orders = {1};
  cfg.sizes = {100, 300, 1000, 3000};
  auto report = moment_gap_study(DegreeFamily::parse("regular:d=3"), cfg);
  // E Z = 2 + 2/(N-1), E Zh = 2 - 3/N.
  for (std::int64_t n : cfg.sizes) {
    const double total = 3.0 * n;
    const std::string at = "m=1@N=" + std::to_string(3 * n);
    EXPECT_NEAR(report.exact("E_Z^" + at), 2.0 + 2.0 / (total - 1), 1e-12);
    EXPECT_NEAR(report.exact("E_Zhat^" + at), 2.0 - 3.0 / total, 1e-12);
  }
  EXPECT_LT(report.exact("slope_m=1"), -0.9);
  EXPECT_TRUE(report.verdict("slope_m=1").pass);
}

TEST(MomentGapTest, RejectsUnboundedFamily) {
  MomentGapConfig cfg;
  cfg.orders = {1};
  cfg.sizes = {100, 100000};
  try {
    moment_gap_study(DegreeFamily::parse("power_block"), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AssumptionViolated);
  }
}

TEST(TvTest, OnesFamilyIsExactlyZero) {
  auto tv = tv_distance_estimate(make_ones(50), 10000, 1, 1, 20);
  EXPECT_EQ(tv.tv, 0.0);
  EXPECT_EQ(tv.ci_high, 0.0);
  EXPECT_THROW(tv_distance_estimate(make_ones(50), 9999, 1), Error);
}

TEST(TvTest, SmallStudyRuns) {
  TvStudyConfig cfg;
  cfg.sizes = {10, 100};
  cfg.mc = {3, 20000, 1};
  cfg.bootstrap = 50;
  auto report = tv_study(DegreeFamily::parse("regular:d=3"), cfg);
  const auto& small = report.estimate("tv@n=10");
  EXPECT_GT(small.value, 0.0);
  EXPECT_LE(report.exact("tv_ci_low@n=10"), report.exact("tv_ci_high@n=10"));
}

TEST(DichotomyTest, OnesAndRegular) {
  DichotomyConfig cfg;
  cfg.sizes = {50, 200};
  cfg.mc = {5, 20000, 1};
  auto report = dichotomy_sweep({{DegreeFamily::parse("ones"), true}, {DegreeFamily::parse("regular:d=3"), true}},
                                cfg);
  EXPECT_EQ(report.estimate("p_hat:ones@N=50").value, 1.0);
  EXPECT_TRUE(report.passed());
}

TEST(DichotomyTest, UnboundedFamilyVanishes) {
  DichotomyConfig cfg;
  cfg.sizes = {1000, 3000};
  cfg.mc = {5, 5000, 1};
  auto report = dichotomy_sweep({{DegreeFamily::parse("power_block"), false}}, cfg);
  EXPECT_TRUE(report.verdict("vanishing:power_block").pass);
}

TEST(SplitTest, AlreadyBoundedSequenceIsUnchanged) {
  auto ds = make_regular(100, 3);
  auto report = splitting_comparison(ds, 5.0, {1, 5000, 1});
  EXPECT_EQ(report.estimate("p_hat_raw").value, report.estimate("p_hat_split").value);
  EXPECT_TRUE(report.passed());
}

TEST(SplitTest, HeavyTailSplitIsMoreLikelySimple) {
  auto ds = make_block(400, 12, 0.5);
  auto report = splitting_comparison(ds, 2.0, {2, 20000, 1});
  EXPECT_TRUE(report.verdict("monotone").pass);
  EXPECT_GE(report.estimate("p_hat_split").value, report.estimate("p_hat_raw").value);
  EXPECT_DOUBLE_EQ(report.exact("limit_bound"), std::exp(-0.5));
}

TEST(BipartiteTest, ConditionValues) {
  auto ones = bipartite_condition_values(BipartiteDegreePair::validate({1, 1, 1}, {1, 1, 1}), 3);
  EXPECT_EQ(ones.r1, 0.0);
  for (double r : ones.tail_s) EXPECT_DOUBLE_EQ(r, 1.0);
  // s = [2,2,1,1], t = [3,1,1,1]: N = 6; sum s(s-1) = 4, sum t(t-1) = 6.
  auto cond = bipartite_condition_values(BipartiteDegreePair::validate({1, 2, 1, 2}, {1, 3, 1, 1}), 3);
  EXPECT_DOUBLE_EQ(cond.r1, 24.0 / 36.0);
  // tail_s from index min(t_max=3, m): m=1 -> all, m=2 -> drop s_(1), m=3 -> drop two.
  EXPECT_DOUBLE_EQ(cond.tail_s[0], 1.0);
  EXPECT_DOUBLE_EQ(cond.tail_s[1], 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(cond.tail_s[2], 2.0 / 6.0);
  // tail_t from index min(s_max=2, m): m>=2 -> drop t_(1).
  EXPECT_DOUBLE_EQ(cond.tail_t[0], 1.0);
  EXPECT_DOUBLE_EQ(cond.tail_t[1], 3.0 / 6.0);
  EXPECT_DOUBLE_EQ(cond.tail_t[2], 3.0 / 6.0);
}

TEST(BipartiteTest, AllOnesAndCounterexample) {
  BipartiteConfig cfg;
  cfg.mc = {1, 5000, 1};
  auto ones = bipartite_conditions(BipartiteDegreePair::validate({1, 1, 1, 1}, {1, 1, 1, 1}), cfg);
  EXPECT_EQ(ones.estimate("prob_simple").value, 1.0);
  EXPECT_TRUE(ones.passed());

  auto counter = bipartite_conditions(make_bipartite_counterexample(10000), cfg);
  EXPECT_LT(counter.exact("tail_s_m=2"), 0.05);
  EXPECT_LT(counter.exact("r1"), 10.0);
  EXPECT_TRUE(counter.verdict("dichotomy_consistent").pass);
}

TEST(BipartiteTest, RegularTwoMatchesProductForm) {
  BipartiteConfig cfg;
  cfg.mc = {4, 50000, 1};
  auto report = bipartite_conditions(make_bipartite_regular(400, 2), cfg);
  // lambda = 2/N for each of (N/2)^2 pairs.
  const double l = 2.0 / 400.0;
  EXPECT_NEAR(report.exact("prediction"), std::exp(200.0 * 200.0 * (std::log1p(l) - l)), 1e-12);
  EXPECT_TRUE(report.verdict("prediction_match").pass);
}

TEST(OracleTest, SmallSuitePasses) {
  OracleConfig cfg;
  cfg.max_total = 6;
  cfg.max_bipartite_total = 3;
  cfg.mc = {3, 20000, 1};
  auto report = oracle_check(cfg);
  EXPECT_TRUE(report.passed());
  EXPECT_NO_THROW(report.verdict("[2,2,2]:closed_forms"));
  EXPECT_NO_THROW(report.verdict("s=[2],t=[1,1]:mc"));
}

TEST(OracleTest, PartitionCounts) {
  EXPECT_EQ(partitions(4).size(), 5u);
  EXPECT_EQ(partitions(10).size(), 42u);
}

TEST(ReportTest, SerializationIsStable) {
  ExperimentReport report("demo", Json{{"k", 1}});
  report.add_estimate("p", {0.25, 0.01, 100, 9});
  report.add_exact("x", 1.0 / 3.0);
  report.add_verdict("ok", true, "a, \"b\"");
  std::ostringstream csv;
  write_csv(csv, report);
  EXPECT_EQ(csv.str(),
            "experiment,kind,name,value,std_error,replicates,seed,detail\n"
            "demo,estimate,p,0.25,0.01,100,9,\n"
            "demo,exact,x,0.3333333333333333,,,,\n"
            "demo,verdict,ok,1,,,,\"a, \"\"b\"\"\"\n");
  const Json j = to_json(report);
  EXPECT_EQ(j["estimates"]["p"]["replicates"], 100);
  EXPECT_TRUE(j["passed"].get<bool>());
}

}  // namespace
}  // namespace cfgsimple
