#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "cfgsimple/surrogate.hpp"

namespace cfgsimple {
namespace {

TEST(SurrogateTest, TriangleRates) {
  auto model = SurrogateModel::build(DegreeSequence::validate({2, 2, 2}));
  for (double l : model.lambda_i()) EXPECT_DOUBLE_EQ(l, 1.0 / 6.0);
  ASSERT_EQ(model.pair_terms().size(), 1u);
  EXPECT_DOUBLE_EQ(model.pair_terms()[0].lambda, 1.0 / 3.0);
  EXPECT_EQ(model.pair_terms()[0].multiplicity, 3);
  EXPECT_DOUBLE_EQ(model.sum_lambda_i(), 0.5);
  EXPECT_NEAR(prob_simple_asymptotic(model), std::exp(-0.5) * std::pow(std::exp(-1.0 / 3.0) * (4.0 / 3.0), 3),
              1e-15);
}

TEST(SurrogateTest, TriangleClosedForm) {
  // exp(-3/2) (4/3)^3 = (64/27) e^{-3/2}
  const double value = prob_simple_asymptotic(SurrogateModel::build(DegreeSequence::validate({2, 2, 2})));
  EXPECT_NEAR(value, 64.0 / 27.0 * std::exp(-1.5), 1e-12);
}

TEST(SurrogateTest, RegularPairSum) {
  for (auto [n, d] : {std::pair{10, 3}, {100, 3}, {50, 4}, {200, 7}}) {
    auto model = SurrogateModel::build(make_regular(n, d));
    EXPECT_NEAR(model.sum_lambda_ij(), (d - 1) * (n - 1) / 2.0, 1e-9 * n * d);
    EXPECT_NEAR(model.sum_lambda_i(), (d - 1) / 2.0, 1e-12);
  }
}

TEST(SurrogateTest, LoopSumIdentity) {
  auto ds = DegreeSequence::validate({7, 1, 4, 4, 2, 0, 3, 1});
  auto model = SurrogateModel::build(ds);
  EXPECT_NEAR(model.sum_lambda_i(),
              static_cast<double>(ds.sum_squares() - ds.total()) / (2.0 * static_cast<double>(ds.total())), 1e-14);
}

TEST(SurrogateTest, GroupedFormMatchesProductForm) {
  const std::vector<Degree> degrees{5, 3, 3, 2, 2, 2, 1, 1, 4, 0, 3};
  auto ds = DegreeSequence::validate(degrees);
  const double n = static_cast<double>(ds.total());
  long double log_product = 0.0L;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const double di = static_cast<double>(degrees[i]);
    log_product -= di * (di - 1) / (2 * n);
    for (std::size_t j = i + 1; j < degrees.size(); ++j) {
      const double dj = static_cast<double>(degrees[j]);
      const double l = std::sqrt(di * (di - 1) * dj * (dj - 1)) / n;
      log_product += std::log1p(l) - l;
    }
  }
  auto model = SurrogateModel::build(ds);
  EXPECT_NEAR(log_prob_simple_asymptotic(model), static_cast<double>(log_product), 1e-12);
}

TEST(SurrogateTest, ThreeRegularLimit) {
  const double p = prob_simple_asymptotic(SurrogateModel::build(make_regular(10000, 3)));
  EXPECT_NEAR(p, std::exp(-2.0), 0.002);
}

TEST(SurrogateTest, BipartiteProduct) {
  auto model = SurrogateModel::build(BipartiteDegreePair::validate({2}, {2}));
  EXPECT_TRUE(model.loop_terms().empty());
  EXPECT_NEAR(prob_simple_asymptotic(model), 2.0 / std::exp(1.0), 1e-15);
  auto ones = SurrogateModel::build(BipartiteDegreePair::validate({1, 1}, {2}));
  EXPECT_DOUBLE_EQ(prob_simple_asymptotic(ones), 1.0);
}

TEST(SurrogateTest, LambdaMinusLog1pIsSmooth) {
  for (double l : {1e-8, 5e-5, 9.99e-5, 1e-4, 1.01e-4, 1e-3}) {
    // sum_{k>=2} (-1)^k l^k / k, summed far past double precision.
    long double exact = 0.0L;
    long double power = static_cast<long double>(l);
    for (int k = 2; k < 40; ++k) {
      power *= -static_cast<long double>(l);
      exact -= power / k;
    }
    EXPECT_NEAR(lambda_minus_log1p(l), static_cast<double>(exact), 1e-12 * l * l);
  }
}

TEST(SurrogateTest, PoissonTail) {
  EXPECT_EQ(poisson_tail2(0.0), 0.0);
  EXPECT_NEAR(poisson_tail2(0.5), 1.0 - std::exp(-0.5) * 1.5, 1e-15);
  EXPECT_NEAR(poisson_tail2(3.0), 1.0 - std::exp(-3.0) * 4.0, 1e-15);
  EXPECT_NEAR(poisson_tail2(1e-6), 0.5e-12, 1e-18);
}

TEST(HmTest, FirstOrderIsHalfLambdaSquared) {
  for (double l = 0.0; l <= 5.0; l += 0.05) EXPECT_NEAR(h_m(1, l), l * l / 2.0, 1e-14 * std::max(1.0, l * l));
}

TEST(HmTest, SecondOrderClosedForm) {
  // (C(x,2))_2 = (x+1)(x)_3 / 4 = ((x)_4 + 4 (x)_3) / 4.
  for (double l : {0.0, 0.1, 1.0, 2.5, 7.0}) {
    EXPECT_NEAR(h_m(2, l), (std::pow(l, 4) + 4 * std::pow(l, 3)) / 4.0, 1e-12 * (1 + std::pow(l, 4)));
  }
}

TEST(HmTest, VanishesAtZeroAndIsCubicNearZero) {
  for (int m = 1; m <= kMaxSupportedOrder; ++m) EXPECT_EQ(h_m(m, 0.0), 0.0);
  for (int m = 2; m <= 6; ++m) {
    for (double l : {1e-2, 1e-3, 1e-4}) {
      const double ratio = h_m(m, l) / (l * l * l);
      EXPECT_GT(ratio, 0.0);
      EXPECT_LT(ratio, 1e4) << "m=" << m << " lambda=" << l;
    }
  }
}

TEST(HmTest, PolynomialMatchesSeries) {
  for (int m = 1; m <= 6; ++m) {
    for (double l : {1e-3, 0.05, 0.3, 1.0, 2.0, 5.0, 10.0}) {
      const double poly = h_m(m, l);
      const double series = h_m_series(m, l);
      EXPECT_NEAR(poly, series, 1e-10 * std::abs(series)) << "m=" << m << " lambda=" << l;
    }
  }
}

TEST(HmTest, RejectsBadArguments) {
  for (auto call : {std::function<void()>([] { h_m(0, 1.0); }), std::function<void()>([] { h_m(11, 1.0); })}) {
    try {
      call();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OrderTooHigh);
    }
  }
  EXPECT_THROW(h_m(1, -0.1), Error);
  EXPECT_THROW(h_m(1, 101.0), Error);
  EXPECT_THROW(h_m_series(2, std::nan("")), Error);
}

TEST(MomentsTest, BellNumbers) {
  auto model = SurrogateModel::from_terms(2, {{1.0, 1}}, {});
  const auto moments = zhat_moments(model, 5);
  const std::vector<double> bell{1, 2, 5, 15, 52};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(moments[k], bell[k], 1e-10);
}

TEST(MomentsTest, CumulantRoundTrip) {
  const std::vector<double> moments{1.3, 4.1, 17.0, 90.2, 560.0, 4000.0};
  const auto back = cumulants_to_moments(moments_to_cumulants(moments));
  for (std::size_t k = 0; k < moments.size(); ++k) EXPECT_NEAR(back[k], moments[k], 1e-9 * moments[k]);
}

TEST(MomentsTest, PoissonCumulantsAreAllLambda) {
  const double l = 0.7;
  const auto kappa = moments_to_cumulants(loop_term_moments(l, 6));
  for (double k : kappa) EXPECT_NEAR(k, l, 1e-12);
}

TEST(MomentsTest, CumulantsAddOverIndependentParts) {
  auto model = SurrogateModel::build(DegreeSequence::validate({4, 3, 3, 2, 2, 1, 1}));
  const std::vector<TermGroup> loops(model.loop_terms().begin(), model.loop_terms().end());
  const std::vector<TermGroup> pairs(model.pair_terms().begin(), model.pair_terms().end());
  auto whole = zhat_cumulants(model, 6);
  auto a = zhat_cumulants(SurrogateModel::from_terms(model.total(), loops, {}), 6);
  auto b = zhat_cumulants(SurrogateModel::from_terms(model.total(), {}, pairs), 6);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(whole[k], a[k] + b[k], 1e-12 * std::abs(whole[k]) + 1e-15);
}

TEST(MomentsTest, MeanIsSumOfRates) {
  auto model = SurrogateModel::build(make_regular(30, 4));
  double expected = model.sum_lambda_i();
  for (const auto& g : model.pair_terms()) expected += g.multiplicity * g.lambda * g.lambda / 2.0;
  EXPECT_NEAR(zhat_moment(model, 1), expected, 1e-12);
  EXPECT_EQ(zhat_moment(model, 0), 1.0);
}

TEST(MomentsTest, OrderLimit) {
  auto model = SurrogateModel::build(make_regular(10, 3));
  try {
    zhat_moment(model, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OrderTooHigh);
  }
  EXPECT_NO_THROW(zhat_moment(model, 8, 8));
  EXPECT_THROW(zhat_moments(model, 11), Error);
}

TEST(ZhatSamplerTest, MomentsMatchClosedForm) {
  for (const auto& degrees : {std::vector<Degree>{3, 3, 2, 2, 2, 1, 1}, std::vector<Degree>{6, 2, 2, 2}}) {
    auto model = SurrogateModel::build(DegreeSequence::validate(degrees));
    ZhatSampler sampler(model);
    const long draws = 400000;
    std::vector<double> sum(3, 0.0);
    std::vector<double> sum_sq(3, 0.0);
    for (long r = 0; r < draws; ++r) {
      auto rng = Xoshiro256ss::stream(9, Domain::Surrogate, static_cast<std::uint64_t>(r));
      const double z = static_cast<double>(sampler(rng));
      double p = 1.0;
      for (int m = 0; m < 3; ++m) {
        p *= z;
        sum[m] += p;
        sum_sq[m] += p * p;
      }
    }
    for (int m = 0; m < 3; ++m) {
      const double mean = sum[m] / draws;
      const double se = std::sqrt((sum_sq[m] / draws - mean * mean) / draws);
      EXPECT_NEAR(mean, zhat_moment(model, m + 1), 5 * se) << "order " << m + 1;
    }
  }
}

TEST(ZhatSamplerTest, ZeroProbabilityMatchesPrediction) {
  auto model = SurrogateModel::build(DegreeSequence::validate({2, 2, 2}));
  ZhatSampler sampler(model);
  const long draws = 300000;
  long zeros = 0;
  for (long r = 0; r < draws; ++r) {
    auto rng = Xoshiro256ss::stream(13, Domain::Surrogate, static_cast<std::uint64_t>(r));
    zeros += sampler(rng) == 0;
  }
  const double p = prob_simple_asymptotic(model);
  EXPECT_NEAR(static_cast<double>(zeros) / draws, p, 4 * std::sqrt(p * (1 - p) / draws));
}

TEST(ZhatSamplerTest, DeterministicAndEmptyModel) {
  auto model = SurrogateModel::build(make_regular(40, 3));
  EXPECT_EQ(sample_zhat(model, 5), sample_zhat(model, 5));
  EXPECT_EQ(sample_zhat(SurrogateModel::build(DegreeSequence::validate({1, 1, 0})), 5), 0);
}

}  // namespace
}  // namespace cfgsimple
