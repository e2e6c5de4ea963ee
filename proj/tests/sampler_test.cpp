#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "cfgsimple/experiments.hpp"
#include "cfgsimple/sampler.hpp"
#include "oracle.hpp"

namespace cfgsimple {
namespace {

Pairing pairing_of(const DegreeSequence& ds, std::vector<HalfEdge> match) {
  return Pairing(HalfEdgeLayout::of(ds), std::move(match));
}

TEST(SamplerTest, UniqueMatchings) {
  auto ones = DegreeSequence::validate({1, 1});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = sample_pairing(ones, seed);
    EXPECT_EQ(p.partner(0), 1u);
    EXPECT_TRUE(collision_stats(p).simple);
  }
  auto loop = sample_pairing(DegreeSequence::validate({2}), 3);
  ASSERT_EQ(loop.edges().size(), 1u);
  EXPECT_EQ(loop.edges()[0], std::make_pair(Vertex{0}, Vertex{0}));
}

TEST(SamplerTest, DeterministicGivenSeed) {
  auto ds = make_regular(50, 3);
  EXPECT_EQ(sample_pairing(ds, 7), sample_pairing(ds, 7));
  EXPECT_FALSE(sample_pairing(ds, 7) == sample_pairing(ds, 8));
}

TEST(SamplerTest, PairingIsInvolutionAndPreservesDegrees) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto ds = DegreeSequence::validate({5, 3, 3, 2, 1, 0, 4, 2});
    auto p = sample_pairing(ds, seed);
    ASSERT_TRUE(p.is_valid());
    std::vector<Degree> rebuilt(ds.size(), 0);
    for (auto [u, v] : p.edges()) {
      ++rebuilt[u];
      ++rebuilt[v];
    }
    EXPECT_EQ(rebuilt, std::vector<Degree>(ds.degrees().begin(), ds.degrees().end()));
  }
}

TEST(SamplerTest, UniformOverFifteenMatchings) {
  auto ds = DegreeSequence::validate({2, 2, 2});
  auto layout = HalfEdgeLayout::of(ds);
  PairingSampler sampler(layout);
  std::map<std::vector<HalfEdge>, long> counts;
  const long samples = 150000;
  for (long r = 0; r < samples; ++r) {
    auto rng = Xoshiro256ss::stream(11, Domain::Pairing, static_cast<std::uint64_t>(r));
    auto m = sampler.draw(rng);
    ++counts[{m.begin(), m.end()}];
  }
  ASSERT_EQ(counts.size(), 15u);
  const double p = 1.0 / 15.0;
  const double se = std::sqrt(p * (1 - p) / samples);
  for (const auto& [match, c] : counts) EXPECT_NEAR(static_cast<double>(c) / samples, p, 4 * se);
}

// Chi-square goodness of fit against the uniform distribution on all (N-1)!!
// matchings, for every partition of N = 8 plus sequences with zero degrees.
TEST(SamplerTest, ChiSquareUniformityUpToEightHalfEdges) {
  std::vector<std::vector<Degree>> cases = partitions(8);
  cases.push_back({0, 3, 0, 3, 2});
  cases.push_back({1, 0, 1, 1, 1, 1, 1, 1, 0, 1});
  const long samples = 1000000;
  for (const auto& degrees : cases) {
    auto ds = DegreeSequence::validate(degrees);
    auto layout = HalfEdgeLayout::of(ds);
    PairingSampler sampler(layout);
    std::map<std::vector<HalfEdge>, long> counts;
    for (long r = 0; r < samples; ++r) {
      auto rng = Xoshiro256ss::stream(5, Domain::Pairing, static_cast<std::uint64_t>(r));
      auto m = sampler.draw(rng);
      ++counts[{m.begin(), m.end()}];
    }
    ASSERT_EQ(counts.size(), 105u) << sequence_label(ds.degrees());
    const double expected = samples / 105.0;
    double chi2 = 0.0;
    for (const auto& [m, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    boost::math::chi_squared dist(104);
    EXPECT_LT(chi2, boost::math::quantile(dist, 0.999)) << sequence_label(ds.degrees());
  }
}

TEST(SamplerTest, PairProbabilityIsOneOverNMinusOne) {
  auto ds = DegreeSequence::validate({3, 2, 2, 1, 4});
  auto layout = HalfEdgeLayout::of(ds);
  PairingSampler sampler(layout);
  const long samples = 200000;
  long hits_a = 0;
  long hits_b = 0;
  for (long r = 0; r < samples; ++r) {
    auto rng = Xoshiro256ss::stream(2, Domain::Pairing, static_cast<std::uint64_t>(r));
    auto m = sampler.draw(rng);
    hits_a += (m[0] == 7);
    hits_b += (m[9] == 10);
  }
  const double p = 1.0 / 11.0;
  const double se = std::sqrt(p * (1 - p) / samples);
  EXPECT_NEAR(static_cast<double>(hits_a) / samples, p, 4 * se);
  EXPECT_NEAR(static_cast<double>(hits_b) / samples, p, 4 * se);
}

TEST(CollisionStatsTest, SingleLoop) {
  auto stats = collision_stats(sample_pairing(DegreeSequence::validate({2}), 1));
  EXPECT_EQ(stats.loop_count(0), 1);
  EXPECT_EQ(stats.z, 1);
  EXPECT_FALSE(stats.simple);
}

TEST(CollisionStatsTest, AllThreeMatchingsOfTwoDoubleVertices) {
  auto ds = DegreeSequence::validate({2, 2});
  // Half-edges 0,1 at vertex 0 and 2,3 at vertex 1.
  auto cross_a = collision_stats(pairing_of(ds, {2, 3, 0, 1}));
  auto cross_b = collision_stats(pairing_of(ds, {3, 2, 1, 0}));
  auto loops = collision_stats(pairing_of(ds, {1, 0, 3, 2}));
  for (const auto& cross : {cross_a, cross_b}) {
    EXPECT_EQ(cross.edges_between(0, 1), 2);
    EXPECT_EQ(cross.y_total, 1);
    EXPECT_EQ(cross.z, 1);
  }
  EXPECT_EQ(loops.loop_count(0), 1);
  EXPECT_EQ(loops.loop_count(1), 1);
  EXPECT_EQ(loops.z, 2);
}

TEST(CollisionStatsTest, CounterAgreesWithFullStats) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto ds = DegreeSequence::validate({6, 4, 3, 3, 2, 2, 1, 1, 0, 2});
    auto p = sample_pairing(ds, seed);
    auto layout = HalfEdgeLayout::of(ds);
    CollisionCounter counter(layout);
    const auto stats = collision_stats(p);
    EXPECT_EQ(counter.z(p.match()), stats.z);
    EXPECT_EQ(stats.simple, stats.z == 0);
    std::int64_t ends = 0;
    for (auto& [v, x] : stats.loops) ends += 2 * x;
    for (auto& [k, x] : stats.multiplicity) ends += 2 * x;
    EXPECT_EQ(ends, ds.total());
  }
}

TEST(CollisionStatsTest, CounterMatchesOracleDistribution) {
  // Exact Z distribution from the brute-force oracle against the counter run
  // over every matching.
  const std::vector<long> degrees{3, 2, 2, 1};
  auto ds = DegreeSequence::validate({3, 2, 2, 1});
  auto layout = HalfEdgeLayout::of(ds);
  CollisionCounter counter(layout);
  const auto owner = oracle::owners(degrees);
  oracle::matchings(8, [&](const auto& pairs) {
    std::vector<HalfEdge> match(8);
    for (auto [a, b] : pairs) {
      match[a] = static_cast<HalfEdge>(b);
      match[b] = static_cast<HalfEdge>(a);
    }
    EXPECT_EQ(counter.z(match), oracle::multigraph(owner, pairs).z());
  });
}

TEST(BipartiteSamplerTest, Examples) {
  auto single = sample_bipartite_pairing(BipartiteDegreePair::validate({1}, {1}), 1);
  EXPECT_TRUE(collision_stats(single).simple);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto p = sample_bipartite_pairing(BipartiteDegreePair::validate({2}, {1, 1}), seed);
    ASSERT_TRUE(p.is_valid());
    auto stats = collision_stats(p);
    EXPECT_EQ(stats.edges_between(0, 1), 1);
    EXPECT_EQ(stats.edges_between(0, 2), 1);
    EXPECT_TRUE(stats.simple);

    auto forced = collision_stats(sample_bipartite_pairing(BipartiteDegreePair::validate({2}, {2}), seed));
    EXPECT_EQ(forced.edges_between(0, 1), 2);
    EXPECT_EQ(forced.z, 1);
    EXPECT_TRUE(forced.loops.empty());
  }
}

TEST(BipartiteSamplerTest, UniformOverBijections) {
  auto bp = BipartiteDegreePair::validate({2, 1}, {1, 1, 1});
  auto layout = HalfEdgeLayout::of(bp);
  PairingSampler sampler(layout);
  std::map<std::vector<HalfEdge>, long> counts;
  const long samples = 120000;
  for (long r = 0; r < samples; ++r) {
    auto rng = Xoshiro256ss::stream(4, Domain::Pairing, static_cast<std::uint64_t>(r));
    auto m = sampler.draw(rng);
    ++counts[{m.begin(), m.end()}];
  }
  ASSERT_EQ(counts.size(), 6u);
  const double p = 1.0 / 6.0;
  const double se = std::sqrt(p * (1 - p) / samples);
  for (const auto& [m, c] : counts) EXPECT_NEAR(static_cast<double>(c) / samples, p, 4 * se);
}

TEST(RejectionTest, Examples) {
  auto one = rejection_sample_simple(DegreeSequence::validate({1, 1}), 3, 10);
  EXPECT_EQ(one.tries, 1);
  try {
    rejection_sample_simple(DegreeSequence::validate({2}), 3, 50);
    FAIL() << "expected Exhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Exhausted);
  }
}

TEST(RejectionTest, MeanTriesForTriangle) {
  auto ds = DegreeSequence::validate({2, 2, 2});
  const int runs = 40000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    auto result = rejection_sample_simple(ds, static_cast<std::uint64_t>(r));
    EXPECT_TRUE(collision_stats(result.pairing).simple);
    sum += static_cast<double>(result.tries);
    sum_sq += static_cast<double>(result.tries * result.tries);
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum_sq / runs - mean * mean) / runs);
  EXPECT_NEAR(mean, 15.0 / 8.0, 3 * se);
}

TEST(RejectionTest, DefaultMaxTries) {
  EXPECT_EQ(default_max_tries(DegreeSequence::validate({1, 1})), 1000);
  // P ~ e^{-2} for large 3-regular graphs -> 10 * 8 = 80 -> floor 1000.
  EXPECT_EQ(default_max_tries(make_regular(1000, 3)), 1000);
  auto dense = make_regular(100, 20);
  EXPECT_GT(default_max_tries(dense), 1000);
}

TEST(EdgeListTest, CsvOneLinePerEdge) {
  auto ds = DegreeSequence::validate({2, 2});
  std::ostringstream out;
  write_edge_list_csv(out, pairing_of(ds, {1, 0, 3, 2}));
  EXPECT_EQ(out.str(), "0,0\n1,1\n");
  std::ostringstream cross;
  write_edge_list_csv(cross, pairing_of(ds, {2, 3, 0, 1}));
  EXPECT_EQ(cross.str(), "0,1\n0,1\n");
}

}  // namespace
}  // namespace cfgsimple
