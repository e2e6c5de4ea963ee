// experiments.hpp - Monte Carlo harness and the verification experiments.
//
// All randomness is drawn from Xoshiro256ss::stream(seed, domain, replicate),
// so every estimate depends only on (config, seed). Replicates are split into
// contiguous blocks across threads and merged as integer histograms, which
// makes results identical for any thread count.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cfgsimple/degrees.hpp"
#include "cfgsimple/error.hpp"
#include "cfgsimple/exact.hpp"
#include "cfgsimple/report.hpp"
#include "cfgsimple/rng.hpp"
#include "cfgsimple/sampler.hpp"
#include "cfgsimple/surrogate.hpp"

namespace cfgsimple {

struct MonteCarloConfig {
  std::uint64_t seed = 1;
  std::int64_t replicates = 100000;
  unsigned threads = 1;
};

inline Json to_json(const MonteCarloConfig& mc) {
  return Json{{"seed", mc.seed}, {"replicates", mc.replicates}};
}

/// Seed for sub-experiment `tag` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed ^ (tag * 0xA0761D6478BD642FULL);
  return splitmix64(state);
}

inline std::string sequence_label(std::span<const Degree> degrees) {
  std::string out = "[";
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(degrees[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Histograms

/// value -> number of replicates.
using Histogram = std::map<std::int64_t, std::int64_t>;

/// Runs `replicates` draws; `make_worker()` returns a callable mapping a
/// replicate index to an integer outcome. One worker per thread.
template <class MakeWorker>
Histogram parallel_histogram(std::int64_t replicates, unsigned threads, MakeWorker&& make_worker) {
  if (replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");
  const auto workers = static_cast<std::int64_t>(std::clamp<std::int64_t>(threads, 1, replicates));
  std::vector<Histogram> partial(static_cast<std::size_t>(workers));
  auto run = [&](std::int64_t w) {
    auto worker = make_worker();
    const std::int64_t begin = replicates * w / workers;
    const std::int64_t end = replicates * (w + 1) / workers;
    auto& hist = partial[static_cast<std::size_t>(w)];
    for (std::int64_t r = begin; r < end; ++r) ++hist[worker(static_cast<std::uint64_t>(r))];
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  Histogram merged;
  for (const auto& h : partial) {
    for (const auto& [k, c] : h) merged[k] += c;
  }
  return merged;
}

/// Histogram of Z over independent pairings of `layout`.
inline Histogram z_histogram(const std::shared_ptr<const HalfEdgeLayout>& layout, const MonteCarloConfig& mc,
                             Domain domain = Domain::Pairing) {
  return parallel_histogram(mc.replicates, mc.threads, [&] {
    return [sampler = PairingSampler(layout), counter = CollisionCounter(layout), seed = mc.seed,
            domain](std::uint64_t r) mutable {
      auto rng = Xoshiro256ss::stream(seed, domain, r);
      return counter.z(sampler.draw(rng));
    };
  });
}

inline Histogram z_histogram(const DegreeSequence& ds, const MonteCarloConfig& mc) {
  return z_histogram(HalfEdgeLayout::of(ds), mc);
}

inline Histogram z_histogram(const BipartiteDegreePair& bp, const MonteCarloConfig& mc) {
  return z_histogram(HalfEdgeLayout::of(bp), mc);
}

/// Histogram of independent draws of the surrogate Zh.
inline Histogram zhat_histogram(const SurrogateModel& model, const MonteCarloConfig& mc) {
  return parallel_histogram(mc.replicates, mc.threads, [&] {
    return [sampler = ZhatSampler(model), seed = mc.seed](std::uint64_t r) mutable {
      auto rng = Xoshiro256ss::stream(seed, Domain::Surrogate, r);
      return sampler(rng);
    };
  });
}

inline std::int64_t histogram_total(const Histogram& h) {
  std::int64_t total = 0;
  for (const auto& [k, c] : h) total += c;
  return total;
}

/// Sample mean of z^m with its standard error.
inline Estimate histogram_moment(const Histogram& h, int m, std::uint64_t seed = 0) {
  const std::int64_t total = histogram_total(h);
  long double s1 = 0.0L;
  long double s2 = 0.0L;
  for (const auto& [z, c] : h) {
    const long double p = std::pow(static_cast<long double>(z), m);
    s1 += p * c;
    s2 += p * p * c;
  }
  const long double mean = s1 / total;
  long double var = total > 1 ? (s2 - total * mean * mean) / (total - 1) : 0.0L;
  if (var < 0) var = 0;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / total)), total, seed};
}

/// Fraction of replicates with outcome 0 and its binomial standard error.
inline Estimate histogram_prob_zero(const Histogram& h, std::uint64_t seed = 0) {
  const std::int64_t total = histogram_total(h);
  auto it = h.find(0);
  const double p = it == h.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total)), total, seed};
}

/// Half the L1 distance between the normalized histograms.
inline double total_variation(const Histogram& a, const Histogram& b) {
  const auto na = static_cast<double>(histogram_total(a));
  const auto nb = static_cast<double>(histogram_total(b));
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += ia->second / na;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += ib->second / nb;
      ++ib;
    } else {
      sum += std::abs(ia->second / na - ib->second / nb);
      ++ia;
      ++ib;
    }
  }
  return sum / 2.0;
}

/// Multinomial resample of a histogram with the same total.
template <class Rng>
Histogram resample(const Histogram& h, Rng& rng) {
  std::int64_t remaining = histogram_total(h);
  std::int64_t mass = remaining;
  Histogram out;
  for (const auto& [k, c] : h) {
    if (remaining == 0) break;
    std::int64_t draw = remaining;
    if (c < mass) {
      std::binomial_distribution<std::int64_t> dist(remaining, static_cast<double>(c) / static_cast<double>(mass));
      draw = dist(rng);
    }
    if (draw > 0) out[k] = draw;
    remaining -= draw;
    mass -= c;
  }
  return out;
}

inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Least-squares slope of y on x.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::nan("");
}

// ---------------------------------------------------------------------------
// P(simple)

inline Estimate estimate_prob_simple(const DegreeSequence& ds, std::int64_t replicates, std::uint64_t seed,
                                     unsigned threads = 1) {
  return histogram_prob_zero(z_histogram(ds, {seed, replicates, threads}), seed);
}

inline Estimate estimate_prob_simple(const BipartiteDegreePair& bp, std::int64_t replicates, std::uint64_t seed,
                                     unsigned threads = 1) {
  return histogram_prob_zero(z_histogram(bp, {seed, replicates, threads}), seed);
}

/// P(simple) estimate checked against the exact value (N <= exact cap) or
/// else against the surrogate prediction with tolerance max(4 se, 10/n).
inline ExperimentReport estimate_report(const DegreeSequence& ds, const MonteCarloConfig& mc,
                                        std::int64_t exact_cap = 12) {
  ExperimentReport report("estimate", Json{{"degrees_n", ds.size()}, {"N", ds.total()}, {"mc", to_json(mc)}});
  const Estimate p = estimate_prob_simple(ds, mc.replicates, mc.seed, mc.threads);
  const double prediction = prob_simple_asymptotic(SurrogateModel::build(ds));
  report.add_estimate("prob_simple", p);
  report.add_exact("prob_simple_asymptotic", prediction);
  if (ds.total() <= exact_cap) {
    const double exact = enumerate_exact(ds, exact_cap).prob_simple;
    report.add_exact("prob_simple_exact", exact);
    const bool ok = (p.std_error == 0.0) ? p.value == exact : std::abs(p.value - exact) <= 4.0 * p.std_error;
    report.add_verdict("matches_exact", ok, "|p_hat - exact| <= 4 se");
  } else {
    const double tol = std::max(4.0 * p.std_error, 10.0 / static_cast<double>(ds.size()));
    report.add_verdict("matches_prediction", std::abs(p.value - prediction) <= tol,
                       "|p_hat - prediction| <= max(4 se, 10/n) = " + format_double(tol));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Moment gap: |E Z^m - E Zh^m| across sizes

struct MomentGapConfig {
  std::vector<int> orders{1, 2, 3};
  std::vector<std::int64_t> sizes;
  MonteCarloConfig mc;
  /// Slope verdict threshold on the log-log fit.
  double slope_threshold = -0.4;
  /// Largest allowed max/min of sum d^2 / N across sizes.
  double assumption_factor = 4.0;
  /// Largest allowed max/min of gap * sqrt(N) for orders computed in closed form.
  double bounded_ratio_limit = 3.0;
  int bootstrap = 1000;
};

inline ExperimentReport moment_gap_study(const DegreeFamily& family, const MomentGapConfig& cfg) {
  if (cfg.sizes.size() < 2) throw Error(ErrorKind::InvalidArgument, "moment gap study needs >= 2 sizes");
  for (int m : cfg.orders) {
    if (m < 1 || m > kDefaultMaxOrder) throw Error(ErrorKind::OrderTooHigh, "order " + std::to_string(m));
  }
  Json config{{"family", family.spec().to_string()},
              {"size_key", family.size_key()},
              {"sizes", cfg.sizes},
              {"orders", cfg.orders},
              {"mc", to_json(cfg.mc)},
              {"slope_threshold", cfg.slope_threshold},
              {"bootstrap", cfg.bootstrap}};
  ExperimentReport report("moment-gap", std::move(config));

  const int max_order = *std::max_element(cfg.orders.begin(), cfg.orders.end());
  const bool needs_mc = std::any_of(cfg.orders.begin(), cfg.orders.end(), [](int m) { return m >= 2; });

  struct SizePoint {
    std::int64_t total;
    std::vector<double> zhat;
    double exact_mean;
    Histogram hist;
  };
  std::vector<SizePoint> points;
  double ratio_min = INFINITY;
  double ratio_max = 0.0;
  for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
    const DegreeSequence ds = family.at(cfg.sizes[k]);
    const double ratio = static_cast<double>(ds.sum_squares()) / static_cast<double>(ds.total());
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    SizePoint pt{ds.total(), zhat_moments(SurrogateModel::build(ds), max_order), exact_mean_z(ds), {}};
    if (needs_mc) {
      pt.hist = z_histogram(ds, {derive_seed(cfg.mc.seed, k), cfg.mc.replicates, cfg.mc.threads});
    }
    report.add_exact("sum_d2_over_N@" + std::to_string(ds.total()), ratio);
    points.push_back(std::move(pt));
  }
  if (ratio_max > cfg.assumption_factor * ratio_min) {
    throw Error(ErrorKind::AssumptionViolated,
                "sum d^2 / N ranges over [" + format_double(ratio_min) + ", " + format_double(ratio_max) + "]");
  }

  for (int m : cfg.orders) {
    const std::string tag = "m=" + std::to_string(m);
    const bool closed_form = (m == 1);
    std::vector<double> log_n;
    std::vector<double> log_gap;
    std::vector<double> gaps;
    bool all_zero_within_noise = true;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& pt = points[k];
      const std::string at = tag + "@N=" + std::to_string(pt.total);
      const double zhat = pt.zhat[m - 1];
      report.add_exact("E_Zhat^" + at, zhat);
      double gap = 0.0;
      double gap_se = 0.0;
      if (closed_form) {
        report.add_exact("E_Z^" + at, pt.exact_mean);
        gap = std::abs(pt.exact_mean - zhat);
        report.add_exact("gap_" + at, gap);
        report.add_exact("gap_sqrtN_" + at, gap * std::sqrt(static_cast<double>(pt.total)));
        if (gap > 1e-12 * std::max(1.0, zhat)) all_zero_within_noise = false;
      } else {
        Estimate ez = histogram_moment(pt.hist, m, derive_seed(cfg.mc.seed, k));
        report.add_estimate("E_Z^" + at, ez);
        gap = std::abs(ez.value - zhat);
        gap_se = ez.std_error;
        report.add_estimate("gap_" + at, {gap, gap_se, ez.replicates, ez.seed});
        if (gap > 2.0 * gap_se) all_zero_within_noise = false;
      }
      gaps.push_back(gap);
      if (gap > 0.0) {
        log_n.push_back(std::log(static_cast<double>(pt.total)));
        log_gap.push_back(std::log(gap));
      }
    }

    if (log_n.size() < 2) {
      report.add_verdict("slope_" + tag, all_zero_within_noise, "gaps indistinguishable from 0");
      continue;
    }
    const double slope = least_squares_slope(log_n, log_gap);
    double ci_low = slope;
    double ci_high = slope;
    if (!closed_form) {
      std::vector<double> boot;
      boot.reserve(static_cast<std::size_t>(cfg.bootstrap));
      auto rng = Xoshiro256ss::stream(cfg.mc.seed, Domain::Bootstrap, static_cast<std::uint64_t>(m));
      for (int b = 0; b < cfg.bootstrap; ++b) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& pt : points) {
          const double g = std::abs(histogram_moment(resample(pt.hist, rng), m).value - pt.zhat[m - 1]);
          if (g > 0.0) {
            xs.push_back(std::log(static_cast<double>(pt.total)));
            ys.push_back(std::log(g));
          }
        }
        if (xs.size() >= 2) boot.push_back(least_squares_slope(xs, ys));
      }
      ci_low = quantile(boot, 0.025);
      ci_high = quantile(boot, 0.975);
    }
    report.add_exact("slope_" + tag, slope);
    report.add_exact("slope_ci_low_" + tag, ci_low);
    report.add_exact("slope_ci_high_" + tag, ci_high);
    const bool slope_ok = slope <= cfg.slope_threshold && (closed_form || ci_high < 0.0);
    report.add_verdict("slope_" + tag, slope_ok || all_zero_within_noise,
                       "slope " + format_double(slope) + " <= " + format_double(cfg.slope_threshold) +
                           (closed_form ? "" : " with CI excluding 0") + ", or gaps indistinguishable from 0");
    if (closed_form) {
      double lo = INFINITY;
      double hi = 0.0;
      for (std::size_t k = 0; k < points.size(); ++k) {
        const double scaled = gaps[k] * std::sqrt(static_cast<double>(points[k].total));
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
      }
      const double spread = lo > 0.0 ? hi / lo : INFINITY;
      report.add_exact("gap_sqrtN_spread_" + tag, spread);
      report.add_verdict("gap_sqrtN_bounded_" + tag, spread < cfg.bounded_ratio_limit || all_zero_within_noise,
                         "max/min of gap*sqrt(N) = " + format_double(spread) + " < " +
                             format_double(cfg.bounded_ratio_limit));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Total variation between Z and Zh

struct TvEstimate {
  double tv = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Bootstrap mean minus the plug-in value; plug-in TV is biased upward.
  double bias = 0.0;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
};

inline TvEstimate tv_distance_estimate(const DegreeSequence& ds, std::int64_t replicates, std::uint64_t seed,
                                       unsigned threads = 1, int bootstrap = 1000) {
  if (replicates < 10000) throw Error(ErrorKind::InvalidArgument, "TV estimate needs >= 10^4 replicates");
  const MonteCarloConfig mc{seed, replicates, threads};
  const Histogram z = z_histogram(ds, mc);
  const Histogram zhat = zhat_histogram(SurrogateModel::build(ds), mc);
  TvEstimate out;
  out.tv = total_variation(z, zhat);
  out.replicates = replicates;
  out.seed = seed;
  std::vector<double> boot;
  boot.reserve(static_cast<std::size_t>(bootstrap));
  auto rng = Xoshiro256ss::stream(seed, Domain::Bootstrap, 0);
  for (int b = 0; b < bootstrap; ++b) boot.push_back(total_variation(resample(z, rng), resample(zhat, rng)));
  if (!boot.empty()) {
    out.ci_low = quantile(boot, 0.025);
    out.ci_high = quantile(boot, 0.975);
    out.bias = std::accumulate(boot.begin(), boot.end(), 0.0) / static_cast<double>(boot.size()) - out.tv;
  } else {
    out.ci_low = out.ci_high = out.tv;
  }
  return out;
}

struct TvStudyConfig {
  std::vector<std::int64_t> sizes;
  MonteCarloConfig mc;
  int bootstrap = 1000;
};

/// TV across sizes; passes if no estimate exceeds the upper CI of the
/// previous (smaller) size.
inline ExperimentReport tv_study(const DegreeFamily& family, const TvStudyConfig& cfg) {
  ExperimentReport report("tv", Json{{"family", family.spec().to_string()},
                                     {"size_key", family.size_key()},
                                     {"sizes", cfg.sizes},
                                     {"mc", to_json(cfg.mc)},
                                     {"bootstrap", cfg.bootstrap}});
  report.add_note("plug-in TV is biased upward at finite samples; see bias_* entries");
  std::vector<TvEstimate> results;
  for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
    const DegreeSequence ds = family.at(cfg.sizes[k]);
    const auto tv = tv_distance_estimate(ds, cfg.mc.replicates, derive_seed(cfg.mc.seed, k), cfg.mc.threads,
                                         cfg.bootstrap);
    const std::string at = "@" + family.size_key() + "=" + std::to_string(cfg.sizes[k]);
    report.add_estimate("tv" + at, {tv.tv, (tv.ci_high - tv.ci_low) / 3.92, tv.replicates, tv.seed});
    report.add_exact("tv_ci_low" + at, tv.ci_low);
    report.add_exact("tv_ci_high" + at, tv.ci_high);
    report.add_exact("bias" + at, tv.bias);
    results.push_back(tv);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].tv > results[k - 1].ci_high) monotone = false;
  }
  report.add_verdict("tv_decreasing", monotone, "tv_hat[k+1] <= ci_high[k] for consecutive sizes");
  return report;
}

// ---------------------------------------------------------------------------
// Dichotomy sweep

struct FamilyCase {
  DegreeFamily family;
  /// Whether sum d^2 / N stays bounded along the family.
  bool bounded;
};

struct DichotomyConfig {
  std::vector<std::int64_t> sizes;
  MonteCarloConfig mc;
  /// Floor for bounded families; if unset, half the smallest prediction.
  std::optional<double> bounded_floor;
  /// Bound on p_hat at the largest size for unbounded families.
  double unbounded_ceiling = 0.01;
};

inline ExperimentReport dichotomy_sweep(const std::vector<FamilyCase>& families, const DichotomyConfig& cfg) {
  Json fams = Json::array();
  for (const auto& f : families) fams.push_back({{"family", f.family.spec().to_string()}, {"bounded", f.bounded}});
  ExperimentReport report("dichotomy", Json{{"families", fams}, {"sizes", cfg.sizes}, {"mc", to_json(cfg.mc)}});
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& fc = families[f];
    const std::string name = fc.family.spec().to_string();
    std::vector<double> p_hat;
    std::vector<double> predictions;
    bool predictions_match = true;
    for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
      const DegreeSequence ds = fc.family.at(cfg.sizes[k]);
      const std::uint64_t seed = derive_seed(cfg.mc.seed, f * 1000 + k);
      const Estimate p = estimate_prob_simple(ds, cfg.mc.replicates, seed, cfg.mc.threads);
      const auto model = SurrogateModel::build(ds);
      const double pred = prob_simple_asymptotic(model);
      const std::string at = name + "@N=" + std::to_string(ds.total());
      report.add_estimate("p_hat:" + at, p);
      report.add_exact("prediction:" + at, pred);
      report.add_exact("sum_d2_over_N:" + at,
                       static_cast<double>(ds.sum_squares()) / static_cast<double>(ds.total()));
      report.add_exact("exp_minus_sum_lambda_i:" + at, std::exp(-model.sum_lambda_i()));
      p_hat.push_back(p.value);
      predictions.push_back(pred);
      const double tol = std::max(4.0 * p.std_error, 10.0 / static_cast<double>(ds.size()));
      if (std::abs(p.value - pred) > tol) predictions_match = false;
    }
    if (fc.bounded) {
      const double floor =
          cfg.bounded_floor.value_or(0.5 * *std::min_element(predictions.begin(), predictions.end()));
      const double lowest = *std::min_element(p_hat.begin(), p_hat.end());
      report.add_verdict("floor:" + name, lowest >= floor,
                         "min p_hat " + format_double(lowest) + " >= " + format_double(floor));
      report.add_verdict("prediction:" + name, predictions_match, "|p_hat - prediction| <= max(4 se, 10/n)");
    } else {
      report.add_verdict("vanishing:" + name, p_hat.back() < cfg.unbounded_ceiling,
                         "p_hat at largest size " + format_double(p_hat.back()) + " < " +
                             format_double(cfg.unbounded_ceiling));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Vertex splitting

inline ExperimentReport splitting_comparison(const DegreeSequence& ds, double bound_factor,
                                             const MonteCarloConfig& mc) {
  const DegreeSequence split = make_split(ds, bound_factor);
  ExperimentReport report("split", Json{{"degrees_n", ds.size()},
                                        {"N", ds.total()},
                                        {"A", bound_factor},
                                        {"split_n", split.size()},
                                        {"mc", to_json(mc)}});
  const Estimate raw = estimate_prob_simple(ds, mc.replicates, mc.seed, mc.threads);
  const Estimate split_p = (split == ds)
                               ? raw
                               : estimate_prob_simple(split, mc.replicates, derive_seed(mc.seed, 1), mc.threads);
  report.add_estimate("p_hat_raw", raw);
  report.add_estimate("p_hat_split", split_p);
  report.add_exact("sum_d2_over_N_raw", static_cast<double>(ds.sum_squares()) / static_cast<double>(ds.total()));
  report.add_exact("sum_d2_over_N_split",
                   static_cast<double>(split.sum_squares()) / static_cast<double>(split.total()));
  report.add_exact("split_loop_bound", std::exp(-static_cast<double>(split.sum_d2()) /
                                                (2.0 * static_cast<double>(split.total()))));
  report.add_exact("limit_bound", std::exp(-(bound_factor - 1.0) / 2.0));
  const double slack = 4.0 * std::hypot(raw.std_error, split_p.std_error);
  report.add_verdict("monotone", raw.value <= split_p.value + slack,
                     "p_hat_raw <= p_hat_split + 4 * combined se (" + format_double(slack) + ")");
  return report;
}

// ---------------------------------------------------------------------------
// Bipartite conditions

struct BipartiteConditions {
  /// (sum s(s-1)) (sum t(t-1)) / N^2.
  double r1 = 0.0;
  /// Tail ratios for m = 1..m_max: sum_{i >= min(t, m)} s_(i) / N and symmetric.
  std::vector<double> tail_s;
  std::vector<double> tail_t;
};

inline BipartiteConditions bipartite_condition_values(const BipartiteDegreePair& bp, int m_max) {
  std::vector<Degree> s(bp.s().begin(), bp.s().end());
  std::vector<Degree> t(bp.t().begin(), bp.t().end());
  std::sort(s.begin(), s.end(), std::greater<>());
  std::sort(t.begin(), t.end(), std::greater<>());
  const auto n = static_cast<long double>(bp.total());
  long double fs = 0.0L;
  long double ft = 0.0L;
  for (Degree d : s) fs += static_cast<long double>(d) * (d - 1);
  for (Degree d : t) ft += static_cast<long double>(d) * (d - 1);
  BipartiteConditions out;
  out.r1 = n > 0 ? static_cast<double>(fs * ft / (n * n)) : 0.0;
  auto tail = [&](const std::vector<Degree>& seq, Degree other_max, int m) {
    // 1-based start index min(other_max, m); an index below 1 reads as 1.
    const std::int64_t start = std::max<std::int64_t>(1, std::min<std::int64_t>(other_max, m));
    long double sum = 0.0L;
    for (std::size_t i = static_cast<std::size_t>(start - 1); i < seq.size(); ++i) sum += seq[i];
    return n > 0 ? static_cast<double>(sum / n) : 0.0;
  };
  for (int m = 1; m <= m_max; ++m) {
    out.tail_s.push_back(tail(s, t.front(), m));
    out.tail_t.push_back(tail(t, s.front(), m));
  }
  return out;
}

struct BipartiteConfig {
  int m_max = 3;
  MonteCarloConfig mc;
  /// Finite-size proxy for the O(N^2) condition on r1.
  double r1_limit = 10.0;
  /// Finite-size proxy for Omega(N) on the tail ratios.
  double omega_threshold = 0.05;
  /// P(simple) threshold separating "bounded away from 0" from "vanishing".
  double simple_floor = 0.05;
  /// The product-form prediction is compared when max(s, t) <= this * N.
  double applicable_fraction = 0.1;
};

inline ExperimentReport bipartite_conditions(const BipartiteDegreePair& bp, const BipartiteConfig& cfg) {
  ExperimentReport report("bipartite", Json{{"n_left", bp.s().size()},
                                            {"n_right", bp.t().size()},
                                            {"N", bp.total()},
                                            {"m_max", cfg.m_max},
                                            {"mc", to_json(cfg.mc)}});
  const auto cond = bipartite_condition_values(bp, cfg.m_max);
  report.add_exact("r1", cond.r1);
  bool tails_ok = true;
  for (int m = 1; m <= cfg.m_max; ++m) {
    report.add_exact("tail_s_m=" + std::to_string(m), cond.tail_s[m - 1]);
    report.add_exact("tail_t_m=" + std::to_string(m), cond.tail_t[m - 1]);
    if (cond.tail_s[m - 1] < cfg.omega_threshold || cond.tail_t[m - 1] < cfg.omega_threshold) tails_ok = false;
  }
  const bool conditions_hold = cond.r1 <= cfg.r1_limit && tails_ok;
  report.add_exact("conditions_hold", conditions_hold ? 1.0 : 0.0);

  const Estimate p = estimate_prob_simple(bp, cfg.mc.replicates, cfg.mc.seed, cfg.mc.threads);
  const double prediction = prob_simple_asymptotic(SurrogateModel::build(bp));
  report.add_estimate("prob_simple", p);
  report.add_exact("prediction", prediction);
  report.add_verdict("dichotomy_consistent", conditions_hold == (p.value >= cfg.simple_floor),
                     std::string("conditions ") + (conditions_hold ? "hold" : "fail") + ", p_hat " +
                         format_double(p.value) + " vs floor " + format_double(cfg.simple_floor));
  const Degree s_max = *std::max_element(bp.s().begin(), bp.s().end());
  const Degree t_max = *std::max_element(bp.t().begin(), bp.t().end());
  if (static_cast<double>(std::max(s_max, t_max)) <= cfg.applicable_fraction * static_cast<double>(bp.total())) {
    const bool ok = p.std_error == 0.0 ? p.value == prediction : std::abs(p.value - prediction) <= 4.0 * p.std_error;
    report.add_verdict("prediction_match", ok, "|p_hat - product-form prediction| <= 4 se");
  } else {
    report.add_note("max degree is not small relative to N; product-form prediction reported only");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Oracle suite: Monte Carlo and closed forms against exhaustive enumeration

/// All nonincreasing positive integer lists summing to `total`.
inline std::vector<std::vector<Degree>> partitions(std::int64_t total) {
  std::vector<std::vector<Degree>> out;
  std::vector<Degree> current;
  std::function<void(std::int64_t, Degree)> rec = [&](std::int64_t rest, Degree cap) {
    if (rest == 0) {
      out.push_back(current);
      return;
    }
    for (Degree d = std::min<Degree>(cap, rest); d >= 1; --d) {
      current.push_back(d);
      rec(rest - d, d);
      current.pop_back();
    }
  };
  rec(total, total);
  return out;
}

inline bool close_relative(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-300 || std::abs(a - b) <= tol * scale;
}

struct OracleConfig {
  std::int64_t max_total = 10;
  std::int64_t max_bipartite_total = 5;
  MonteCarloConfig mc;
  double relative_tolerance = 1e-10;
};

/// Per-sequence checks: Monte Carlo P(simple) within 4 se of the exact value;
/// E X_i, E (X_i)_2, E Y_ij and E Z closed forms against enumeration.
inline ExperimentReport oracle_check(const OracleConfig& cfg) {
  ExperimentReport report("oracle", Json{{"max_N", cfg.max_total},
                                         {"max_bipartite_N", cfg.max_bipartite_total},
                                         {"mc", to_json(cfg.mc)},
                                         {"relative_tolerance", cfg.relative_tolerance}});
  std::uint64_t tag = 0;
  auto mc_check = [&](const std::string& label, const Estimate& p, double exact) {
    report.add_estimate(label + ":p_hat", p);
    report.add_exact(label + ":p_exact", exact);
    const bool ok = p.std_error == 0.0 ? p.value == exact : std::abs(p.value - exact) <= 4.0 * p.std_error;
    report.add_verdict(label + ":mc", ok, "|p_hat - exact| <= 4 se");
  };

  for (std::int64_t total = 2; total <= cfg.max_total; total += 2) {
    for (auto& degrees : partitions(total)) {
      const auto ds = DegreeSequence::validate(degrees);
      const std::string label = sequence_label(ds.degrees());
      const std::size_t n = ds.size();
      // Enumeration-side expectations.
      std::vector<long double> ex(n, 0.0L);
      std::vector<long double> ex2(n, 0.0L);
      std::vector<long double> ey(n * n, 0.0L);
      std::map<std::int64_t, std::uint64_t> counts;
      const auto leaves = for_each_matching(
          ds,
          [&](const MatchingState& s) {
            ++counts[s.z()];
            for (Vertex i = 0; i < n; ++i) {
              const auto x = s.loop_count(i);
              ex[i] += x;
              ex2[i] += x * (x - 1);
              for (Vertex j = i + 1; j < n; ++j) {
                const auto m = s.edges_between(i, j);
                ey[i * n + j] += m * (m - 1) / 2;
              }
            }
          },
          cfg.max_total);
      const auto exact = detail::summarize(leaves, counts, 1);

      bool formulas_ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        formulas_ok &= close_relative(exact_EX_i(ds, i), static_cast<double>(ex[i] / leaves), cfg.relative_tolerance);
        formulas_ok &= close_relative(exact_factorial_EX_i(ds, i, 1), static_cast<double>(ex[i] / leaves),
                                      cfg.relative_tolerance);
        if (total >= 4) {
          formulas_ok &= close_relative(exact_factorial_EX_i(ds, i, 2), static_cast<double>(ex2[i] / leaves),
                                        cfg.relative_tolerance);
          for (std::size_t j = i + 1; j < n; ++j) {
            formulas_ok &= close_relative(exact_EY_ij(ds, i, j), static_cast<double>(ey[i * n + j] / leaves),
                                          cfg.relative_tolerance);
          }
        }
      }
      formulas_ok &= close_relative(exact_mean_z(ds), exact.moments[0], cfg.relative_tolerance);
      report.add_verdict(label + ":closed_forms", formulas_ok, "E X_i, E (X_i)_2, E Y_ij, E Z vs enumeration");

      const Estimate p = estimate_prob_simple(ds, cfg.mc.replicates, derive_seed(cfg.mc.seed, tag++), cfg.mc.threads);
      mc_check(label, p, exact.prob_simple);
    }
  }

  for (std::int64_t total = 1; total <= cfg.max_bipartite_total; ++total) {
    const auto parts = partitions(total);
    for (const auto& s : parts) {
      for (const auto& t : parts) {
        const auto bp = BipartiteDegreePair::validate(s, t);
        const std::string label = "s=" + sequence_label(bp.s()) + ",t=" + sequence_label(bp.t());
        const auto exact = enumerate_exact(bp, cfg.max_bipartite_total, 1);
        const Estimate p =
            estimate_prob_simple(bp, cfg.mc.replicates, derive_seed(cfg.mc.seed, tag++), cfg.mc.threads);
        mc_check(label, p, exact.prob_simple);
      }
    }
  }
  return report;
}

}  // namespace cfgsimple
