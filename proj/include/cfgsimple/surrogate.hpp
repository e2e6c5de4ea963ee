// surrogate.hpp - the Poisson surrogate for the collision count Z.
//
// Each vertex i contributes an independent loop count Xh_i ~ Po(lambda_i) and
// each vertex pair an independent multiplicity Xh_ij ~ Po(lambda_ij); the
// surrogate is Zh = sum Xh_i + sum_{i<j} C(Xh_ij, 2). Terms with equal rates
// are grouped, so every operation here costs O(#distinct degrees^2) rather
// than O(n^2).
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfgsimple/degrees.hpp"
#include "cfgsimple/error.hpp"
#include "cfgsimple/rng.hpp"

namespace cfgsimple {

/// Highest moment order the polynomial tables support.
inline constexpr int kMaxSupportedOrder = 10;
/// Default cap for `zhat_moment`; recursions are exact but float cancellation
/// grows with the order.
inline constexpr int kDefaultMaxOrder = 6;

/// lambda_i = d(d-1) / (2N).
inline double lambda_loop(Degree d, std::int64_t total) {
  return static_cast<double>(d * (d - 1)) / (2.0 * static_cast<double>(total));
}

/// lambda_ij = sqrt(d_i(d_i-1) d_j(d_j-1)) / N.
inline double lambda_pair(Degree a, Degree b, std::int64_t total) {
  const long double fa = static_cast<long double>(a) * (a - 1);
  const long double fb = static_cast<long double>(b) * (b - 1);
  const long double root = (a == b) ? fa : std::sqrt(fa * fb);
  return static_cast<double>(root / static_cast<long double>(total));
}

/// lambda - log(1 + lambda), with a series below 1e-4 where the direct form
/// cancels.
inline double lambda_minus_log1p(double lambda) {
  if (lambda < 1e-4) {
    // l^2/2 - l^3/3 + l^4/4 - l^5/5; the next term is below 1e-24 relative.
    const double l = lambda;
    return l * l * (0.5 - l * (1.0 / 3.0 - l * (0.25 - l * 0.2)));
  }
  return lambda - std::log1p(lambda);
}

/// P(Po(lambda) >= 2), accurate for small lambda.
inline double poisson_tail2(double lambda) {
  if (lambda <= 0.0) return 0.0;
  if (lambda >= 1.0) return 1.0 - std::exp(-lambda) * (1.0 + lambda);
  double term = lambda * lambda / 2.0;
  double sum = 0.0;
  for (int k = 2; term > 1e-18 * sum || k == 2; ++k) {
    sum += term;
    term *= lambda / (k + 1);
  }
  return std::exp(-lambda) * sum;
}

// ---------------------------------------------------------------------------
// Moment machinery

/// Stirling numbers of the second kind S(n, k) for n, k <= kMaxSupportedOrder.
inline const std::array<std::array<std::int64_t, kMaxSupportedOrder + 1>, kMaxSupportedOrder + 1>&
stirling2_table() {
  static const auto table = [] {
    std::array<std::array<std::int64_t, kMaxSupportedOrder + 1>, kMaxSupportedOrder + 1> s{};
    s[0][0] = 1;
    for (int n = 1; n <= kMaxSupportedOrder; ++n) {
      for (int k = 1; k <= n; ++k) s[n][k] = k * s[n - 1][k] + s[n - 1][k - 1];
    }
    return s;
  }();
  return table;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// E X^k for k = 1..m from the factorial moments E(X)_1..E(X)_m.
inline std::vector<double> moments_from_factorial(std::span<const double> factorial_moments) {
  const auto m = static_cast<int>(factorial_moments.size());
  if (m > kMaxSupportedOrder) throw Error(ErrorKind::OrderTooHigh, "at most 10 moments supported");
  const auto& s = stirling2_table();
  std::vector<double> moments(static_cast<std::size_t>(m), 0.0);
  for (int k = 1; k <= m; ++k) {
    double sum = 0.0;
    for (int j = 1; j <= k; ++j) sum += static_cast<double>(s[k][j]) * factorial_moments[j - 1];
    moments[k - 1] = sum;
  }
  return moments;
}

/// Cumulants kappa_1..kappa_m from raw moments mu_1..mu_m.
inline std::vector<double> moments_to_cumulants(std::span<const double> moments) {
  const auto m = static_cast<int>(moments.size());
  std::vector<double> kappa(static_cast<std::size_t>(m), 0.0);
  auto mu = [&](int k) { return k == 0 ? 1.0 : moments[k - 1]; };
  for (int n = 1; n <= m; ++n) {
    double sum = mu(n);
    for (int k = 1; k < n; ++k) {
      sum -= static_cast<double>(binomial(n - 1, k - 1)) * kappa[k - 1] * mu(n - k);
    }
    kappa[n - 1] = sum;
  }
  return kappa;
}

/// Raw moments mu_1..mu_m from cumulants kappa_1..kappa_m.
inline std::vector<double> cumulants_to_moments(std::span<const double> cumulants) {
  const auto m = static_cast<int>(cumulants.size());
  std::vector<double> mu(static_cast<std::size_t>(m + 1), 0.0);
  mu[0] = 1.0;
  for (int n = 1; n <= m; ++n) {
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) {
      sum += static_cast<double>(binomial(n - 1, k - 1)) * cumulants[k - 1] * mu[n - k];
    }
    mu[n] = sum;
  }
  return {mu.begin() + 1, mu.end()};
}

/// E(X)_k = lambda^k for X ~ Po(lambda).
inline double poisson_factorial_moment(int k, double lambda) { return std::pow(lambda, k); }

namespace detail {

/// Coefficients c_0..c_{2m} with (C(x,2))_m = sum_k c_k (x)_k, so that
/// h_m(lambda) = sum_k c_k lambda^k. Computed from forward differences at 0.
inline std::vector<long double> hm_coefficients(int m) {
  const int degree = 2 * m;
  std::vector<__int128> values(static_cast<std::size_t>(degree + 1));
  for (int x = 0; x <= degree; ++x) {
    const __int128 pairs = static_cast<__int128>(x) * (x - 1) / 2;
    __int128 falling = 1;
    for (int r = 0; r < m; ++r) falling *= (pairs - r);
    values[x] = falling;
  }
  std::vector<long double> coeffs(static_cast<std::size_t>(degree + 1), 0.0L);
  long double factorial = 1.0L;
  for (int k = 0; k <= degree; ++k) {
    if (k > 0) factorial *= k;
    __int128 diff = 0;
    for (int i = 0; i <= k; ++i) {
      __int128 c = binomial(k, i);
      diff += ((k - i) % 2 == 0 ? c : -c) * values[i];
    }
    coeffs[k] = static_cast<long double>(diff) / factorial;
  }
  return coeffs;
}

inline const std::vector<long double>& hm_table(int m) {
  static const auto tables = [] {
    std::vector<std::vector<long double>> t(kMaxSupportedOrder + 1);
    for (int k = 1; k <= kMaxSupportedOrder; ++k) t[k] = hm_coefficients(k);
    return t;
  }();
  return tables[m];
}

}  // namespace detail

/// Largest rate accepted by the h_m evaluators.
inline constexpr double kMaxLambda = 100.0;

/// h_m(lambda) = E(Y)_m for Y = C(X,2), X ~ Po(lambda). Evaluated from the
/// exact polynomial of degree 2m (nonnegative coefficients, Horner form).
inline double h_m(int m, double lambda) {
  if (m < 1 || m > kMaxSupportedOrder) throw Error(ErrorKind::OrderTooHigh, "h_m order out of range");
  if (!(lambda >= 0.0) || lambda > kMaxLambda) {
    throw Error(ErrorKind::InvalidArgument, "h_m rate must lie in [0, 100]");
  }
  const auto& c = detail::hm_table(m);
  long double acc = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * lambda + *it;
  return static_cast<double>(acc);
}

/// h_m by the Poisson series sum_{j>=3} (C(j,2))_m lambda^j/j! e^{-lambda}
/// (from j = 2 when m = 1), summed until the terms are decreasing and below
/// 1e-16 of the partial sum. Independent of the polynomial route above.
inline double h_m_series(int m, double lambda) {
  if (m < 1 || m > kMaxSupportedOrder) throw Error(ErrorKind::OrderTooHigh, "h_m order out of range");
  if (!(lambda >= 0.0) || lambda > kMaxLambda) {
    throw Error(ErrorKind::InvalidArgument, "h_m rate must lie in [0, 100]");
  }
  if (lambda == 0.0) return 0.0;
  const int start = (m == 1) ? 2 : 3;
  // p_j = e^{-lambda} lambda^j / j!
  long double p = std::exp(-static_cast<long double>(lambda));
  for (int j = 1; j <= start; ++j) p *= static_cast<long double>(lambda) / j;
  long double sum = 0.0L;
  long double previous = 0.0L;
  for (int j = start;; ++j) {
    const long double pairs = static_cast<long double>(j) * (j - 1) / 2.0L;
    long double falling = 1.0L;
    for (int r = 0; r < m; ++r) falling *= (pairs - r);
    const long double term = falling * p;
    sum += term;
    if (j > start && term <= previous && term < 1e-17L * sum) break;
    if (j > 10000) break;
    previous = term;
    p *= static_cast<long double>(lambda) / (j + 1);
  }
  return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// Model

/// `multiplicity` independent surrogate terms sharing the rate `lambda`.
struct TermGroup {
  double lambda = 0.0;
  std::int64_t multiplicity = 0;

  friend bool operator==(const TermGroup&, const TermGroup&) = default;
};

class SurrogateModel {
 public:
  static SurrogateModel build(const DegreeSequence& ds) {
    SurrogateModel model;
    model.total_ = ds.total();
    model.lambda_i_.reserve(ds.size());
    for (Degree d : ds.degrees()) model.lambda_i_.push_back(lambda_loop(d, ds.total()));
    for (auto [d, count] : ds.degree_counts()) {
      if (d >= 2) model.degree_groups_.emplace(d, count);
    }
    for (auto a = model.degree_groups_.begin(); a != model.degree_groups_.end(); ++a) {
      model.loop_terms_.push_back({lambda_loop(a->first, model.total_), a->second});
      for (auto b = a; b != model.degree_groups_.end(); ++b) {
        const std::int64_t mult = (a == b) ? a->second * (a->second - 1) / 2 : a->second * b->second;
        if (mult > 0) model.pair_terms_.push_back({lambda_pair(a->first, b->first, model.total_), mult});
      }
    }
    return model;
  }

  static SurrogateModel build(const BipartiteDegreePair& bp) {
    SurrogateModel model;
    model.total_ = bp.total();
    model.bipartite_ = true;
    std::map<Degree, std::int64_t> left;
    std::map<Degree, std::int64_t> right;
    for (Degree d : bp.s()) {
      if (d >= 2) ++left[d];
    }
    for (Degree d : bp.t()) {
      if (d >= 2) ++right[d];
    }
    model.degree_groups_ = left;
    model.right_groups_ = right;
    for (auto [a, ca] : left) {
      for (auto [b, cb] : right) model.pair_terms_.push_back({lambda_pair(a, b, model.total_), ca * cb});
    }
    return model;
  }

  /// Model made of explicit term groups (used to split a model into parts).
  static SurrogateModel from_terms(std::int64_t total, std::vector<TermGroup> loop_terms,
                                   std::vector<TermGroup> pair_terms) {
    SurrogateModel model;
    model.total_ = total;
    model.loop_terms_ = std::move(loop_terms);
    model.pair_terms_ = std::move(pair_terms);
    return model;
  }

  std::int64_t total() const noexcept { return total_; }
  bool bipartite() const noexcept { return bipartite_; }

  /// Per-vertex loop rates (empty for bipartite models and from_terms models).
  std::span<const double> lambda_i() const noexcept { return lambda_i_; }
  /// degree value >= 2 -> number of vertices (left side for bipartite models).
  const std::map<Degree, std::int64_t>& degree_groups() const noexcept { return degree_groups_; }
  /// Right-side groups of a bipartite model.
  const std::map<Degree, std::int64_t>& right_groups() const noexcept { return right_groups_; }

  std::span<const TermGroup> loop_terms() const noexcept { return loop_terms_; }
  std::span<const TermGroup> pair_terms() const noexcept { return pair_terms_; }

  double sum_lambda_i() const {
    double sum = 0.0;
    for (const auto& g : loop_terms_) sum += static_cast<double>(g.multiplicity) * g.lambda;
    return sum;
  }

  double sum_lambda_ij() const {
    double sum = 0.0;
    for (const auto& g : pair_terms_) sum += static_cast<double>(g.multiplicity) * g.lambda;
    return sum;
  }

  double sum_lambda_ij_sq() const {
    double sum = 0.0;
    for (const auto& g : pair_terms_) sum += static_cast<double>(g.multiplicity) * g.lambda * g.lambda;
    return sum;
  }

 private:
  SurrogateModel() = default;

  std::int64_t total_ = 0;
  bool bipartite_ = false;
  std::vector<double> lambda_i_;
  std::map<Degree, std::int64_t> degree_groups_;
  std::map<Degree, std::int64_t> right_groups_;
  std::vector<TermGroup> loop_terms_;
  std::vector<TermGroup> pair_terms_;
};

/// log P(Zh = 0) = -sum lambda_i - sum (lambda_ij - log(1 + lambda_ij)).
/// Bipartite models have no loop terms and sum over all left-right pairs.
inline double log_prob_simple_asymptotic(const SurrogateModel& model) {
  double exponent = 0.0;
  for (const auto& g : model.loop_terms()) exponent -= static_cast<double>(g.multiplicity) * g.lambda;
  for (const auto& g : model.pair_terms()) {
    exponent -= static_cast<double>(g.multiplicity) * lambda_minus_log1p(g.lambda);
  }
  return exponent;
}

inline double prob_simple_asymptotic(const SurrogateModel& model) {
  return std::exp(log_prob_simple_asymptotic(model));
}

/// Raw moments of a single loop term Xh ~ Po(lambda), orders 1..m.
inline std::vector<double> loop_term_moments(double lambda, int m) {
  std::vector<double> fm(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) fm[k - 1] = poisson_factorial_moment(k, lambda);
  return moments_from_factorial(fm);
}

/// Raw moments of a single pair term Yh = C(Xh, 2), orders 1..m.
inline std::vector<double> pair_term_moments(double lambda, int m) {
  std::vector<double> fm(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) fm[k - 1] = h_m(k, lambda);
  return moments_from_factorial(fm);
}

/// Cumulants kappa_1..kappa_m of Zh, summed over all independent terms.
inline std::vector<double> zhat_cumulants(const SurrogateModel& model, int max_order) {
  std::vector<double> total(static_cast<std::size_t>(max_order), 0.0);
  auto accumulate = [&](const TermGroup& g, const std::vector<double>& moments) {
    const auto kappa = moments_to_cumulants(moments);
    for (int k = 0; k < max_order; ++k) total[k] += static_cast<double>(g.multiplicity) * kappa[k];
  };
  for (const auto& g : model.loop_terms()) {
    if (g.lambda > 0.0) accumulate(g, loop_term_moments(g.lambda, max_order));
  }
  for (const auto& g : model.pair_terms()) {
    if (g.lambda > 0.0) accumulate(g, pair_term_moments(g.lambda, max_order));
  }
  return total;
}

/// E Zh^1 .. E Zh^max_order.
inline std::vector<double> zhat_moments(const SurrogateModel& model, int max_order = kDefaultMaxOrder) {
  if (max_order < 1 || max_order > kMaxSupportedOrder) {
    throw Error(ErrorKind::OrderTooHigh, "moment order " + std::to_string(max_order) + " unsupported");
  }
  return cumulants_to_moments(zhat_cumulants(model, max_order));
}

/// E Zh^order; refuses orders above `max_order` (default 6).
inline double zhat_moment(const SurrogateModel& model, int order, int max_order = kDefaultMaxOrder) {
  if (order < 0 || order > max_order || max_order > kMaxSupportedOrder) {
    throw Error(ErrorKind::OrderTooHigh,
                "order " + std::to_string(order) + " exceeds limit " + std::to_string(max_order));
  }
  if (order == 0) return 1.0;
  return zhat_moments(model, order).back();
}

/// Draws Zh. Loop counts are drawn as their Poisson sum; for each pair
/// group of K terms the number of terms with Xh >= 2 is Binomial(K, P(Po >= 2))
/// and each such term is drawn from Po(lambda) conditioned on >= 2.
class ZhatSampler {
 public:
  explicit ZhatSampler(const SurrogateModel& model) {
    const double loop_rate = model.sum_lambda_i();
    if (loop_rate > 0.0) loops_.emplace(loop_rate);
    for (const auto& g : model.pair_terms()) {
      const double q = poisson_tail2(g.lambda);
      if (q <= 0.0 || g.multiplicity == 0) continue;
      groups_.push_back({g.lambda, q, std::binomial_distribution<std::int64_t>(g.multiplicity, q)});
    }
  }

  template <class Rng>
  std::int64_t operator()(Rng& rng) {
    std::int64_t z = 0;
    if (loops_) z += (*loops_)(rng);
    for (auto& g : groups_) {
      const std::int64_t hits = g.count(rng);
      for (std::int64_t k = 0; k < hits; ++k) {
        const std::int64_t x = conditioned_draw(g, rng);
        z += x * (x - 1) / 2;
      }
    }
    return z;
  }

 private:
  struct Group {
    double lambda;
    double tail;
    std::binomial_distribution<std::int64_t> count;
  };

  template <class Rng>
  static std::int64_t conditioned_draw(const Group& g, Rng& rng) {
    const double u = uniform_unit(rng) * g.tail;
    double p = std::exp(-g.lambda) * g.lambda * g.lambda / 2.0;
    double acc = 0.0;
    for (std::int64_t k = 2;; ++k) {
      acc += p;
      if (u < acc || p == 0.0) return k;
      p *= g.lambda / static_cast<double>(k + 1);
    }
  }

  std::optional<std::poisson_distribution<std::int64_t>> loops_;
  std::vector<Group> groups_;
};

/// One draw of Zh from the stream (seed, Surrogate, 0).
inline std::int64_t sample_zhat(const SurrogateModel& model, std::uint64_t seed) {
  auto rng = Xoshiro256ss::stream(seed, Domain::Surrogate, 0);
  ZhatSampler sampler(model);
  return sampler(rng);
}

}  // namespace cfgsimple
