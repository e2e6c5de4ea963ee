// exact.hpp - ground truth at small N: exhaustive enumeration of pairings and
// closed-form finite-N expectations.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cfgsimple/degrees.hpp"
#include "cfgsimple/error.hpp"
#include "cfgsimple/sampler.hpp"

namespace cfgsimple {

inline constexpr std::int64_t kDefaultExactMaxN = 16;
inline constexpr std::int64_t kDefaultExactMaxBipartiteN = 10;

/// Multigraph state at an enumeration leaf.
class MatchingState {
 public:
  explicit MatchingState(std::size_t vertices)
      : n_(vertices), loops_(vertices, 0), mult_(vertices * vertices, 0) {}

  std::int64_t loop_count(Vertex v) const { return loops_[v]; }
  std::int64_t edges_between(Vertex a, Vertex b) const { return mult_[a * n_ + b]; }
  std::int64_t z() const noexcept { return z_; }
  std::size_t num_vertices() const noexcept { return n_; }

  void add(Vertex u, Vertex v) {
    if (u == v) {
      ++loops_[u];
      ++z_;
    } else {
      z_ += mult_[u * n_ + v];
      ++mult_[u * n_ + v];
      ++mult_[v * n_ + u];
    }
  }

  void remove(Vertex u, Vertex v) {
    if (u == v) {
      --loops_[u];
      --z_;
    } else {
      --mult_[u * n_ + v];
      --mult_[v * n_ + u];
      z_ -= mult_[u * n_ + v];
    }
  }

 private:
  std::size_t n_;
  std::vector<std::int64_t> loops_;
  std::vector<std::int64_t> mult_;
  std::int64_t z_ = 0;
};

namespace detail {

template <class Visitor>
void enumerate_general(const HalfEdgeLayout& layout, std::vector<bool>& used, MatchingState& state,
                       HalfEdge from, std::uint64_t& leaves, Visitor& visit) {
  const auto n = static_cast<HalfEdge>(used.size());
  HalfEdge h = from;
  while (h < n && used[h]) ++h;
  if (h == n) {
    ++leaves;
    visit(state);
    return;
  }
  used[h] = true;
  for (HalfEdge p = h + 1; p < n; ++p) {
    if (used[p]) continue;
    used[p] = true;
    state.add(layout.owner(h), layout.owner(p));
    enumerate_general(layout, used, state, h + 1, leaves, visit);
    state.remove(layout.owner(h), layout.owner(p));
    used[p] = false;
  }
  used[h] = false;
}

template <class Visitor>
void enumerate_bipartite(const HalfEdgeLayout& layout, std::vector<bool>& used, MatchingState& state,
                         HalfEdge left, std::uint64_t& leaves, Visitor& visit) {
  const auto split = static_cast<HalfEdge>(layout.left_half_edges());
  if (left == split) {
    ++leaves;
    visit(state);
    return;
  }
  for (HalfEdge r = 0; r < split; ++r) {
    if (used[r]) continue;
    used[r] = true;
    state.add(layout.owner(left), layout.owner(split + r));
    enumerate_bipartite(layout, used, state, left + 1, leaves, visit);
    state.remove(layout.owner(left), layout.owner(split + r));
    used[r] = false;
  }
}

inline void check_vertex_budget(const HalfEdgeLayout& layout) {
  if (layout.num_vertices() > 4096) throw Error(ErrorKind::TooLarge, "too many vertices for enumeration");
}

}  // namespace detail

/// Calls `visit(const MatchingState&)` once for each of the (N-1)!! perfect
/// matchings. Returns the number of matchings visited.
template <class Visitor>
std::uint64_t for_each_matching(const DegreeSequence& ds, Visitor&& visit,
                                std::int64_t max_total = kDefaultExactMaxN) {
  if (ds.total() > max_total) {
    throw Error(ErrorKind::TooLarge, "N = " + std::to_string(ds.total()) + " exceeds enumeration cap " +
                                         std::to_string(max_total));
  }
  auto layout = HalfEdgeLayout::of(ds);
  detail::check_vertex_budget(*layout);
  std::vector<bool> used(layout->num_half_edges(), false);
  MatchingState state(layout->num_vertices());
  std::uint64_t leaves = 0;
  detail::enumerate_general(*layout, used, state, 0, leaves, visit);
  return leaves;
}

/// Calls `visit` once for each of the N! bijections of a bipartite pair.
/// Right-side vertex j has id s.size() + j in the state.
template <class Visitor>
std::uint64_t for_each_bipartite_matching(const BipartiteDegreePair& bp, Visitor&& visit,
                                          std::int64_t max_total = kDefaultExactMaxBipartiteN) {
  if (bp.total() > max_total) {
    throw Error(ErrorKind::TooLarge, "N = " + std::to_string(bp.total()) + " exceeds enumeration cap " +
                                         std::to_string(max_total));
  }
  auto layout = HalfEdgeLayout::of(bp);
  detail::check_vertex_budget(*layout);
  std::vector<bool> used(layout->left_half_edges(), false);
  MatchingState state(layout->num_vertices());
  std::uint64_t leaves = 0;
  detail::enumerate_bipartite(*layout, used, state, 0, leaves, visit);
  return leaves;
}

/// Exact distribution of Z over all pairings.
struct ExactSummary {
  std::uint64_t num_matchings = 0;
  /// z -> number of pairings with that Z.
  std::map<std::int64_t, std::uint64_t> z_counts;
  double prob_simple = 0.0;
  std::map<std::int64_t, double> z_distribution;
  /// E Z^1 .. E Z^M.
  std::vector<double> moments;
};

namespace detail {

inline ExactSummary summarize(std::uint64_t total, std::map<std::int64_t, std::uint64_t> counts, int orders) {
  ExactSummary summary;
  summary.num_matchings = total;
  summary.z_counts = std::move(counts);
  summary.moments.assign(static_cast<std::size_t>(orders), 0.0);
  std::vector<long double> sums(static_cast<std::size_t>(orders), 0.0L);
  for (const auto& [z, count] : summary.z_counts) {
    summary.z_distribution[z] = static_cast<double>(count) / static_cast<double>(total);
    long double power = 1.0L;
    for (int m = 0; m < orders; ++m) {
      power *= static_cast<long double>(z);
      sums[m] += power * static_cast<long double>(count);
    }
  }
  for (int m = 0; m < orders; ++m) summary.moments[m] = static_cast<double>(sums[m] / total);
  auto zero = summary.z_counts.find(0);
  summary.prob_simple =
      zero == summary.z_counts.end() ? 0.0 : static_cast<double>(zero->second) / static_cast<double>(total);
  return summary;
}

}  // namespace detail

inline ExactSummary enumerate_exact(const DegreeSequence& ds, std::int64_t max_total = kDefaultExactMaxN,
                                    int orders = kDefaultMaxOrder) {
  std::map<std::int64_t, std::uint64_t> counts;
  const auto total = for_each_matching(ds, [&](const MatchingState& s) { ++counts[s.z()]; }, max_total);
  return detail::summarize(total, std::move(counts), orders);
}

inline ExactSummary enumerate_exact(const BipartiteDegreePair& bp,
                                    std::int64_t max_total = kDefaultExactMaxBipartiteN,
                                    int orders = kDefaultMaxOrder) {
  std::map<std::int64_t, std::uint64_t> counts;
  const auto total = for_each_bipartite_matching(bp, [&](const MatchingState& s) { ++counts[s.z()]; }, max_total);
  return detail::summarize(total, std::move(counts), orders);
}

// ---------------------------------------------------------------------------
// Closed forms

namespace detail {

inline void check_vertex(const DegreeSequence& ds, std::size_t i) {
  if (i >= ds.size()) throw Error(ErrorKind::InvalidArgument, "vertex " + std::to_string(i) + " out of range");
}

}  // namespace detail

/// E X_i = C(d_i, 2) / (N - 1).
inline double exact_EX_i(const DegreeSequence& ds, std::size_t i) {
  detail::check_vertex(ds, i);
  if (ds.total() < 2) throw Error(ErrorKind::TooSmall, "E X_i needs N >= 2");
  const Degree d = ds[i];
  return static_cast<double>(d * (d - 1) / 2) / static_cast<double>(ds.total() - 1);
}

/// E (X_i)_l = (d_i)_{2l} / (2^l (N-1)(N-3)...(N-2l+1)).
inline double exact_factorial_EX_i(const DegreeSequence& ds, std::size_t i, int ell) {
  detail::check_vertex(ds, i);
  if (ell < 0) throw Error(ErrorKind::InvalidArgument, "negative order");
  if (ds.total() < 2 * ell) throw Error(ErrorKind::TooSmall, "E (X_i)_l needs N >= 2l");
  const Degree d = ds[i];
  if (d < 2 * ell) return 0.0;
  long double value = 1.0L;
  for (int k = 0; k < 2 * ell; ++k) value *= static_cast<long double>(d - k);
  for (int k = 1; k <= ell; ++k) value /= 2.0L * static_cast<long double>(ds.total() - 2 * k + 1);
  return static_cast<double>(value);
}

/// E Y_ij = d_i d_j (d_i - 1)(d_j - 1) / (2 (N-1)(N-3)).
inline double exact_EY_ij(const DegreeSequence& ds, std::size_t i, std::size_t j) {
  detail::check_vertex(ds, i);
  detail::check_vertex(ds, j);
  if (i == j) throw Error(ErrorKind::SameVertex, "E Y_ij needs distinct vertices");
  if (ds.total() < 4) throw Error(ErrorKind::TooSmall, "E Y_ij needs N >= 4");
  const long double a = static_cast<long double>(ds[i]) * (ds[i] - 1);
  const long double b = static_cast<long double>(ds[j]) * (ds[j] - 1);
  const long double n = static_cast<long double>(ds.total());
  return static_cast<double>(a * b / (2.0L * (n - 1) * (n - 3)));
}

/// E Z = sum_i E X_i + sum_{i<j} E Y_ij, grouped by degree value.
inline double exact_mean_z(const DegreeSequence& ds) {
  const long double n = static_cast<long double>(ds.total());
  if (ds.total() < 2) return 0.0;
  const auto groups = ds.degree_counts();
  long double loops = 0.0L;
  long double pairs = 0.0L;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    const auto [da, ca] = groups[a];
    const long double fa = static_cast<long double>(da) * (da - 1);
    loops += ca * fa / 2.0L;
    for (std::size_t b = a; b < groups.size(); ++b) {
      const auto [db, cb] = groups[b];
      const long double fb = static_cast<long double>(db) * (db - 1);
      const long double mult = (a == b) ? static_cast<long double>(ca) * (ca - 1) / 2.0L
                                        : static_cast<long double>(ca) * cb;
      pairs += mult * fa * fb;
    }
  }
  long double mean = loops / (n - 1);
  if (ds.total() >= 4) mean += pairs / (2.0L * (n - 1) * (n - 3));
  return static_cast<double>(mean);
}

}  // namespace cfgsimple
