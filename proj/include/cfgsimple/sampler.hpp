// sampler.hpp - configuration-model pairings and the collision statistic Z.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "cfgsimple/degrees.hpp"
#include "cfgsimple/error.hpp"
#include "cfgsimple/rng.hpp"
#include "cfgsimple/surrogate.hpp"

namespace cfgsimple {

using HalfEdge = std::uint32_t;
using Vertex = std::uint32_t;

/// Half-edge ownership. Half-edges of vertex v are the contiguous range
/// [offset(v), offset(v+1)). For a bipartite layout the left vertices come
/// first (0..n'-1, half-edges 0..N-1) followed by the right side.
class HalfEdgeLayout {
 public:
  static std::shared_ptr<const HalfEdgeLayout> of(const DegreeSequence& ds) {
    return std::make_shared<const HalfEdgeLayout>(ds.degrees(), std::span<const Degree>{}, false);
  }

  static std::shared_ptr<const HalfEdgeLayout> of(const BipartiteDegreePair& bp) {
    return std::make_shared<const HalfEdgeLayout>(bp.s(), bp.t(), true);
  }

  HalfEdgeLayout(std::span<const Degree> first, std::span<const Degree> second, bool bipartite)
      : bipartite_(bipartite), left_vertices_(first.size()) {
    std::int64_t total = 0;
    for (Degree d : first) total += d;
    left_half_edges_ = static_cast<std::size_t>(total);
    for (Degree d : second) total += d;
    if (total >= static_cast<std::int64_t>(std::numeric_limits<HalfEdge>::max())) {
      throw Error(ErrorKind::TooLarge, "more than 2^32 half-edges");
    }
    offsets_.reserve(first.size() + second.size() + 1);
    owner_.reserve(static_cast<std::size_t>(total));
    Vertex v = 0;
    for (auto side : {first, second}) {
      for (Degree d : side) {
        offsets_.push_back(static_cast<HalfEdge>(owner_.size()));
        owner_.insert(owner_.end(), static_cast<std::size_t>(d), v);
        ++v;
      }
    }
    offsets_.push_back(static_cast<HalfEdge>(owner_.size()));
  }

  std::size_t num_half_edges() const noexcept { return owner_.size(); }
  std::size_t num_vertices() const noexcept { return offsets_.size() - 1; }
  bool bipartite() const noexcept { return bipartite_; }
  /// Number of left-side vertices (all vertices for a general layout).
  std::size_t left_vertices() const noexcept { return bipartite_ ? left_vertices_ : num_vertices(); }
  std::size_t left_half_edges() const noexcept { return left_half_edges_; }

  Vertex owner(HalfEdge h) const { return owner_[h]; }
  std::span<const Vertex> owners() const noexcept { return owner_; }
  HalfEdge offset(Vertex v) const { return offsets_[v]; }
  std::int64_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

 private:
  bool bipartite_;
  std::size_t left_vertices_;
  std::size_t left_half_edges_ = 0;
  std::vector<HalfEdge> offsets_;
  std::vector<Vertex> owner_;
};

/// A perfect matching of half-edges: a fixed-point-free involution.
class Pairing {
 public:
  Pairing(std::shared_ptr<const HalfEdgeLayout> layout, std::vector<HalfEdge> match)
      : layout_(std::move(layout)), match_(std::move(match)) {}

  const HalfEdgeLayout& layout() const noexcept { return *layout_; }
  std::span<const HalfEdge> match() const noexcept { return match_; }
  HalfEdge partner(HalfEdge h) const { return match_[h]; }
  Vertex owner(HalfEdge h) const { return layout_->owner(h); }
  std::size_t size() const noexcept { return match_.size(); }

  /// match(match(h)) == h, match(h) != h, and bipartite pairings cross sides.
  bool is_valid() const {
    if (match_.size() != layout_->num_half_edges()) return false;
    const std::size_t left = layout_->left_half_edges();
    for (std::size_t h = 0; h < match_.size(); ++h) {
      const HalfEdge p = match_[h];
      if (p >= match_.size() || p == h || match_[p] != h) return false;
      if (layout_->bipartite() && ((h < left) == (p < left))) return false;
    }
    return true;
  }

  /// One (u, v) per edge, in order of the lower half-edge; loops are (u, u).
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(match_.size() / 2);
    for (std::size_t h = 0; h < match_.size(); ++h) {
      if (h < match_[h]) out.emplace_back(owner(static_cast<HalfEdge>(h)), owner(match_[h]));
    }
    return out;
  }

  friend bool operator==(const Pairing& a, const Pairing& b) { return a.match_ == b.match_; }

 private:
  std::shared_ptr<const HalfEdgeLayout> layout_;
  std::vector<HalfEdge> match_;
};

/// Reusable buffers for drawing many pairings over one layout.
class PairingSampler {
 public:
  explicit PairingSampler(std::shared_ptr<const HalfEdgeLayout> layout)
      : layout_(std::move(layout)), match_(layout_->num_half_edges()) {
    if (!layout_->bipartite()) {
      pool_.resize(layout_->num_half_edges());
      position_.resize(layout_->num_half_edges());
    }
  }

  const std::shared_ptr<const HalfEdgeLayout>& layout() const noexcept { return layout_; }

  /// Draws into the internal buffer and returns it.
  template <class Rng>
  std::span<const HalfEdge> draw(Rng& rng) {
    if (layout_->bipartite()) {
      draw_bipartite(rng);
    } else {
      draw_general(rng);
    }
    return match_;
  }

  template <class Rng>
  Pairing sample(Rng& rng) {
    draw(rng);
    return current();
  }

  /// The most recent draw.
  Pairing current() const { return Pairing(layout_, match_); }

 private:
  static constexpr HalfEdge kGone = std::numeric_limits<HalfEdge>::max();

  // The lowest unmatched half-edge is paired with a uniformly chosen other
  // unmatched half-edge. The free pool is a swap-remove array.
  template <class Rng>
  void draw_general(Rng& rng) {
    const auto n = static_cast<HalfEdge>(match_.size());
    for (HalfEdge h = 0; h < n; ++h) {
      pool_[h] = h;
      position_[h] = h;
    }
    std::size_t size = n;
    auto remove = [&](HalfEdge x) {
      const HalfEdge slot = position_[x];
      const HalfEdge last = pool_[--size];
      pool_[slot] = last;
      position_[last] = slot;
      position_[x] = kGone;
    };
    for (HalfEdge h = 0; h < n; ++h) {
      if (position_[h] == kGone) continue;
      remove(h);
      const HalfEdge p = pool_[uniform_below(rng, size)];
      remove(p);
      match_[h] = p;
      match_[p] = h;
    }
  }

  // Uniform bijection between left and right half-edges (Fisher-Yates).
  template <class Rng>
  void draw_bipartite(Rng& rng) {
    const auto left = static_cast<HalfEdge>(layout_->left_half_edges());
    for (HalfEdge i = 0; i < left; ++i) match_[i] = left + i;
    for (HalfEdge i = left; i > 1; --i) {
      const auto j = static_cast<HalfEdge>(uniform_below(rng, i));
      std::swap(match_[i - 1], match_[j]);
    }
    for (HalfEdge i = 0; i < left; ++i) match_[match_[i]] = i;
  }

  std::shared_ptr<const HalfEdgeLayout> layout_;
  std::vector<HalfEdge> match_;
  std::vector<HalfEdge> pool_;
  std::vector<HalfEdge> position_;
};

/// Uniform perfect matching of the half-edges of `ds`, keyed by `seed`.
inline Pairing sample_pairing(const DegreeSequence& ds, std::uint64_t seed) {
  PairingSampler sampler(HalfEdgeLayout::of(ds));
  auto rng = Xoshiro256ss::stream(seed, Domain::Pairing, 0);
  return sampler.sample(rng);
}

/// Uniform bijection between left and right half-edges of `bp`.
inline Pairing sample_bipartite_pairing(const BipartiteDegreePair& bp, std::uint64_t seed) {
  PairingSampler sampler(HalfEdgeLayout::of(bp));
  auto rng = Xoshiro256ss::stream(seed, Domain::Pairing, 0);
  return sampler.sample(rng);
}

// ---------------------------------------------------------------------------
// Collision statistics

/// Loops X_i and multiplicities X_ij of one pairing, plus
/// Z = sum X_i + sum_{i<j} C(X_ij, 2). Only nonzero entries are stored.
struct CollisionStats {
  std::map<Vertex, std::int64_t> loops;
  std::map<std::pair<Vertex, Vertex>, std::int64_t> multiplicity;
  std::int64_t y_total = 0;
  std::int64_t z = 0;
  bool simple = true;

  std::int64_t loop_count(Vertex v) const {
    auto it = loops.find(v);
    return it == loops.end() ? 0 : it->second;
  }

  std::int64_t edges_between(Vertex a, Vertex b) const {
    auto it = multiplicity.find(std::minmax(a, b));
    return it == multiplicity.end() ? 0 : it->second;
  }
};

inline CollisionStats collision_stats(const Pairing& p) {
  CollisionStats stats;
  const auto match = p.match();
  for (std::size_t h = 0; h < match.size(); ++h) {
    if (h > match[h]) continue;
    const Vertex u = p.owner(static_cast<HalfEdge>(h));
    const Vertex v = p.owner(match[h]);
    if (u == v) {
      ++stats.loops[u];
    } else {
      ++stats.multiplicity[std::minmax(u, v)];
    }
  }
  std::int64_t loops = 0;
  for (const auto& [v, x] : stats.loops) loops += x;
  for (const auto& [key, x] : stats.multiplicity) stats.y_total += x * (x - 1) / 2;
  stats.z = loops + stats.y_total;
  stats.simple = stats.z == 0;
  return stats;
}

/// Computes Z alone in O(N) with an O(n) scratch table; for Monte Carlo loops.
class CollisionCounter {
 public:
  explicit CollisionCounter(std::shared_ptr<const HalfEdgeLayout> layout)
      : layout_(std::move(layout)), stamp_(layout_->num_vertices(), kNone), count_(layout_->num_vertices(), 0) {}

  std::int64_t z(std::span<const HalfEdge> match) {
    const auto& layout = *layout_;
    const auto owners = layout.owners();
    std::int64_t loop_ends = 0;
    std::int64_t pairs = 0;
    const auto n = static_cast<Vertex>(layout.left_vertices());
    for (Vertex v = 0; v < n; ++v) {
      const HalfEdge end = layout.offset(v + 1);
      for (HalfEdge h = layout.offset(v); h < end; ++h) {
        const Vertex u = owners[match[h]];
        if (u == v) {
          ++loop_ends;
        } else if (u > v) {
          if (stamp_[u] != v) {
            stamp_[u] = v;
            count_[u] = 1;
          } else {
            pairs += count_[u]++;
          }
        }
      }
    }
    // Stamps are vertex ids, so a reset is needed between calls.
    std::fill(stamp_.begin(), stamp_.end(), kNone);
    return loop_ends / 2 + pairs;
  }

 private:
  static constexpr Vertex kNone = std::numeric_limits<Vertex>::max();

  std::shared_ptr<const HalfEdgeLayout> layout_;
  std::vector<Vertex> stamp_;
  std::vector<std::int64_t> count_;
};

// ---------------------------------------------------------------------------
// Rejection sampling of simple graphs

struct RejectionResult {
  Pairing pairing;
  std::int64_t tries;
};

/// 10 * ceil(1 / P(Zh = 0)), at least 1000.
inline std::int64_t default_max_tries(const DegreeSequence& ds) {
  const double p = prob_simple_asymptotic(SurrogateModel::build(ds));
  const double tries = 10.0 * std::ceil(1.0 / p);
  if (!(tries < 1e15)) return static_cast<std::int64_t>(1e15);
  return std::max<std::int64_t>(1000, static_cast<std::int64_t>(tries));
}

/// Draws pairings until one is simple. The induced simple graph is uniform
/// over simple graphs with degree sequence `ds`.
inline RejectionResult rejection_sample_simple(const DegreeSequence& ds, std::uint64_t seed,
                                               std::int64_t max_tries) {
  auto layout = HalfEdgeLayout::of(ds);
  PairingSampler sampler(layout);
  CollisionCounter counter(layout);
  auto rng = Xoshiro256ss::stream(seed, Domain::Rejection, 0);
  for (std::int64_t tries = 1; tries <= max_tries; ++tries) {
    if (counter.z(sampler.draw(rng)) == 0) return {sampler.current(), tries};
  }
  throw Error(ErrorKind::Exhausted, "no simple pairing within " + std::to_string(max_tries) + " tries");
}

inline RejectionResult rejection_sample_simple(const DegreeSequence& ds, std::uint64_t seed) {
  return rejection_sample_simple(ds, seed, default_max_tries(ds));
}

/// CSV edge list, one "u,v" line per edge; loops as "u,u".
inline void write_edge_list_csv(std::ostream& out, const Pairing& p) {
  for (const auto& [u, v] : p.edges()) out << u << ',' << v << '\n';
}

}  // namespace cfgsimple
