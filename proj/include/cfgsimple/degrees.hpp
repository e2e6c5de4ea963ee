// degrees.hpp - degree sequences, validation, and named generator families.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfgsimple/error.hpp"

namespace cfgsimple {

using Degree = std::int64_t;

/// A list of vertex degrees d_1..d_n with even total N = sum d_i.
///
/// Immutable once validated. Degree-0 vertices are allowed; they never carry
/// half-edges. No realizability check is done: the configuration model needs
/// only an even total.
class DegreeSequence {
 public:
  static DegreeSequence validate(std::vector<Degree> degrees) {
    if (degrees.empty()) throw Error(ErrorKind::Empty, "degree sequence is empty");
    DegreeSequence ds;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      const Degree d = degrees[i];
      if (d < 0) {
        throw Error(ErrorKind::NegativeDegree,
                    "degree " + std::to_string(d) + " at vertex " + std::to_string(i));
      }
      ds.total_ += d;
      ds.sum_d2_ += d * (d - 1);
      ds.max_degree_ = std::max(ds.max_degree_, d);
    }
    if (ds.total_ % 2 != 0) {
      throw Error(ErrorKind::OddSum, "sum of degrees " + std::to_string(ds.total_) + " is odd");
    }
    ds.degrees_ = std::move(degrees);
    return ds;
  }

  std::span<const Degree> degrees() const noexcept { return degrees_; }
  Degree operator[](std::size_t i) const { return degrees_[i]; }
  std::size_t size() const noexcept { return degrees_.size(); }

  /// N, the number of half-edges.
  std::int64_t total() const noexcept { return total_; }
  /// sum d_i (d_i - 1).
  std::int64_t sum_d2() const noexcept { return sum_d2_; }
  /// sum d_i^2.
  std::int64_t sum_squares() const noexcept { return sum_d2_ + total_; }
  Degree max_degree() const noexcept { return max_degree_; }

  /// (degree value, multiplicity), ascending by degree.
  std::vector<std::pair<Degree, std::int64_t>> degree_counts() const {
    std::map<Degree, std::int64_t> counts;
    for (Degree d : degrees_) ++counts[d];
    return {counts.begin(), counts.end()};
  }

  friend bool operator==(const DegreeSequence& a, const DegreeSequence& b) {
    return a.degrees_ == b.degrees_;
  }

 private:
  DegreeSequence() = default;

  std::vector<Degree> degrees_;
  std::int64_t total_ = 0;
  std::int64_t sum_d2_ = 0;
  Degree max_degree_ = 0;
};

/// Degree sequences (s_i) and (t_j) of the two sides of a bipartite
/// configuration model, with sum s = sum t = N.
class BipartiteDegreePair {
 public:
  static BipartiteDegreePair validate(std::vector<Degree> s, std::vector<Degree> t) {
    if (s.empty() || t.empty()) throw Error(ErrorKind::Empty, "bipartite side is empty");
    auto check = [](const std::vector<Degree>& side, const char* name) {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < side.size(); ++i) {
        if (side[i] < 0) {
          throw Error(ErrorKind::NegativeDegree, std::string("degree ") + std::to_string(side[i]) +
                                                     " at " + name + "[" + std::to_string(i) + "]");
        }
        sum += side[i];
      }
      return sum;
    };
    const std::int64_t sum_s = check(s, "s");
    const std::int64_t sum_t = check(t, "t");
    if (sum_s != sum_t) {
      throw Error(ErrorKind::SideMismatch,
                  "sum(s)=" + std::to_string(sum_s) + " != sum(t)=" + std::to_string(sum_t));
    }
    BipartiteDegreePair bp;
    bp.s_ = std::move(s);
    bp.t_ = std::move(t);
    bp.total_ = sum_s;
    return bp;
  }

  std::span<const Degree> s() const noexcept { return s_; }
  std::span<const Degree> t() const noexcept { return t_; }
  std::int64_t total() const noexcept { return total_; }

  friend bool operator==(const BipartiteDegreePair& a, const BipartiteDegreePair& b) {
    return a.s_ == b.s_ && a.t_ == b.t_;
  }

 private:
  BipartiteDegreePair() = default;

  std::vector<Degree> s_;
  std::vector<Degree> t_;
  std::int64_t total_ = 0;
};

// ---------------------------------------------------------------------------
// Generators

inline DegreeSequence make_regular(std::int64_t n, Degree d) {
  if (n <= 0) throw Error(ErrorKind::Empty, "regular family needs n >= 1");
  if (d < 0) throw Error(ErrorKind::NegativeDegree, "regular degree " + std::to_string(d));
  if ((n * d) % 2 != 0) {
    throw Error(ErrorKind::OddSum, "n*d = " + std::to_string(n * d) + " is odd");
  }
  return DegreeSequence::validate(std::vector<Degree>(static_cast<std::size_t>(n), d));
}

inline DegreeSequence make_ones(std::int64_t n) { return make_regular(n, 1); }

inline Degree integer_sqrt(std::int64_t x) {
  auto r = static_cast<Degree>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

/// Two vertices of degree floor(sqrt(N)) (one less if needed) plus degree-1
/// vertices carrying the remaining half-edges.
inline DegreeSequence make_heavy_pair(std::int64_t total) {
  if (total % 2 != 0) throw Error(ErrorKind::OddSum, "N = " + std::to_string(total) + " is odd");
  if (total < 4) throw Error(ErrorKind::TooSmall, "heavy pair needs N >= 4");
  Degree d = integer_sqrt(total);
  // The remainder N - 2d is even whenever N is, so only the sign can fail.
  if (total - 2 * d < 0) --d;
  if (d < 2) throw Error(ErrorKind::TooSmall, "no valid heavy pair for N = " + std::to_string(total));
  std::vector<Degree> degrees{d, d};
  degrees.resize(static_cast<std::size_t>(2 + (total - 2 * d)), 1);
  return DegreeSequence::validate(std::move(degrees));
}

/// `count = floor(fraction * N / degree)` vertices of the given degree, padded
/// with degree-1 vertices up to N half-edges.
inline DegreeSequence make_block(std::int64_t total, Degree degree, double fraction) {
  if (total % 2 != 0) throw Error(ErrorKind::OddSum, "N = " + std::to_string(total) + " is odd");
  if (total <= 0) throw Error(ErrorKind::TooSmall, "block family needs N >= 2");
  if (degree < 1 || degree > total) {
    throw Error(ErrorKind::InvalidArgument, "block degree must lie in [1, N]");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "block fraction must lie in (0, 1]");
  }
  const auto count = static_cast<std::int64_t>(
      std::floor(fraction * static_cast<double>(total) / static_cast<double>(degree)));
  std::vector<Degree> degrees(static_cast<std::size_t>(count), degree);
  degrees.resize(degrees.size() + static_cast<std::size_t>(total - count * degree), 1);
  if (degrees.empty()) throw Error(ErrorKind::TooSmall, "block family produced no vertices");
  return DegreeSequence::validate(std::move(degrees));
}

/// A single vertex holding all N half-edges (a bouquet of N/2 loops).
inline DegreeSequence make_star(std::int64_t total) {
  return DegreeSequence::validate({total});
}

/// Repeatedly replaces a maximum degree d_j by d_j - 1 and appends a new
/// degree-1 vertex until sum d_i^2 <= A N. N is unchanged. Ties between
/// maximum-degree vertices go to the lowest index.
inline DegreeSequence make_split(const DegreeSequence& base, double bound_factor) {
  if (!(bound_factor > 1.0)) throw Error(ErrorKind::InvalidArgument, "split factor A must exceed 1");
  const long double limit = static_cast<long double>(bound_factor) * base.total();
  std::int64_t sum_sq = base.sum_squares();
  if (static_cast<long double>(sum_sq) <= limit) return base;

  std::vector<Degree> degrees(base.degrees().begin(), base.degrees().end());
  // Max-heap on (degree, -index).
  std::priority_queue<std::pair<Degree, std::int64_t>> heap;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] >= 2) heap.emplace(degrees[i], -static_cast<std::int64_t>(i));
  }
  while (static_cast<long double>(sum_sq) > limit && !heap.empty()) {
    auto [d, neg_index] = heap.top();
    heap.pop();
    const auto i = static_cast<std::size_t>(-neg_index);
    degrees[i] = d - 1;
    if (d - 1 >= 2) heap.emplace(d - 1, neg_index);
    degrees.push_back(1);
    sum_sq -= 2 * d - 2;
  }
  return DegreeSequence::validate(std::move(degrees));
}

inline BipartiteDegreePair make_bipartite_regular(std::int64_t total, Degree d) {
  if (d <= 0 || total <= 0 || total % d != 0) {
    throw Error(ErrorKind::InvalidArgument, "bipartite regular family needs d | N");
  }
  std::vector<Degree> side(static_cast<std::size_t>(total / d), d);
  return BipartiteDegreePair::validate(side, side);
}

/// s_1 = N - ceil(sqrt N) with ceil(sqrt N) degree-1 companions;
/// t_1 = 2 with N - 2 degree-1 companions. Condition (i) holds, but a double
/// edge between the two hubs appears with high probability.
inline BipartiteDegreePair make_bipartite_counterexample(std::int64_t total) {
  if (total < 4) throw Error(ErrorKind::TooSmall, "counterexample needs N >= 4");
  Degree root = integer_sqrt(total);
  if (root * root < total) ++root;
  std::vector<Degree> s{total - root};
  s.resize(static_cast<std::size_t>(1 + root), 1);
  std::vector<Degree> t{2};
  t.resize(static_cast<std::size_t>(1 + total - 2), 1);
  return BipartiteDegreePair::validate(std::move(s), std::move(t));
}

// ---------------------------------------------------------------------------
// Generator mini-language: "name:key=val,key=val".

struct FamilySpec {
  std::string name;
  std::map<std::string, std::string> params;

  static FamilySpec parse(const std::string& text) {
    FamilySpec spec;
    const auto colon = text.find(':');
    spec.name = text.substr(0, colon);
    if (spec.name.empty()) throw Error(ErrorKind::Parse, "empty family name in '" + text + "'");
    if (colon == std::string::npos) return spec;
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!item.empty()) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw Error(ErrorKind::Parse, "expected key=value, got '" + item + "'");
        }
        spec.params[item.substr(0, eq)] = item.substr(eq + 1);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return spec;
  }

  std::string to_string() const {
    std::string out = name;
    char sep = ':';
    for (const auto& [k, v] : params) {
      out += sep;
      out += k + "=" + v;
      sep = ',';
    }
    return out;
  }

  bool has(const std::string& key) const { return params.count(key) != 0; }

  std::int64_t integer(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw Error(ErrorKind::Parse, "family '" + name + "' needs parameter " + key);
    try {
      std::size_t used = 0;
      const long long value = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return value;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "parameter " + key + "='" + it->second + "' is not an integer");
    }
  }

  double real(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
      std::size_t used = 0;
      const double value = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return value;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "parameter " + key + "='" + it->second + "' is not a number");
    }
  }
};

/// A named degree family. The size parameter (`size_key()`) is n for
/// vertex-counted families (regular, ones) and N for the others.
class DegreeFamily {
 public:
  explicit DegreeFamily(FamilySpec spec) : spec_(std::move(spec)) {
    static const char* known[] = {"regular", "ones", "heavy_pair", "star", "block", "power_block", "log_block"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return spec_.name == k; }) ==
        std::end(known)) {
      throw Error(ErrorKind::Parse, "unknown degree family '" + spec_.name + "'");
    }
  }

  static DegreeFamily parse(const std::string& text) { return DegreeFamily(FamilySpec::parse(text)); }

  const FamilySpec& spec() const noexcept { return spec_; }
  const std::string& name() const noexcept { return spec_.name; }

  std::string size_key() const {
    return (spec_.name == "regular" || spec_.name == "ones") ? "n" : "N";
  }

  /// Instance using the size parameter stored in the spec.
  DegreeSequence build() const { return at(spec_.integer(size_key())); }

  DegreeSequence at(std::int64_t size) const {
    const std::string& name = spec_.name;
    if (name == "regular") return make_regular(size, spec_.integer("d"));
    if (name == "ones") return make_ones(size);
    if (name == "heavy_pair") return make_heavy_pair(size);
    if (name == "star") return make_star(size);
    if (name == "block") return make_block(size, spec_.integer("d"), spec_.real("frac", 0.5));
    if (name == "power_block") {
      const double alpha = spec_.real("alpha", 0.6);
      const auto d = static_cast<Degree>(std::ceil(std::pow(static_cast<double>(size), alpha)));
      return make_block(size, d, spec_.real("frac", 0.5));
    }
    // log_block
    const auto d = static_cast<Degree>(std::ceil(std::log(static_cast<double>(size))));
    return make_block(size, std::max<Degree>(d, 2), spec_.real("frac", 0.5));
  }

 private:
  FamilySpec spec_;
};

/// Named bipartite families: "bi_regular:N=..,d=.." and "bi_counterexample:N=..".
class BipartiteFamily {
 public:
  explicit BipartiteFamily(FamilySpec spec) : spec_(std::move(spec)) {
    if (spec_.name != "bi_regular" && spec_.name != "bi_counterexample") {
      throw Error(ErrorKind::Parse, "unknown bipartite family '" + spec_.name + "'");
    }
  }

  static BipartiteFamily parse(const std::string& text) { return BipartiteFamily(FamilySpec::parse(text)); }

  const FamilySpec& spec() const noexcept { return spec_; }

  BipartiteDegreePair build() const { return at(spec_.integer("N")); }

  BipartiteDegreePair at(std::int64_t total) const {
    if (spec_.name == "bi_regular") return make_bipartite_regular(total, spec_.integer("d"));
    return make_bipartite_counterexample(total);
  }

 private:
  FamilySpec spec_;
};

}  // namespace cfgsimple
