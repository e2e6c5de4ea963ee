// cli.hpp - command-line front end. Kept in a header so that tests can run
// commands in-process; tools/cfgsimple.cpp is a thin main().
//
// Exit codes: 0 success / all verdicts pass, 1 a verdict failed,
// 2 usage or input error.
#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cfgsimple/cfgsimple.hpp"

namespace cfgsimple::cli {

inline constexpr const char* kStreamDoc =
    "xoshiro256** per replicate, keyed by splitmix64 over (seed, domain, replicate index); "
    "sub-experiments use derive_seed(seed, tag)";

inline unsigned default_threads() {
  if (const char* env = std::getenv("CFGSIMPLE_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Options {
  std::string degrees;
  bool bipartite = false;
  std::string s;
  std::string t;
  std::uint64_t seed = 1;
  std::int64_t replicates = 10000;
  unsigned threads = default_threads();
  std::string format = "json";
  std::string out;
  bool no_timestamp = false;
  int max_order = kDefaultMaxOrder;
  // sample
  std::string edges;
  // exact / oracle
  std::int64_t max_n = 10;
  std::int64_t max_bipartite_n = 5;
  // sweeps
  std::string family;
  std::string sizes;
  std::string orders = "1,2,3";
  std::vector<std::string> bounded;
  std::vector<std::string> unbounded;
  double split_factor = 2.0;
  int bootstrap = 1000;
  double slope_threshold = -0.4;
  double unbounded_ceiling = 0.01;
  std::optional<double> bounded_floor;
};

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing");
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad list item '" + item + "'");
    }
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Reproducibility header written into every output.
inline Json run_header(const std::string& command, const Options& o, Json extra = Json::object()) {
  Json run{{"command", command}, {"seed", o.seed}, {"replicates", o.replicates}, {"format", o.format}};
  if (!o.degrees.empty()) run["degrees"] = o.degrees;
  if (o.bipartite) {
    run["bipartite"] = true;
    run["s"] = o.s;
    run["t"] = o.t;
  }
  for (auto it = extra.begin(); it != extra.end(); ++it) run[it.key()] = it.value();
  run["streams"] = kStreamDoc;
  if (!o.no_timestamp) run["timestamp"] = utc_timestamp();
  return run;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::Parse, "cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

inline BipartiteDegreePair read_bipartite(const Options& o) {
  if (o.s.empty() || o.t.empty()) throw Error(ErrorKind::Parse, "--bipartite needs --s and --t");
  return BipartiteDegreePair::validate(read_degree_list(o.s), read_degree_list(o.t));
}

inline void emit_report(const ExperimentReport& report, const Json& run, const Options& o, std::ostream& os) {
  if (o.format == "csv") {
    os << "# run: " << run.dump() << '\n';
    write_csv(os, report);
  } else {
    Json doc{{"run", run}};
    doc.update(to_json(report));
    os << doc.dump(2) << '\n';
  }
}

inline int cmd_predict(const Options& o, std::ostream& os) {
  Json body;
  if (o.bipartite) {
    const auto bp = read_bipartite(o);
    const auto model = SurrogateModel::build(bp);
    body = surrogate_summary(model, o.max_order);
    body["bipartite"] = true;
  } else {
    const auto ds = read_degree_sequence(o.degrees);
    const auto model = SurrogateModel::build(ds);
    body = Json{{"N", ds.total()},
                {"n", ds.size()},
                {"sum_d2_over_N", static_cast<double>(ds.sum_squares()) / static_cast<double>(ds.total())},
                {"sum_lambda_i", model.sum_lambda_i()},
                {"sum_lambda_ij_sq", model.sum_lambda_ij_sq()},
                {"prob_simple_asymptotic", prob_simple_asymptotic(model)},
                {"moments", zhat_moments(model, o.max_order)}};
  }
  const Json run = run_header("predict", o);
  if (o.format == "csv") {
    os << "# run: " << run.dump() << '\n' << "key,value\n";
    for (auto it = body.begin(); it != body.end(); ++it) {
      if (it.value().is_array()) {
        for (std::size_t k = 0; k < it.value().size(); ++k) {
          os << it.key() << '[' << k + 1 << "]," << format_double(it.value()[k].get<double>()) << '\n';
        }
      } else if (it.value().is_number_float()) {
        os << it.key() << ',' << format_double(it.value().get<double>()) << '\n';
      } else {
        os << it.key() << ',' << it.value().dump() << '\n';
      }
    }
  } else {
    Json doc{{"run", run}};
    doc.update(body);
    os << doc.dump(2) << '\n';
  }
  return 0;
}

inline int cmd_sample(const Options& o, std::ostream& os) {
  std::shared_ptr<const HalfEdgeLayout> layout;
  if (o.bipartite) {
    layout = HalfEdgeLayout::of(read_bipartite(o));
  } else {
    layout = HalfEdgeLayout::of(read_degree_sequence(o.degrees));
  }
  if (o.replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");
  PairingSampler sampler(layout);
  std::optional<std::ofstream> edge_file;
  if (!o.edges.empty()) {
    edge_file.emplace(o.edges);
    if (!*edge_file) throw Error(ErrorKind::Parse, "cannot write " + o.edges);
    *edge_file << "replicate,u,v\n";
  }
  const Json run = run_header("sample", o, Json{{"edges", o.edges}});
  Json rows = Json::array();
  if (o.format == "csv") os << "# run: " << run.dump() << '\n' << "replicate,Z,simple\n";
  for (std::int64_t r = 0; r < o.replicates; ++r) {
    auto rng = Xoshiro256ss::stream(o.seed, Domain::Pairing, static_cast<std::uint64_t>(r));
    const Pairing p = sampler.sample(rng);
    const auto stats = collision_stats(p);
    const auto edges = p.edges();
    if (edge_file) {
      for (const auto& [u, v] : edges) *edge_file << r << ',' << u << ',' << v << '\n';
    }
    if (o.format == "csv") {
      os << r << ',' << stats.z << ',' << (stats.simple ? 1 : 0) << '\n';
    } else {
      Json e = Json::array();
      for (const auto& [u, v] : edges) e.push_back(Json::array({u, v}));
      rows.push_back(Json{{"replicate", r}, {"Z", stats.z}, {"simple", stats.simple}, {"edges", std::move(e)}});
    }
  }
  if (o.format != "csv") os << Json{{"run", run}, {"samples", std::move(rows)}}.dump(2) << '\n';
  return 0;
}

inline int cmd_exact(const Options& o, std::ostream& os) {
  const ExactSummary summary = o.bipartite ? enumerate_exact(read_bipartite(o), o.max_n, o.max_order)
                                           : enumerate_exact(read_degree_sequence(o.degrees), o.max_n, o.max_order);
  Json doc{{"run", run_header("exact", o, Json{{"max_N", o.max_n}})}};
  doc.update(exact_summary_json(summary));
  os << doc.dump(2) << '\n';
  return 0;
}

inline int cmd_verify(const std::string& experiment, const Options& o, std::ostream& os) {
  const MonteCarloConfig mc{o.seed, o.replicates, o.threads};
  std::optional<ExperimentReport> report;
  Json extra = Json::object();
  if (experiment == "oracle") {
    OracleConfig cfg;
    cfg.max_total = o.max_n;
    cfg.max_bipartite_total = o.max_bipartite_n;
    cfg.mc = mc;
    report = oracle_check(cfg);
  } else if (experiment == "estimate") {
    report = estimate_report(read_degree_sequence(o.degrees), mc);
  } else if (experiment == "moment-gap" || experiment == "moments") {
    MomentGapConfig cfg;
    cfg.orders = parse_list<int>(o.orders);
    cfg.sizes = parse_list<std::int64_t>(o.sizes);
    cfg.mc = mc;
    cfg.bootstrap = o.bootstrap;
    cfg.slope_threshold = o.slope_threshold;
    report = moment_gap_study(DegreeFamily::parse(o.family), cfg);
  } else if (experiment == "tv") {
    TvStudyConfig cfg;
    cfg.sizes = parse_list<std::int64_t>(o.sizes);
    cfg.mc = mc;
    cfg.bootstrap = o.bootstrap;
    report = tv_study(DegreeFamily::parse(o.family), cfg);
  } else if (experiment == "dichotomy") {
    std::vector<FamilyCase> cases;
    for (const auto& f : o.bounded) cases.push_back({DegreeFamily::parse(f), true});
    for (const auto& f : o.unbounded) cases.push_back({DegreeFamily::parse(f), false});
    if (cases.empty()) throw Error(ErrorKind::Parse, "dichotomy needs --bounded and/or --unbounded families");
    DichotomyConfig cfg;
    cfg.sizes = parse_list<std::int64_t>(o.sizes);
    cfg.mc = mc;
    cfg.bounded_floor = o.bounded_floor;
    cfg.unbounded_ceiling = o.unbounded_ceiling;
    report = dichotomy_sweep(cases, cfg);
  } else if (experiment == "split") {
    report = splitting_comparison(read_degree_sequence(o.degrees), o.split_factor, mc);
  } else if (experiment == "bipartite") {
    BipartiteConfig cfg;
    cfg.mc = mc;
    cfg.m_max = o.max_order;
    BipartiteDegreePair bp = (!o.family.empty()) ? BipartiteFamily::parse(o.family).build() : read_bipartite(o);
    report = bipartite_conditions(bp, cfg);
  } else {
    throw Error(ErrorKind::Parse, "unknown experiment '" + experiment + "'");
  }
  emit_report(*report, run_header("verify " + experiment, o, report->config()), o, os);
  return report->passed() ? 0 : 1;
}

/// Runs one command; writes results to `out` (or --out) and errors to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Configuration-model multigraphs: sampling, simplicity prediction, verification"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--degrees", o.degrees, "JSON array, file path, or generator such as regular:n=1000,d=3");
    sub->add_flag("--bipartite", o.bipartite, "Use the bipartite degree pair given by --s and --t");
    sub->add_option("--s", o.s, "Left degree sequence (bipartite)");
    sub->add_option("--t", o.t, "Right degree sequence (bipartite)");
    sub->add_option("--seed", o.seed, "Run seed");
    sub->add_option("-r,--replicates", o.replicates, "Monte Carlo replicates");
    sub->add_option("--threads", o.threads, "Worker threads (default: $CFGSIMPLE_THREADS or all cores)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", o.out, "Output file (default stdout)");
    sub->add_flag("--no-timestamp", o.no_timestamp, "Omit the timestamp from the run header");
    sub->add_option("-M,--max-order", o.max_order, "Highest moment order / bipartite m_max");
  };

  auto* predict = app.add_subcommand("predict", "Surrogate prediction of P(simple)");
  add_common(predict);
  auto* sample = app.add_subcommand("sample", "Sample pairings; one summary row per replicate");
  add_common(sample);
  sample->add_option("--edges", o.edges, "Write edge lists (replicate,u,v) to this CSV file");
  auto* exact = app.add_subcommand("exact", "Enumerate all pairings of a small degree sequence");
  add_common(exact);
  exact->add_option("--maxN", o.max_n, "Refuse sequences with more half-edges");

  auto* verify = app.add_subcommand("verify", "Run a verification experiment");
  std::string experiment;
  verify->add_option("experiment", experiment, "oracle | estimate | moment-gap | tv | dichotomy | split | bipartite")
      ->required();
  add_common(verify);
  verify->add_option("--maxN", o.max_n, "Oracle: largest N for general sequences");
  verify->add_option("--maxN-bipartite", o.max_bipartite_n, "Oracle: largest N for bipartite pairs");
  verify->add_option("--family", o.family, "Degree family, e.g. regular:d=3");
  verify->add_option("--sizes", o.sizes, "Comma-separated values of the family size parameter");
  verify->add_option("-m,--orders", o.orders, "Moment orders for moment-gap");
  verify->add_option("--bounded", o.bounded, "Dichotomy: family with bounded sum d^2/N (repeatable)");
  verify->add_option("--unbounded", o.unbounded, "Dichotomy: family with unbounded sum d^2/N (repeatable)");
  verify->add_option("--bounded-floor", o.bounded_floor, "Dichotomy: floor for bounded families");
  verify->add_option("--unbounded-ceiling", o.unbounded_ceiling, "Dichotomy: ceiling for unbounded families");
  verify->add_option("-A,--split-factor", o.split_factor, "Split: bound factor A > 1");
  verify->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples");
  verify->add_option("--slope-threshold", o.slope_threshold, "Moment-gap: slope verdict threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (o.threads == 0) o.threads = 1;
    if (!o.bipartite && o.degrees.empty() && (*predict || *sample || *exact)) {
      throw Error(ErrorKind::Parse, "--degrees is required");
    }
    Output output(o.out, out);
    std::ostream& os = output.stream();
    if (*predict) return cmd_predict(o, os);
    if (*sample) return cmd_sample(o, os);
    if (*exact) return cmd_exact(o, os);
    return cmd_verify(experiment, o, os);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cfgsimple::cli
