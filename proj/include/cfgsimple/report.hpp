// report.hpp - experiment reports and their JSON / tidy-CSV serialization.
#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cfgsimple/error.hpp"

namespace cfgsimple {

using Json = nlohmann::ordered_json;

/// A Monte Carlo estimate with its standard error and provenance.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

/// Results of one experiment. Entries keep insertion order so serialized
/// output is stable.
class ExperimentReport {
 public:
  explicit ExperimentReport(std::string experiment, Json config = Json::object())
      : experiment_(std::move(experiment)), config_(std::move(config)) {}

  const std::string& experiment() const noexcept { return experiment_; }
  const Json& config() const noexcept { return config_; }
  Json& config() noexcept { return config_; }

  void add_estimate(std::string name, Estimate e) { estimates_.emplace_back(std::move(name), e); }
  void add_exact(std::string name, double value) { exact_.emplace_back(std::move(name), value); }
  void add_verdict(std::string name, bool pass, std::string detail) {
    verdicts_.emplace_back(std::move(name), Verdict{pass, std::move(detail)});
  }
  void add_note(std::string note) { notes_.push_back(std::move(note)); }

  const std::vector<std::pair<std::string, Estimate>>& estimates() const noexcept { return estimates_; }
  const std::vector<std::pair<std::string, double>>& exact_refs() const noexcept { return exact_; }
  const std::vector<std::pair<std::string, Verdict>>& verdicts() const noexcept { return verdicts_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }

  const Estimate& estimate(const std::string& name) const { return find(estimates_, name); }
  double exact(const std::string& name) const { return find(exact_, name); }
  const Verdict& verdict(const std::string& name) const { return find(verdicts_, name); }

  bool passed() const {
    for (const auto& [name, v] : verdicts_) {
      if (!v.pass) return false;
    }
    return true;
  }

  /// Appends all entries of `other`, prefixing names with `prefix`.
  void merge(const ExperimentReport& other, const std::string& prefix) {
    for (const auto& [k, v] : other.estimates_) estimates_.emplace_back(prefix + k, v);
    for (const auto& [k, v] : other.exact_) exact_.emplace_back(prefix + k, v);
    for (const auto& [k, v] : other.verdicts_) verdicts_.emplace_back(prefix + k, v);
    for (const auto& n : other.notes_) notes_.push_back(prefix + n);
  }

 private:
  template <class T>
  static const T& find(const std::vector<std::pair<std::string, T>>& items, const std::string& name) {
    for (const auto& [k, v] : items) {
      if (k == name) return v;
    }
    throw Error(ErrorKind::InvalidArgument, "report has no entry '" + name + "'");
  }

  std::string experiment_;
  Json config_;
  std::vector<std::pair<std::string, Estimate>> estimates_;
  std::vector<std::pair<std::string, double>> exact_;
  std::vector<std::pair<std::string, Verdict>> verdicts_;
  std::vector<std::string> notes_;
};

/// Shortest round-trip decimal form.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline Json to_json(const ExperimentReport& report) {
  Json out;
  out["experiment"] = report.experiment();
  out["config"] = report.config();
  Json estimates = Json::object();
  for (const auto& [name, e] : report.estimates()) {
    estimates[name] = {{"value", e.value}, {"std_error", e.std_error}, {"replicates", e.replicates}, {"seed", e.seed}};
  }
  out["estimates"] = std::move(estimates);
  Json exact = Json::object();
  for (const auto& [name, v] : report.exact_refs()) exact[name] = v;
  out["exact_refs"] = std::move(exact);
  Json verdicts = Json::object();
  for (const auto& [name, v] : report.verdicts()) verdicts[name] = {{"pass", v.pass}, {"detail", v.detail}};
  out["verdicts"] = std::move(verdicts);
  out["notes"] = report.notes();
  out["passed"] = report.passed();
  return out;
}

/// Tidy CSV: one row per estimate, exact reference, and verdict.
inline void write_csv(std::ostream& out, const ExperimentReport& report) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  out << "experiment,kind,name,value,std_error,replicates,seed,detail\n";
  const std::string& exp = report.experiment();
  for (const auto& [name, e] : report.estimates()) {
    out << exp << ",estimate," << quote(name) << ',' << format_double(e.value) << ','
        << format_double(e.std_error) << ',' << e.replicates << ',' << e.seed << ",\n";
  }
  for (const auto& [name, v] : report.exact_refs()) {
    out << exp << ",exact," << quote(name) << ',' << format_double(v) << ",,,,\n";
  }
  for (const auto& [name, v] : report.verdicts()) {
    out << exp << ",verdict," << quote(name) << ',' << (v.pass ? 1 : 0) << ",,,," << quote(v.detail) << '\n';
  }
}

}  // namespace cfgsimple
