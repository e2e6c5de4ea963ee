// io.hpp - degree-sequence sources and JSON summaries of models and
// enumerations.
#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfgsimple/degrees.hpp"
#include "cfgsimple/error.hpp"
#include "cfgsimple/exact.hpp"
#include "cfgsimple/report.hpp"
#include "cfgsimple/surrogate.hpp"

namespace cfgsimple {

inline std::vector<Degree> parse_degree_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("invalid JSON degree list: ") + e.what());
  }
  if (!parsed.is_array()) throw Error(ErrorKind::Parse, "degree JSON must be an array of integers");
  std::vector<Degree> out;
  for (const auto& v : parsed) {
    if (!v.is_number_integer()) throw Error(ErrorKind::Parse, "degree JSON must be an array of integers");
    out.push_back(v.get<Degree>());
  }
  return out;
}

/// One degree per line; blank lines and lines starting with '#' are skipped.
inline std::vector<Degree> parse_degree_csv(std::istream& in) {
  std::vector<Degree> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r,");
    const std::string item = line.substr(first, last - first + 1);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing");
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad degree line '" + line + "'");
    }
  }
  return out;
}

/// Raw degree list from an inline JSON array, a .json / CSV file, or a
/// generator string such as "regular:n=1000,d=3".
inline std::vector<Degree> read_degree_list(const std::string& source) {
  const auto first = source.find_first_not_of(" \t");
  if (first != std::string::npos && source[first] == '[') return parse_degree_json(source);
  if (std::filesystem::is_regular_file(source)) {
    std::ifstream in(source);
    if (!in) throw Error(ErrorKind::Parse, "cannot open " + source);
    if (std::filesystem::path(source).extension() == ".json") {
      std::stringstream buf;
      buf << in.rdbuf();
      return parse_degree_json(buf.str());
    }
    return parse_degree_csv(in);
  }
  const auto ds = DegreeFamily::parse(source).build();
  return {ds.degrees().begin(), ds.degrees().end()};
}

inline DegreeSequence read_degree_sequence(const std::string& source) {
  return DegreeSequence::validate(read_degree_list(source));
}

inline void write_degree_csv(std::ostream& out, const DegreeSequence& ds) {
  for (Degree d : ds.degrees()) out << d << '\n';
}

inline Json degree_json(const DegreeSequence& ds) { return Json(std::vector<Degree>(ds.degrees().begin(), ds.degrees().end())); }

/// {N, sum_lambda_i, sum_lambda_ij_sq, prob_simple, moments[1..M]}.
inline Json surrogate_summary(const SurrogateModel& model, int max_order = kDefaultMaxOrder) {
  return Json{{"N", model.total()},
              {"sum_lambda_i", model.sum_lambda_i()},
              {"sum_lambda_ij_sq", model.sum_lambda_ij_sq()},
              {"prob_simple", prob_simple_asymptotic(model)},
              {"moments", zhat_moments(model, max_order)}};
}

/// {num_matchings, prob_simple, z_pmf: [[z, p], ...], moments: [...]}.
inline Json exact_summary_json(const ExactSummary& summary) {
  Json pmf = Json::array();
  for (const auto& [z, p] : summary.z_distribution) pmf.push_back(Json::array({z, p}));
  return Json{{"num_matchings", summary.num_matchings},
              {"prob_simple", summary.prob_simple},
              {"z_pmf", std::move(pmf)},
              {"moments", summary.moments}};
}

}  // namespace cfgsimple
