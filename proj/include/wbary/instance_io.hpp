#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wbary/error.hpp"
#include "wbary/instance.hpp"

namespace wbary {

enum class InstanceFormat { json, csv };

/// Picks the format from the file extension; anything but ".csv" is JSON.
inline InstanceFormat guess_format(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? InstanceFormat::csv : InstanceFormat::json;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline double parse_real(std::string_view field, std::size_t line) {
  std::string text(field);
  const auto first = text.find_first_not_of(" \t\r");
  const auto last = text.find_last_not_of(" \t\r");
  if (first == std::string::npos) throw InstanceError("empty field on line " + std::to_string(line));
  text = text.substr(first, last - first + 1);
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw InstanceError("cannot parse '" + text + "' as a number on line " + std::to_string(line));
  return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos) lines.pop_back();
  return lines;
}

}  // namespace detail

/// Parses a one-column weights CSV. A non-numeric first line is a header.
inline std::vector<double> parse_weights_csv(std::string_view text) {
  std::vector<double> weights;
  const auto lines = detail::data_lines(text);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto fields = detail::split_csv(lines[r]);
    if (r == 0) {
      std::string head(fields[0]);
      char* end = nullptr;
      std::strtod(head.c_str(), &end);
      if (end == head.c_str()) continue;
    }
    weights.push_back(detail::parse_real(fields[0], r + 1));
  }
  return weights;
}

inline Instance parse_instance_json(std::string_view text, std::vector<double> weights = {},
                                    BuildOptions opts = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(std::string("JSON parse failure: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("measures") || !doc["measures"].is_array())
      throw InstanceError("instance JSON needs a \"measures\" array");
    if (weights.empty() && doc.contains("weights")) weights = doc["weights"].get<std::vector<double>>();
    std::vector<DiscreteMeasure> measures;
    for (const auto& m : doc["measures"]) {
      auto points = m.at("points").get<std::vector<std::vector<double>>>();
      auto masses = m.at("masses").get<std::vector<double>>();
      measures.push_back(make_measure(points, masses, opts));
    }
    return make_instance(std::move(measures), std::move(weights), opts);
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(std::string("malformed instance JSON: ") + e.what());
  }
}

/// CSV layout: header `measure,mass,x1,...,xd`, measures numbered from 1.
inline Instance parse_instance_csv(std::string_view text, std::vector<double> weights = {},
                                   BuildOptions opts = {}) {
  const auto lines = detail::data_lines(text);
  if (lines.empty()) throw InstanceError("empty CSV instance");
  const auto header = detail::split_csv(lines[0]);
  if (header.size() < 3) throw InstanceError("CSV header must be measure,mass,x1,...,xd");
  const std::size_t dim = header.size() - 2;

  std::map<long, std::pair<std::vector<std::vector<double>>, std::vector<double>>> grouped;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto fields = detail::split_csv(lines[r]);
    if (fields.size() != dim + 2)
      throw InstanceError("line " + std::to_string(r + 1) + ": expected " + std::to_string(dim + 2) +
                          " fields (dimension mismatch)");
    const double id = detail::parse_real(fields[0], r + 1);
    if (id < 1 || id != static_cast<double>(static_cast<long>(id)))
      throw InstanceError("line " + std::to_string(r + 1) + ": measure ids are positive integers");
    auto& [points, masses] = grouped[static_cast<long>(id)];
    masses.push_back(detail::parse_real(fields[1], r + 1));
    std::vector<double> p(dim);
    for (std::size_t c = 0; c < dim; ++c) p[c] = detail::parse_real(fields[c + 2], r + 1);
    points.push_back(std::move(p));
  }
  std::vector<DiscreteMeasure> measures;
  long expected = 1;
  for (auto& [id, group] : grouped) {
    if (id != expected) throw InstanceError("measure ids must be consecutive from 1");
    ++expected;
    measures.push_back(make_measure(group.first, group.second, opts));
  }
  return make_instance(std::move(measures), std::move(weights), opts);
}

/// Loads an instance file. An explicit weights file overrides weights stored
/// in a JSON instance.
inline Instance load_instance(const std::filesystem::path& path, std::optional<InstanceFormat> format = {},
                              const std::optional<std::filesystem::path>& weights_path = {},
                              BuildOptions opts = {}) {
  std::vector<double> weights;
  if (weights_path) weights = parse_weights_csv(detail::read_file(*weights_path));
  const std::string text = detail::read_file(path);
  switch (format.value_or(guess_format(path))) {
    case InstanceFormat::csv:
      return parse_instance_csv(text, std::move(weights), opts);
    case InstanceFormat::json:
      break;
  }
  return parse_instance_json(text, std::move(weights), opts);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["weights"] = inst.weights;
  doc["measures"] = nlohmann::json::array();
  for (const auto& m : inst.measures) {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
      auto p = m.point(k);
      points.push_back(std::vector<double>(p.begin(), p.end()));
    }
    doc["measures"].push_back({{"points", points}, {"masses", std::vector<double>(m.masses().begin(), m.masses().end())}});
  }
  return doc;
}

inline void save_instance_json(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write " + path.string());
  out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace wbary
