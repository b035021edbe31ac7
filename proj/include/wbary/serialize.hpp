#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "wbary/branch_and_bound.hpp"
#include "wbary/branching.hpp"
#include "wbary/colgen.hpp"
#include "wbary/error.hpp"
#include "wbary/master.hpp"

namespace wbary {

/// 1-based index list, as shown to users.
inline nlohmann::json combination_to_json(const Combination& s) {
  auto arr = nlohmann::json::array();
  for (auto k : s.indices) arr.push_back(k + 1);
  return arr;
}

inline Combination combination_from_json(const nlohmann::json& j) {
  Combination s;
  for (const auto& v : j) {
    const auto k = v.get<long long>();
    if (k < 1) throw Error("combination indices are 1-based");
    s.indices.push_back(static_cast<std::size_t>(k - 1));
  }
  return s;
}

inline nlohmann::json barycenter_to_json(const Barycenter& b) {
  nlohmann::json out;
  out["cost"] = b.cost;
  out["support"] = nlohmann::json::array();
  for (const auto& e : b.support)
    out["support"].push_back({{"point", e.point}, {"mass", e.mass}, {"combination", combination_to_json(e.combination)}});
  return out;
}

inline Barycenter barycenter_from_json(const nlohmann::json& j) {
  Barycenter b;
  b.cost = j.at("cost").get<double>();
  for (const auto& e : j.at("support"))
    b.support.push_back({e.at("point").get<std::vector<double>>(), e.at("mass").get<double>(),
                         combination_from_json(e.at("combination"))});
  return b;
}

/// NaN has no JSON form; it is written as null.
inline nlohmann::json real_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

inline nlohmann::json stats_to_json(const RunStats& s) {
  return {{"nodes", s.nodes_processed},        {"max_depth", s.max_depth},
          {"root_frac_pct", s.root_fraction_pct}, {"root_unique", s.root_unique_fractional},
          {"lp_solves", s.lp_solves},           {"wall_ms", s.wall_ms}};
}

inline nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json out;
  out["iterations"] = r.iterations;
  out["final_cost"] = r.final_cost;
  out["terminated"] = to_string(r.terminated);
  out["certified"] = r.certified ? nlohmann::json(*r.certified) : nlohmann::json(nullptr);
  out["certificate_reduced_cost"] = real_or_null(r.certificate_reduced_cost);
  out["per_iteration"] = nlohmann::json::array();
  for (const auto& it : r.per_iteration) {
    nlohmann::json row{{"objective", it.objective},
                       {"reduced_cost", real_or_null(it.reduced_cost)},
                       {"working_set_size", it.working_set_size},
                       {"stats", stats_to_json(it.stats)}};
    row["combination"] = it.combination.indices.empty() ? nlohmann::json(nullptr) : combination_to_json(it.combination);
    out["per_iteration"].push_back(std::move(row));
  }
  return out;
}

inline void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

inline constexpr std::string_view kStatsHeader =
    "strategy,sorted,n,total_support,nodes,max_depth,root_frac_pct,root_unique,lp_solves,wall_ms";

struct StatsRow {
  BranchingStrategy strategy = BranchingStrategy::most_repeated;
  bool sorted = false;
  std::size_t n = 0;
  std::size_t total_support = 0;
  RunStats stats;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) { return nlohmann::json(v).dump(); }

inline void write_stats_row(std::ostream& os, const StatsRow& row) {
  os << to_string(row.strategy) << ',' << (row.sorted ? 1 : 0) << ',' << row.n << ',' << row.total_support << ','
     << row.stats.nodes_processed << ',' << row.stats.max_depth << ',' << format_double(row.stats.root_fraction_pct)
     << ',' << row.stats.root_unique_fractional << ',' << row.stats.lp_solves << ','
     << format_double(row.stats.wall_ms) << '\n';
}

inline StatsRow parse_stats_row(std::string_view line) {
  std::vector<std::string> f;
  std::stringstream ss{std::string(line)};
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  if (f.size() != 10) throw Error("stats row needs 10 fields");
  StatsRow row;
  const auto strategy = parse_strategy(f[0]);
  if (!strategy) throw Error("unknown strategy '" + f[0] + "'");
  row.strategy = *strategy;
  row.sorted = f[1] == "1";
  row.n = std::stoul(f[2]);
  row.total_support = std::stoul(f[3]);
  row.stats.nodes_processed = std::stoul(f[4]);
  row.stats.max_depth = std::stoul(f[5]);
  row.stats.root_fraction_pct = std::stod(f[6]);
  row.stats.root_unique_fractional = std::stoul(f[7]);
  row.stats.lp_solves = std::stoul(f[8]);
  row.stats.wall_ms = std::stod(f[9]);
  return row;
}

}  // namespace wbary
