#pragma once

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wbary/wbary.hpp"

namespace wbary::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Raised for bad flag values that CLI11 cannot catch on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::size_t default_workers() {
  if (const char* env = std::getenv("WBARY_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

/// Splits "a,b,c" into unsigned integers; throws UsageError on anything else.
inline std::vector<std::uint64_t> parse_uint_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size() || cell.front() == '-') throw UsageError(std::string("invalid ") + what + " '" + text + "'");
    out.push_back(v);
  }
  if (out.size() != expected) throw UsageError(std::string("invalid ") + what + " '" + text + "'");
  return out;
}

struct InputOptions {
  std::string input;
  std::string format;
  std::string weights;
  bool renormalize = false;
  std::string random;
  std::string symmetric;

  void attach(CLI::App* cmd, bool with_symmetric = false) {
    cmd->add_option("--input", input, "Instance file (JSON or CSV)");
    cmd->add_option("--format", format, "Instance format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--weights", weights, "One-column CSV of measure weights");
    cmd->add_flag("--renormalize", renormalize, "Rescale mass sums that are within 1e-6 of 1");
    cmd->add_option("--random", random, "Generate an instance: n,p,seed");
    if (with_symmetric) cmd->add_option("--symmetric", symmetric, "Congruent measures: n,p");
  }

  bool generated() const { return !random.empty(); }

  /// The instance for repeat `r`; generated instances use seed + r.
  Instance load(std::uint64_t r = 0) const {
    const int sources = !input.empty() + !random.empty() + !symmetric.empty();
    if (sources != 1) throw UsageError("give exactly one of --input, --random, --symmetric");
    if (!random.empty()) {
      const auto v = parse_uint_list(random, 3, "generator spec");
      if (v[0] < 2 || v[1] < 1) throw UsageError("generator spec needs n >= 2 and p >= 1");
      return random_instance(v[0], v[1], v[2] + r);
    }
    if (!symmetric.empty()) {
      const auto v = parse_uint_list(symmetric, 2, "symmetric spec");
      if (v[0] < 2 || v[1] < 1) throw UsageError("symmetric spec needs n >= 2 and p >= 1");
      return symmetric_instance(v[0], v[1]);
    }
    std::optional<InstanceFormat> fmt;
    if (!format.empty()) fmt = format == "csv" ? InstanceFormat::csv : InstanceFormat::json;
    std::optional<std::filesystem::path> wpath;
    if (!weights.empty()) wpath = weights;
    return load_instance(input, fmt, wpath, {.renormalize = renormalize});
  }
};

struct PricingOptions {
  std::string pricing = "mip";
  std::string strategy = "most_repeated";
  std::size_t workers = default_workers();

  void attach(CLI::App* cmd) {
    cmd->add_option("--pricing", pricing, "Pricing backend")->check(CLI::IsMember({"classic", "mip"}));
    cmd->add_option("--strategy", strategy, "Branching strategy")
        ->check(CLI::IsMember({"index_order", "closest_to_integer", "most_repeated"}));
    cmd->add_option("--workers", workers, "Worker threads (default from WBARY_WORKERS, else 1)")
        ->check(CLI::PositiveNumber);
  }

  PricingBackend backend() const { return pricing == "classic" ? PricingBackend::classic : PricingBackend::mip; }
  BranchingStrategy branching() const { return *parse_strategy(strategy); }
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

/// Appends rows to a stats CSV, writing the header first if the file is new or empty.
inline void append_stats(const std::string& path, const std::vector<StatsRow>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write " + path);
  if (fresh) out << kStatsHeader << '\n';
  for (const auto& r : rows) write_stats_row(out, r);
}

inline std::string dump_lp(const lp::LpProblem& prob) {
  std::ostringstream os;
  write_lp_format(os, prob);
  return os.str();
}

/// Runs the command line in-process. Normal output goes to `out`,
/// diagnostics to `err`; the return value is the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact discrete Wasserstein barycenters by column generation"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Compute an exact barycenter");
  InputOptions solve_in;
  PricingOptions solve_pr;
  bool sort = false, timing_off = false;
  double tol = 1e-7;
  std::size_t max_iterations = 0;
  std::string output = "solution.json", report_path = "report.json", stats_path, solve_dump;
  solve_in.attach(solve);
  solve_pr.attach(solve);
  solve->add_flag("--sort", sort, "Sort measures by support size first");
  solve->add_option("--tol", tol, "Reduced-cost stopping tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iterations", max_iterations, "Iteration cap (0 = none)");
  solve->add_option("--output", output, "Solution JSON path");
  solve->add_option("--report", report_path, "Run-report JSON path");
  solve->add_option("--stats", stats_path, "Append per-iteration pricing stats to this CSV");
  solve->add_option("--dump-lp", solve_dump, "Write the final master LP in LP format");
  solve->add_flag("--no-timing", timing_off, "Write wall_ms as 0");

  // price
  auto* price = app.add_subcommand("price", "Solve one pricing problem at the greedy master duals");
  InputOptions price_in;
  PricingOptions price_pr;
  std::string price_stats, price_dump;
  bool price_timing_off = false;
  price_in.attach(price);
  price_pr.attach(price);
  price->add_option("--stats", price_stats, "Append the pricing stats row to this CSV");
  price->add_option("--dump-lp", price_dump, "Write the root pricing relaxation in LP format");
  price->add_flag("--no-timing", price_timing_off, "Write wall_ms as 0");

  // bench
  auto* bench = app.add_subcommand("bench", "Compare branching strategies and presorting");
  InputOptions bench_in;
  std::size_t repeats = 1, bench_workers = default_workers();
  std::string bench_out;
  bool bench_timing_off = false;
  bench_in.attach(bench);
  bench->add_option("--repeats", repeats, "Instances (or repetitions) to run")->check(CLI::PositiveNumber);
  bench->add_option("--workers", bench_workers, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--output", bench_out, "Stats CSV path (default: standard output)");
  bench->add_flag("--no-timing", bench_timing_off, "Write wall_ms as 0");

  // fractionality
  auto* frac = app.add_subcommand("fractionality", "Fractionality of the root pricing relaxation");
  InputOptions frac_in;
  frac_in.attach(frac, true);

  // verify
  auto* verify = app.add_subcommand("verify", "Structural checks of the pricing constraint matrix");
  std::size_t vn = 2, vp = 2;
  verify->add_option("--n", vn, "Number of measures");
  verify->add_option("--p", vp, "Points per measure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) {
      const Instance inst = solve_in.load();
      SolverConfig cfg;
      cfg.pricing = solve_pr.backend();
      cfg.strategy = solve_pr.branching();
      cfg.sort_measures = sort;
      cfg.reduced_cost_tol = tol;
      cfg.workers = solve_pr.workers;
      if (max_iterations > 0) cfg.max_iterations = max_iterations;
      const auto result = run(inst, cfg);
      write_json_file(barycenter_to_json(result.barycenter), output);
      auto report = result.report;
      if (timing_off)
        for (auto& it : report.per_iteration) it.stats.wall_ms = 0.0;
      write_json_file(report_to_json(report), report_path);
      if (!stats_path.empty()) {
        std::vector<StatsRow> rows;
        for (const auto& it : report.per_iteration)
          rows.push_back({cfg.strategy, sort, inst.n(), inst.total_support(), it.stats});
        append_stats(stats_path, rows);
      }
      if (!solve_dump.empty()) write_text_file(solve_dump, dump_lp(build_master_lp(inst, result.working_set)));
      out << "cost=" << format_double(result.report.final_cost) << " iterations=" << result.report.iterations;
      if (result.report.terminated != Termination::optimal) out << " terminated=" << to_string(result.report.terminated);
      out << '\n';
      if (result.report.certified && !*result.report.certified) {
        err << "error: enumeration finds reduced cost " << result.report.certificate_reduced_cost
            << " above tolerance after termination\n";
        return kExitDomain;
      }
      return kExitOk;
    }

    if (*price) {
      const Instance inst = price_in.load();
      const auto y = greedy_duals(inst);
      PricingResult best;
      std::optional<RunStats> stats;
      if (price_pr.backend() == PricingBackend::classic) {
        best = enumerate_best(inst, y, nullptr, price_pr.workers);
      } else {
        const auto model = build_gen_lp(shift_to_positive_orthant(inst).instance, y);
        if (!price_dump.empty()) write_text_file(price_dump, dump_lp(model.lp()));
        BranchAndBoundOptions opts;
        opts.strategy = price_pr.branching();
        opts.workers = price_pr.workers;
        auto bb = branch_and_bound(model, opts, greedy_incumbent(model));
        if (price_timing_off) bb.stats.wall_ms = 0.0;
        best = bb.best;
        stats = bb.stats;
      }
      out << "reduced_cost=" << format_double(best.reduced_cost)
          << " combination=" << combination_to_json(best.combination).dump();
      if (stats)
        out << " nodes=" << stats->nodes_processed << " max_depth=" << stats->max_depth
            << " lp_solves=" << stats->lp_solves;
      out << '\n';
      if (stats && !price_stats.empty())
        append_stats(price_stats, {{price_pr.branching(), false, inst.n(), inst.total_support(), *stats}});
      return kExitOk;
    }

    if (*bench) {
      std::vector<StatsRow> rows;
      std::ostringstream csv;
      csv << kStatsHeader << '\n';
      int status = kExitOk;
      for (std::size_t r = 0; r < repeats; ++r) {
        const Instance inst = bench_in.load(r);
        const auto runs = bench_pricing(inst, greedy_duals(inst), bench_workers, !bench_timing_off);
        const double spread = value_spread(runs);
        if (spread > 1e-9) {
          err << "error: repeat " << r << ": optimal pricing values differ by " << spread << " across strategies\n";
          status = kExitDomain;
        }
        for (const auto& run : runs) {
          write_stats_row(csv, run.row);
          rows.push_back(run.row);
        }
      }
      if (bench_out.empty()) {
        out << csv.str();
        err << summary_table(rows);
      } else {
        write_text_file(bench_out, csv.str());
        out << summary_table(rows);
      }
      return status;
    }

    if (*frac) {
      const Instance inst = frac_in.load();
      const auto model = build_gen_lp(shift_to_positive_orthant(inst).instance, greedy_duals(inst));
      const auto root = solve_node(model, BBNode{});
      if (root.status != lp::Status::optimal)
        throw PricingError(std::string("root relaxation ") + lp::to_string(root.status));
      const auto z1 = std::span<const double>(root.primal).first(model.num_selection());
      const auto s = fractionality_stats(z1);
      out << "n,support,frac_pct,unique\n"
          << inst.n() << ',' << inst.total_support() << ',' << format_double(s.pct_fractional) << ','
          << s.unique_count << '\n';
      return kExitOk;
    }

    if (*verify) {
      if (vn < 2 || vp < 2) {
        err << "error: witness requires p ≥ 2 and n ≥ 2\n";
        return kExitUsage;
      }
      const Instance inst = shift_to_positive_orthant(symmetric_instance(vn, vp)).instance;
      const auto model = build_gen_lp(inst, std::vector<double>(inst.total_support(), 0.0));
      const auto det = non_tu_witness(model);
      const std::vector<double> uniform(model.num_vars(), 1.0 / static_cast<double>(vp));
      const auto cert = vertex_rank(model, uniform);
      out << "det=" << det << " rank=" << (cert.is_vertex ? "full" : "deficient") << " rank_value=" << cert.rank
          << " dimension=" << cert.dimension << '\n';
      if (det != -2) {
        err << "error: non-unimodularity witness has determinant " << det << ", expected -2\n";
        return kExitDomain;
      }
      if (!cert.is_vertex) {
        err << "error: rank certificate: uniform point has rank " << cert.rank << " < " << cert.dimension << '\n';
        return kExitDomain;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace wbary::cli
