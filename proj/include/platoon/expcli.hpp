#pragma once

// Experiment driver behind the `platoon` command: configuration parsing
// (flags over JSON file over PLATOON_SEED over defaults), experiment execution
// and CSV/text reporting.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "platoon/analytic.hpp"
#include "platoon/errors.hpp"
#include "platoon/ffmatrix.hpp"
#include "platoon/oracle.hpp"
#include "platoon/sim.hpp"
#include "platoon/version.hpp"

namespace platoon::cli {

enum class Mode { analytic, simulate, compare, rankprob };
enum class SchemeChoice { feedback, nc, both };

struct ExperimentSpec {
  Mode mode = Mode::compare;
  std::vector<int> M = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<int> m = {1, 2, 5};
  unsigned q = 8;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 42;
  std::string output_path = "platoon_out";
  SchemeChoice scheme = SchemeChoice::both;
  long rank_rows = 0;  // rankprob: t
  long rank_cols = 0;  // rankprob: n
  bool oracle = false;
  unsigned workers = 0;  // 0 = hardware concurrency; never affects results
};

/// Thrown by parse_config when --help was requested; carries the help text.
struct HelpRequested {
  std::string text;
};

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::analytic: return "analytic";
    case Mode::simulate: return "simulate";
    case Mode::compare: return "compare";
    case Mode::rankprob: return "rankprob";
  }
  return "?";
}

inline std::string_view to_string(SchemeChoice s) {
  switch (s) {
    case SchemeChoice::feedback: return "feedback";
    case SchemeChoice::nc: return "nc";
    case SchemeChoice::both: return "both";
  }
  return "?";
}

namespace detail {

[[noreturn]] inline void bad_value(std::string_view key, std::string_view why) {
  throw UsageError(fmt::format("invalid value for '{}': {}", key, why));
}

template <class Int>
Int parse_integer(std::string_view text, std::string_view key) {
  Int v{};
  const char* b = text.data();
  const char* e = b + text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e || text.empty()) bad_value(key, fmt::format("'{}' is not an integer", text));
  return v;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Sweep syntax: a single value "10", a comma list "1,2,5", or an inclusive
/// range "start:stop:step" (step defaults to 1 in "start:stop").
inline std::vector<int> parse_sweep(std::string_view text, std::string_view key) {
  std::vector<int> out;
  const std::string s = detail::trim(text);
  if (s.empty()) detail::bad_value(key, "empty sweep");
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(detail::trim(p));
    if (parts.size() < 2 || parts.size() > 3) detail::bad_value(key, "range must be start:stop[:step]");
    const int start = detail::parse_integer<int>(parts[0], key);
    const int stop = detail::parse_integer<int>(parts[1], key);
    const int step = parts.size() == 3 ? detail::parse_integer<int>(parts[2], key) : 1;
    if (step < 1) detail::bad_value(key, "range step must be ≥ 1");
    if (stop < start) detail::bad_value(key, "range stop must not be below start");
    for (long v = start; v <= stop; v += step) out.push_back(static_cast<int>(v));
  } else {
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(detail::parse_integer<int>(detail::trim(p), key));
  }
  return out;
}

/// Checks the invariants of a fully merged spec; throws UsageError naming the key.
inline void validate(const ExperimentSpec& spec) {
  auto check_sweep = [](const std::vector<int>& v, std::string_view key) {
    if (v.empty()) detail::bad_value(key, "sweep must not be empty");
    for (int x : v) {
      if (x < 1) detail::bad_value(key, fmt::format("{} must be ≥ 1", key));
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] <= v[i - 1]) detail::bad_value(key, "sweep must be strictly increasing");
    }
  };
  if (spec.q < 1 || spec.q > gf::kMaxExponent) detail::bad_value("q", "q must be in [1, 16]");
  if (spec.mode == Mode::rankprob) {
    if (spec.rank_rows < 1) detail::bad_value("t", "t must be ≥ 1 (required in rankprob mode)");
    if (spec.rank_cols < 1) detail::bad_value("n", "n must be ≥ 1 (required in rankprob mode)");
    if (spec.trials < 1) detail::bad_value("trials", "trials must be ≥ 1");
    return;
  }
  check_sweep(spec.M, "M");
  check_sweep(spec.m, "m");
  if (spec.mode != Mode::analytic && spec.trials < 1) detail::bad_value("trials", "trials must be ≥ 1");
  if (spec.output_path.empty()) detail::bad_value("output", "output path must not be empty");
}

namespace detail {

// Raw textual settings collected from one source, keyed by config name.
using Settings = std::map<std::string, std::string>;

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {"mode", "M",      "m",     "q",      "t",      "n",
                                                "trials", "seed", "output", "scheme", "oracle", "workers"};
  return keys;
}

inline Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("invalid value for 'config': cannot open '{}'", path));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("invalid value for 'config': {}", e.what()));
  }
  if (!doc.is_object()) throw UsageError("invalid value for 'config': top level must be a JSON object");
  Settings out;
  const auto& keys = known_keys();
  for (const auto& [key, value] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw UsageError(fmt::format("unknown config key '{}'", key));
    }
    if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else if (value.is_boolean()) {
      out[key] = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_integer()) {
      out[key] = std::to_string(value.get<long long>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& x : value) {
        if (!x.is_number_integer()) bad_value(key, "arrays may only hold integers");
        if (!joined.empty()) joined += ',';
        joined += std::to_string(x.get<long long>());
      }
      out[key] = joined;
    } else {
      bad_value(key, "unsupported JSON value type");
    }
  }
  return out;
}

inline void apply(ExperimentSpec& spec, const Settings& s) {
  for (const auto& [key, value] : s) {
    if (key == "mode") {
      if (value == "analytic") spec.mode = Mode::analytic;
      else if (value == "simulate") spec.mode = Mode::simulate;
      else if (value == "compare") spec.mode = Mode::compare;
      else if (value == "rankprob") spec.mode = Mode::rankprob;
      else bad_value(key, fmt::format("unknown mode '{}'", value));
    } else if (key == "M") {
      spec.M = parse_sweep(value, "M");
    } else if (key == "m") {
      spec.m = parse_sweep(value, "m");
    } else if (key == "q") {
      const long v = parse_integer<long>(value, key);
      if (v < 1 || v > static_cast<long>(gf::kMaxExponent)) bad_value(key, "q must be in [1, 16]");
      spec.q = static_cast<unsigned>(v);
    } else if (key == "t") {
      spec.rank_rows = parse_integer<long>(value, key);
    } else if (key == "n") {
      spec.rank_cols = parse_integer<long>(value, key);
    } else if (key == "trials") {
      const long long v = parse_integer<long long>(value, key);
      if (v < 1) bad_value(key, "trials must be ≥ 1");
      spec.trials = static_cast<std::uint64_t>(v);
    } else if (key == "seed") {
      spec.seed = parse_integer<std::uint64_t>(value, key);
    } else if (key == "output") {
      spec.output_path = value;
    } else if (key == "scheme") {
      if (value == "feedback") spec.scheme = SchemeChoice::feedback;
      else if (value == "nc") spec.scheme = SchemeChoice::nc;
      else if (value == "both") spec.scheme = SchemeChoice::both;
      else bad_value(key, fmt::format("unknown scheme '{}'", value));
    } else if (key == "oracle") {
      if (value == "true" || value == "1") spec.oracle = true;
      else if (value == "false" || value == "0") spec.oracle = false;
      else bad_value(key, "expected true or false");
    } else if (key == "workers") {
      const long v = parse_integer<long>(value, key);
      if (v < 0) bad_value(key, "workers must be ≥ 0");
      spec.workers = static_cast<unsigned>(v);
    } else {
      throw UsageError(fmt::format("unknown config key '{}'", key));
    }
  }
}

}  // namespace detail

/// Builds a spec from command-line arguments (program name excluded). An
/// explicit `file`, or one named by --config, supplies values that flags
/// override. PLATOON_SEED, when set, replaces the default seed.
inline ExperimentSpec parse_config(const std::vector<std::string>& args,
                                   const std::optional<std::string>& file = std::nullopt) {
  CLI::App app{"Two-vehicle collaborative download: feedback vs. network-coded stopping times", "platoon"};
  app.set_version_flag("--version", std::string(kVersion));
  app.get_formatter()->column_width(28);

  std::map<std::string, std::string> flags;
  std::string config_path;
  bool oracle_flag = false;
  auto opt = [&](const std::string& key, const std::string& help) {
    app.add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  opt("mode", "analytic | simulate | compare | rankprob (default compare)");
  opt("M", "total packets; sweep: 10, 1,2,5 or start:stop:step (default 10:100:10)");
  opt("m", "packets per vehicle per round; same sweep syntax (default 1,2,5)");
  opt("q", "field exponent, field size Q = 2^q (default 8)");
  opt("t", "rankprob: matrix rows");
  opt("n", "rankprob: matrix columns");
  opt("trials", "Monte Carlo trials per cell (default 100000)");
  opt("seed", "master seed (default 42, or $PLATOON_SEED)");
  opt("output", "output directory (default platoon_out)");
  opt("scheme", "feedback | nc | both (default both)");
  opt("workers", "worker threads, 0 = all cores; results do not depend on it");
  app.add_flag("--oracle", oracle_flag, "analytic mode: also run the exact enumeration oracle");
  app.add_option("--config", config_path, "JSON file with the same keys as the flags");
  app.footer(
      "Sweeps: a single value, a comma list (1,2,5) or an inclusive range start:stop:step.\n"
      "Exit status: 0 success, 1 runtime failure, 2 usage error.");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested{std::string(kVersion) + "\n"};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  ExperimentSpec spec;
  if (const char* env = std::getenv("PLATOON_SEED"); env != nullptr && *env != '\0') {
    spec.seed = detail::parse_integer<std::uint64_t>(env, "PLATOON_SEED");
  }
  std::optional<std::string> path = file;
  if (!config_path.empty()) path = config_path;
  if (path) detail::apply(spec, detail::read_config_file(*path));
  detail::apply(spec, flags);
  if (oracle_flag) spec.oracle = true;
  validate(spec);
  return spec;
}

/// One summary line per (M, m, scheme).
struct SummaryRow {
  int M = 0;
  int m = 0;
  sim::Scheme scheme = sim::Scheme::feedback;
  std::optional<double> analytic_mean;
  std::optional<double> empirical_mean;
  std::optional<double> stderr_mean;
  std::optional<double> bound;
  int t_min = 0;
  int t_max = 0;
  std::uint64_t seed = 0;
  std::string version{kVersion};
  // Per-round columns for the pmf table.
  std::optional<RoundPmf> analytic_pmf;
  std::optional<RoundPmf> empirical_pmf;
  std::optional<RoundPmf> bound_pmf;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<SummaryRow> rows;
  std::vector<std::string> notes;  // oracle deviations and skipped cells
};

inline std::string format_real(double v) { return fmt::format("{:.12g}", v); }
inline std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

inline constexpr std::string_view kSummaryHeader = "M,m,scheme,analytic_mean,empirical_mean,stderr,bound,t_min,t_max";
inline constexpr std::string_view kPmfHeader = "t,analytic_p,empirical_p,bound_p";

inline std::string pmf_file_name(const SummaryRow& r) {
  return fmt::format("pmf_M{}_m{}_{}.csv", r.M, r.m, sim::to_string(r.scheme));
}

/// Computes every requested cell without touching the filesystem.
inline ExperimentReport compute(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentReport report{spec, {}, {}};
  const bool want_analytic = spec.mode == Mode::analytic || spec.mode == Mode::compare;
  const bool want_sim = spec.mode == Mode::simulate || spec.mode == Mode::compare;
  const sim::SchemeSelection which{spec.scheme != SchemeChoice::nc, spec.scheme != SchemeChoice::feedback};

  for (int M : spec.M) {
    for (int m : spec.m) {
      if (m > M) {
        report.notes.push_back(fmt::format("skipped M={} m={}: m exceeds M", M, m));
        continue;
      }
      const analytic::ProblemSpec problem{M, m, spec.q};
      std::optional<sim::ExperimentSummary> empirical;
      if (want_sim) empirical = sim::run_experiment(problem, spec.trials, spec.seed, which, spec.workers);

      auto finish = [&](SummaryRow& row) {
        int lo = std::numeric_limits<int>::max();
        int hi = std::numeric_limits<int>::min();
        for (const auto* p : {&row.analytic_pmf, &row.empirical_pmf}) {
          if (!*p || (*p)->empty()) continue;
          const auto [a, b] = (*p)->support();
          if (a <= b) {
            lo = std::min(lo, a);
            hi = std::max(hi, b);
          }
        }
        row.t_min = lo;
        row.t_max = hi;
        row.seed = spec.seed;
        report.rows.push_back(std::move(row));
      };

      if (which.feedback) {
        SummaryRow row{M, m, sim::Scheme::feedback};
        if (want_analytic) {
          RoundPmf pmf = analytic::feedback_stopping_pmf(problem);
          row.analytic_mean = pmf.mean;
          if (spec.oracle) {
            const RoundPmf truth = analytic::exact_markov_oracle(problem);
            report.notes.push_back(fmt::format("oracle M={} m={}: max |recursion - oracle| = {:.3e}", M, m,
                                               max_abs_difference(pmf, truth)));
          }
          row.analytic_pmf = std::move(pmf);
        }
        if (empirical) {
          const sim::SchemeSummary* s = empirical->find(sim::Scheme::feedback);
          row.empirical_mean = s->mean;
          row.stderr_mean = s->stderr_mean;
          row.empirical_pmf = s->pmf;
        }
        finish(row);
      }
      if (which.network_coding) {
        SummaryRow row{M, m, sim::Scheme::network_coding};
        row.bound = analytic::nc_expected_bound(problem).value;
        row.bound_pmf = analytic::nc_stopping_pmf_bound(problem).tight;
        if (want_analytic) {
          RoundPmf pmf = analytic::nc_exact_pmf(problem);
          row.analytic_mean = pmf.mean;
          row.analytic_pmf = std::move(pmf);
        }
        if (empirical) {
          const sim::SchemeSummary* s = empirical->find(sim::Scheme::network_coding);
          row.empirical_mean = s->mean;
          row.stderr_mean = s->stderr_mean;
          row.empirical_pmf = s->pmf;
        }
        finish(row);
      }
    }
  }
  return report;
}

inline std::string summary_csv(const ExperimentReport& report) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const SummaryRow& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.M, r.m, sim::to_string(r.scheme),
                       format_optional(r.analytic_mean), format_optional(r.empirical_mean),
                       format_optional(r.stderr_mean), format_optional(r.bound), r.t_min, r.t_max);
  }
  return out;
}

inline std::string pmf_csv(const SummaryRow& r) {
  std::string out(kPmfHeader);
  out += '\n';
  auto cell = [](const std::optional<RoundPmf>& p, int t) {
    return p && t >= p->t_min && t <= p->t_max() ? format_real(p->at(t)) : std::string();
  };
  for (int t = r.t_min; t <= r.t_max; ++t) {
    out += fmt::format("{},{},{},{}\n", t, cell(r.analytic_pmf, t), cell(r.empirical_pmf, t), cell(r.bound_pmf, t));
  }
  return out;
}

inline std::string manifest_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  j["mode"] = std::string(to_string(spec.mode));
  j["seed"] = spec.seed;
  j["trials"] = spec.trials;
  j["field_exponent"] = spec.q;
  j["field_size"] = 1U << spec.q;
  j["scheme"] = std::string(to_string(spec.scheme));
  if (spec.mode == Mode::rankprob) {
    j["t"] = spec.rank_rows;
    j["n"] = spec.rank_cols;
  } else {
    j["M"] = spec.M;
    j["m"] = spec.m;
  }
  return j.dump(2) + "\n";
}

inline std::string summary_table(const ExperimentReport& report) {
  std::string out = fmt::format("{:>5} {:>3} {:>8} {:>14} {:>14} {:>10} {:>12} {:>5} {:>5}\n", "M", "m", "scheme",
                                "analytic_mean", "empirical_mean", "stderr", "bound", "t_min", "t_max");
  auto col = [](const std::optional<double>& v, int prec) { return v ? fmt::format("{:.{}f}", *v, prec) : "-"; };
  for (const SummaryRow& r : report.rows) {
    out += fmt::format("{:>5} {:>3} {:>8} {:>14} {:>14} {:>10} {:>12} {:>5} {:>5}\n", r.M, r.m,
                       sim::to_string(r.scheme), col(r.analytic_mean, 6), col(r.empirical_mean, 6),
                       col(r.stderr_mean, 6), col(r.bound, 6), r.t_min, r.t_max);
  }
  for (const std::string& n : report.notes) out += n + "\n";
  out += fmt::format("seed={} trials={} q={} (field size {}) version={}\n", report.spec.seed, report.spec.trials,
                     report.spec.q, 1U << report.spec.q, kVersion);
  return out;
}

struct RankProbResult {
  double analytic = 0.0;
  double empirical = 0.0;
  std::uint64_t trials = 0;
};

inline RankProbResult compute_rankprob(const ExperimentSpec& spec) {
  validate(spec);
  RankProbResult out;
  out.analytic = analytic::rank_full_probability(spec.rank_rows, spec.rank_cols, spec.q);
  out.trials = spec.trials;
  const gf::FieldContext ctx(spec.q);
  const auto rows = static_cast<std::size_t>(spec.rank_rows);
  const auto cols = static_cast<std::size_t>(spec.rank_cols);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < spec.trials; ++i) {
    SeededRng rng = make_stream(spec.seed, i, 2);
    if (linalg::rank(linalg::random_matrix(rng, ctx, rows, cols)) == cols) ++hits;
  }
  out.empirical = static_cast<double>(hits) / static_cast<double>(spec.trials);
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot write " + path.string());
  f << content;
  f.close();
  if (!f) throw std::ios_base::failure("failed writing " + path.string());
}

}  // namespace detail

/// Runs a validated spec, writes its files and prints the summary. Returns the
/// process exit status (0 success, 1 runtime failure).
inline int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  try {
    const fs::path dir(spec.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      err << "I/O error: cannot create output directory '" << spec.output_path << "'\n";
      return 1;
    }
    if (spec.mode == Mode::rankprob) {
      const RankProbResult r = compute_rankprob(spec);
      detail::write_file(dir / "rankprob.csv",
                         fmt::format("rows,cols,q,field_size,analytic_p,empirical_p,trials\n{},{},{},{},{},{},{}\n",
                                     spec.rank_rows, spec.rank_cols, spec.q, 1U << spec.q, format_real(r.analytic),
                                     format_real(r.empirical), r.trials));
      detail::write_file(dir / "manifest.json", manifest_json(spec));
      fmt::print(out, "P(rank = {}) for a random {}x{} matrix over GF(2^{}): analytic {} empirical {} ({} trials)\n",
                 spec.rank_cols, spec.rank_rows, spec.rank_cols, spec.q, format_real(r.analytic),
                 format_real(r.empirical), r.trials);
      return 0;
    }
    const ExperimentReport report = compute(spec);
    detail::write_file(dir / "summary.csv", summary_csv(report));
    for (const SummaryRow& r : report.rows) detail::write_file(dir / pmf_file_name(r), pmf_csv(r));
    detail::write_file(dir / "manifest.json", manifest_json(spec));
    out << summary_table(report);
    return 0;
  } catch (const GuardError& e) {
    err << "guard error: " << e.what() << "\n";
    return 1;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << "\n";
    return 1;
  }
}

/// Full command: parse, run, map failures to exit statuses.
inline int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    return run(spec, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace platoon::cli
