#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "geomrl/harness/config.hpp"
#include "geomrl/harness/csv.hpp"
#include "geomrl/harness/experiment.hpp"
#include "geomrl/harness/selftest.hpp"

namespace geomrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct GlobalOptions {
  int jobs = default_jobs();
  std::optional<std::string> output;  // overrides the config's "output"
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Loads the config, applies CLI overrides and builds every seed's
/// environment once so that bad target files and similar problems surface
/// as config errors before any training starts.
inline ExperimentConfig prepare(const std::string& config_path, const GlobalOptions& opts) {
  ExperimentConfig c = load_config(config_path);
  if (opts.output) {
    if (opts.output->empty()) throw ConfigError("--output", "must not be empty");
    c.output = *opts.output;
  }
  for (auto seed : c.seeds) {
    try {
      make_env(c.env, seed);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(c.env.targets_file.empty() ? "env" : "env.targets_file", e.what());
    }
  }
  return c;
}

inline nlohmann::json meta_json(const std::string& command, const ExperimentConfig& c,
                                const std::vector<AdapterMode>& adapters) {
  nlohmann::json names = nlohmann::json::array();
  for (auto a : adapters) names.push_back(to_string(a));
  auto env = make_env(c.env, c.seeds.front());
  return {{"command", command},
          {"algorithm", to_string(c.algorithm)},
          {"adapters", names},
          {"env_id", env->id()},
          {"config_hash", hex64(config_hash(c))},
          {"seeds", c.seeds},
          {"budget", c.budget}};
}

inline std::string curve_text(const std::vector<ArmResult>& arms, bool with_adapter) {
  std::ostringstream os;
  write_curve(os, arms, with_adapter);
  return os.str();
}

/// Shared body of run and compare. Returns the summary rows.
inline std::vector<SummaryRow> execute(const std::string& command, const ExperimentConfig& c,
                                       const std::vector<AdapterMode>& adapters, int jobs) {
  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  write_file(dir / "config.echo", to_json(c).dump(2) + "\n");
  maybe_export_targets(c, dir);

  const auto arms = run_arms(c, adapters, jobs);
  const bool compare = command == "compare";
  write_file(dir / "curve.csv", curve_text(arms, compare));

  std::ostringstream stats;
  write_stats(stats, arms);
  write_file(dir / "stats.csv", stats.str());

  const auto summary = summarize(arms);
  if (compare) {
    std::ostringstream s;
    write_summary(s, summary);
    write_file(dir / "summary.csv", s.str());
  }
  write_file(dir / "meta.json", meta_json(command, c, adapters).dump(2) + "\n");
  return summary;
}

inline void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  for (const auto& r : rows) {
    out << "  " << std::left << std::setw(10) << r.adapter << " final evaluation " << io::format_double(r.mean)
        << " +- " << io::format_double(r.std) << " (n=" << r.n << ")\n";
  }
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace detail

/// geomrl run <config>: trains the configured adapter on every seed.
inline int cmd_run(const std::string& config_path, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig c = detail::prepare(config_path, opts);
    const auto summary = detail::execute("run", c, {c.adapter}, opts.jobs);
    out << "wrote " << c.output << "/curve.csv\n";
    detail::print_summary(out, summary);
    return kExitOk;
  });
}

/// geomrl compare <config>: trains every adapter that applies to the
/// environment, GRL first, with identical seeds.
inline int cmd_compare(const std::string& config_path, const GlobalOptions& opts, std::ostream& out,
                       std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig c = detail::prepare(config_path, opts);
    const auto summary = detail::execute("compare", c, compare_adapters(c), opts.jobs);
    out << "wrote " << c.output << "/curve.csv and summary.csv\n";
    detail::print_summary(out, summary);
    return kExitOk;
  });
}

/// geomrl selftest [--filter name]: exit 0 when every selected property
/// holds, 3 when one fails, 2 when the filter selects nothing.
inline int cmd_selftest(const std::string& filter, std::ostream& out, std::ostream& err,
                        const selftest::Ops& ops = {}) {
  return detail::guarded(err, [&] {
    const auto summary = selftest::run(filter, out, ops);
    if (summary.results.empty()) throw ConfigError("--filter", "no property matches '" + filter + "'");
    int failed = 0;
    for (const auto& r : summary.results) failed += r.passed ? 0 : 1;
    out << summary.results.size() - failed << "/" << summary.results.size() << " properties passed\n";
    return failed == 0 ? kExitOk : kExitRuntime;
  });
}

}  // namespace geomrl::cli
