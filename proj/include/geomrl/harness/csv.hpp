#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "geomrl/harness/experiment.hpp"
#include "geomrl/io/format.hpp"

namespace geomrl {

// curve.csv: seed,rollout_index,return,evaluation_return
// (compare prepends an adapter column). evaluation_return is empty on
// rollouts without an evaluation. Doubles use the shortest round-trip form.

struct CsvRow {
  std::string adapter;  // empty for single-adapter curves
  std::uint64_t seed = 0;
  int rollout_index = 0;
  double return_ = 0.0;
  std::optional<double> evaluation_return;
};

namespace detail {

inline std::vector<const SeedRun*> by_seed(const std::vector<SeedRun>& runs) {
  std::vector<const SeedRun*> out;
  for (const auto& r : runs) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(), [](const SeedRun* a, const SeedRun* b) { return a->seed < b->seed; });
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline void write_curve(std::ostream& out, const std::vector<ArmResult>& arms, bool with_adapter) {
  if (with_adapter) out << "adapter,";
  out << "seed,rollout_index,return,evaluation_return\n";
  for (const auto& arm : arms) {
    for (const SeedRun* run : detail::by_seed(arm.runs)) {
      for (const auto& r : run->records) {
        if (with_adapter) out << to_string(arm.adapter) << ',';
        out << r.seed << ',' << r.rollout_index << ',' << io::format_double(r.return_) << ',';
        if (r.evaluation_return) out << io::format_double(*r.evaluation_return);
        out << '\n';
      }
    }
  }
}

inline std::vector<CsvRow> read_curve(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("curve csv: missing header");
  const bool with_adapter = line == "adapter,seed,rollout_index,return,evaluation_return";
  if (!with_adapter && line != "seed,rollout_index,return,evaluation_return") {
    throw Error("curve csv: unexpected header '" + line + "'");
  }
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    const std::size_t off = with_adapter ? 1 : 0;
    if (cells.size() != 4 + off) throw Error("curve csv line " + std::to_string(lineno) + ": wrong column count");
    CsvRow r;
    try {
      if (with_adapter) r.adapter = cells[0];
      r.seed = std::stoull(cells[off]);
      r.rollout_index = std::stoi(cells[off + 1]);
      r.return_ = io::parse_double(cells[off + 2]);
      if (!cells[off + 3].empty()) r.evaluation_return = io::parse_double(cells[off + 3]);
    } catch (const std::exception& e) {
      throw Error("curve csv line " + std::to_string(lineno) + ": " + e.what());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

struct SummaryRow {
  std::string adapter;
  int n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 when n = 1
};

inline SummaryRow summarize(std::string adapter, const std::vector<double>& finals) {
  SummaryRow s{std::move(adapter), static_cast<int>(finals.size()), 0.0, 0.0};
  if (finals.empty()) return s;
  for (double v : finals) s.mean += v;
  s.mean /= s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : finals) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

/// Mean and std of the final evaluation return per adapter.
inline std::vector<SummaryRow> summarize(const std::vector<ArmResult>& arms) {
  std::vector<SummaryRow> out;
  for (const auto& arm : arms) {
    std::vector<double> finals;
    for (const SeedRun* r : detail::by_seed(arm.runs)) finals.push_back(r->final_evaluation_return());
    out.push_back(summarize(to_string(arm.adapter), finals));
  }
  return out;
}

/// The same summary recomputed from curve rows: last evaluation per (adapter, seed).
inline std::vector<SummaryRow> summarize(const std::vector<CsvRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, double>> last;
  for (const auto& r : rows) {
    if (!last.count(r.adapter)) order.push_back(r.adapter);
    auto& seeds = last[r.adapter];
    if (r.evaluation_return) seeds[r.seed] = *r.evaluation_return;
  }
  std::vector<SummaryRow> out;
  for (const auto& a : order) {
    std::vector<double> finals;
    for (const auto& [seed, v] : last[a]) finals.push_back(v);
    out.push_back(summarize(a, finals));
  }
  return out;
}

inline void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "adapter,n,mean_final_evaluation,std_final_evaluation\n";
  for (const auto& r : rows) {
    out << r.adapter << ',' << r.n << ',' << io::format_double(r.mean) << ',' << io::format_double(r.std) << '\n';
  }
}

/// Per-seed diagnostics: final evaluation, tracking error, repair counts.
inline void write_stats(std::ostream& out, const std::vector<ArmResult>& arms) {
  out << "adapter,seed,final_evaluation_return,final_tracking_error,repair_calls,factor_actions,failures\n";
  for (const auto& arm : arms) {
    for (const SeedRun* r : detail::by_seed(arm.runs)) {
      out << to_string(arm.adapter) << ',' << r->seed << ',' << io::format_double(r->final_evaluation_return()) << ','
          << io::format_double(r->final_tracking_error()) << ',' << r->repair_calls << ',' << r->factor_actions << ','
          << r->failures << '\n';
    }
  }
}

}  // namespace geomrl
