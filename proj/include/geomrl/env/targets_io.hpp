#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geomrl/errors.hpp"
#include "geomrl/io/format.hpp"
#include "geomrl/manifold/s3.hpp"
#include "geomrl/manifold/spd.hpp"

// Plain-text point tables: one point per line, whitespace separated. A
// quaternion line holds w x y z; an SPD(d) line holds d*d entries row-major.
// Blank lines and lines starting with '#' are ignored. For trajectory tasks
// the first point is the initial state and the rest are the targets.

namespace geomrl {

/// Parsed rows plus the 1-based source line of each, for diagnostics.
struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;

  std::size_t size() const { return rows.size(); }
  std::string where(std::size_t i) const { return "line " + std::to_string(lines[i]); }
};

inline Table read_table(std::istream& in) {
  Table table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      try {
        row.push_back(io::parse_double(tok));
      } catch (const Error& e) {
        throw Error("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(lineno);
  }
  return table;
}

inline std::vector<UnitQuaternion> quats_from_table(const Table& table) {
  const auto& rows = table.rows;
  std::vector<UnitQuaternion> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 4) {
      throw BadLength(table.where(i) + ": a quaternion needs 4 values, got " + std::to_string(rows[i].size()));
    }
    const Eigen::Vector4d v(rows[i][0], rows[i][1], rows[i][2], rows[i][3]);
    const double n = v.norm();
    if (std::abs(n - 1.0) > 1e-6) {
      throw Error(table.where(i) + ": quaternion is not unit norm");
    }
    out.emplace_back(std::abs(n - 1.0) <= 1e-12 ? v : Eigen::Vector4d(v / n));
  }
  return out;
}

inline std::vector<SpdMatrix> spds_from_table(const Table& table) {
  const auto& rows = table.rows;
  std::vector<SpdMatrix> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto n = rows[i].size();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (n == 0 || static_cast<std::size_t>(d * d) != n) {
      throw BadLength(table.where(i) + ": entry count is not a square matrix");
    }
    if (!out.empty() && out.front().dim() != d) {
      throw DimensionMismatch(table.where(i) + ": matrix dimension differs from the first row");
    }
    Eigen::MatrixXd m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = rows[i][static_cast<std::size_t>(r * d + c)];
    try {
      out.emplace_back(m);
    } catch (const NotPositiveDefinite& e) {
      throw NotPositiveDefinite(table.where(i) + ": " + e.what());
    }
  }
  return out;
}

inline Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_table(in);
}

inline void write_quats(std::ostream& out, const std::vector<UnitQuaternion>& qs) {
  for (const auto& q : qs) {
    out << io::format_double(q.w()) << ' ' << io::format_double(q.x()) << ' ' << io::format_double(q.y())
        << ' ' << io::format_double(q.z()) << '\n';
  }
}

inline void write_spds(std::ostream& out, const std::vector<SpdMatrix>& ws) {
  for (const auto& w : ws) {
    const auto& m = w.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (r || c) out << ' ';
        out << io::format_double(m(r, c));
      }
    }
    out << '\n';
  }
}

}  // namespace geomrl
