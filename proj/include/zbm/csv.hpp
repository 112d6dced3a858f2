#pragma once

#include <cstdio>
#include <ostream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "zbm/numeric.hpp"
#include "zbm/process.hpp"
#include "zbm/rmt.hpp"

namespace zbm {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace detail

// Schema v1: one row per (path, grid point).
inline constexpr const char* kPathsCsvHeader = "# zbm-paths-v1";

inline void write_paths_csv(std::ostream& os, std::span<const ProcessPath> paths) {
  os << kPathsCsvHeader << "\n";
  os << "tau,alpha,re_z,im_z,model\n";
  for (const ProcessPath& p : paths) {
    const char* model = to_string(p.model);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      os << detail::fmt_double(p.tau) << ',' << detail::fmt_double(p.alphas()[k])
         << ',' << detail::fmt_double(p.values[k].real()) << ','
         << detail::fmt_double(p.values[k].imag()) << ',' << model << "\n";
    }
  }
}

struct PathsCsvRow {
  double tau, alpha, re_z, im_z;
  std::string model;
};

inline std::vector<PathsCsvRow> read_paths_csv(std::istream& is) {
  std::vector<PathsCsvRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    if (!saw_header) {  // column names
      saw_header = true;
      if (line.rfind("tau,", 0) != 0)
        throw domain_error("paths csv: unexpected column header");
      continue;
    }
    auto f = detail::split_csv_line(line);
    if (f.size() != 5) throw domain_error("paths csv: bad row");
    rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]),
                    std::stod(f[3]), f[4]});
  }
  return rows;
}

// Schema v1: one row per statistic draw.
inline constexpr const char* kStatsCsvHeader = "# zbm-statistics-v1";

inline void write_statistics_csv(std::ostream& os, const std::string& statistic,
                                 std::span<const double> values) {
  os << kStatsCsvHeader << "\n";
  os << "sample_id,statistic,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << i << ',' << statistic << ',' << detail::fmt_double(values[i]) << "\n";
}

struct StatsCsvRow {
  std::size_t sample_id;
  std::string statistic;
  double value;
};

inline std::vector<StatsCsvRow> read_statistics_csv(std::istream& is) {
  std::vector<StatsCsvRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      if (line.rfind("sample_id,", 0) != 0)
        throw domain_error("statistics csv: unexpected column header");
      continue;
    }
    auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw domain_error("statistics csv: bad row");
    rows.push_back({static_cast<std::size_t>(std::stoull(f[0])), f[1], std::stod(f[2])});
  }
  return rows;
}

// Schema v1 for characteristic-polynomial trajectories.
inline constexpr const char* kRmtCsvHeader = "# zbm-rmt-v1";

inline void write_rmt_csv(std::ostream& os, std::span<const RmtPath> paths) {
  os << kRmtCsvHeader << "\n";
  os << "n,sample_id,alpha,re_z,im_z\n";
  for (std::size_t s = 0; s < paths.size(); ++s) {
    const RmtPath& p = paths[s];
    for (std::size_t k = 0; k < p.values.size(); ++k)
      os << p.n << ',' << s << ',' << detail::fmt_double(p.alphas()[k]) << ','
         << detail::fmt_double(p.values[k].real()) << ','
         << detail::fmt_double(p.values[k].imag()) << "\n";
  }
}

}  // namespace zbm
