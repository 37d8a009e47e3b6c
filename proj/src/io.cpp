#include "predres/io.hpp"

#include <cmath>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace predres {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool comma = line.find(',') != std::string::npos;
  std::stringstream ss(line);
  if (comma) {
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
  } else {
    while (ss >> cell) cells.push_back(cell);
  }
  return cells;
}

bool parse_finite(const std::string& cell, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(cell, &pos);
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    return pos == cell.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

}  // namespace

Matrix load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_dataset: cannot open " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    auto cells = split_cells(line);
    std::vector<double> row;
    row.reserve(cells.size());
    bool ok = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_finite(cells[c], v)) {
        ok = false;
        bad_col = c;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first_content_row) {  // header row
        first_content_row = false;
        continue;
      }
      throw std::runtime_error("load_dataset: non-numeric or non-finite entry at row " +
                               std::to_string(lineno) + ", column " +
                               std::to_string(bad_col + 1) + " of " +
                               path.string());
    }
    first_content_row = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("load_dataset: ragged row " +
                               std::to_string(lineno) + " in " +
                               path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("load_dataset: no data rows in " + path.string());
  }
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_thetas_csv(const std::filesystem::path& path,
                      const std::vector<double>& thetas) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_thetas_csv: cannot write " +
                             path.string());
  }
  out << "theta\n";
  for (double t : thetas) out << format_double(t) << "\n";
}

std::vector<double> read_thetas_csv(const std::filesystem::path& path) {
  Matrix m = load_dataset(path);
  if (m.cols() != 1) {
    throw std::runtime_error("read_thetas_csv: expected a single column");
  }
  return std::vector<double>(m.data(), m.data() + m.rows());
}

void write_density_csv(const std::filesystem::path& path,
                       const GriddedDensity& g) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_density_csv: cannot write " +
                             path.string());
  }
  out << "y,f,F\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << format_double(g.grid[i]) << ',' << format_double(g.density[i])
        << ',' << format_double(g.cdf[i]) << "\n";
  }
}

void write_series_csv(const std::filesystem::path& path,
                      const std::string& header,
                      const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_series_csv: cannot write " +
                             path.string());
  }
  out << header << "\n";
  for (const auto& [a, b] : rows) {
    out << format_double(a) << ',' << format_double(b) << "\n";
  }
}

void write_summary_json(const std::filesystem::path& path,
                        const nlohmann::json& config,
                        const PosteriorSample& sample) {
  nlohmann::json j;
  j["engine_version"] = kEngineVersion;
  j["config"] = config;
  j["mean"] = sample.summary.mean;
  j["variance"] = sample.summary.variance;
  j["q05"] = sample.summary.q05;
  j["q50"] = sample.summary.q50;
  j["q95"] = sample.summary.q95;
  j["B"] = sample.thetas.size();
  j["seconds"] = sample.seconds;
  if (sample.selected_rho) j["selected_rho"] = *sample.selected_rho;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_summary_json: cannot write " +
                             path.string());
  }
  out << j.dump(2) << "\n";
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             ": " + ec.message());
  }
}

}  // namespace predres
