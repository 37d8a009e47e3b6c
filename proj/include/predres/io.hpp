#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "predres/diagnostics.hpp"
#include "predres/resampler.hpp"

#include <nlohmann/json_fwd.hpp>

namespace predres {

inline constexpr const char* kEngineVersion = "0.1.0";

// Loads a numeric CSV (comma or whitespace separated) into an s x p matrix.
// Row order is preserved. A header row is auto-detected when the first row
// fails numeric parsing and subsequent rows succeed. Errors name the
// offending row/column.
Matrix load_dataset(const std::filesystem::path& path);

// Serializes every numeric with 17 significant digits.
std::string format_double(double x);

void write_thetas_csv(const std::filesystem::path& path,
                      const std::vector<double>& thetas);
std::vector<double> read_thetas_csv(const std::filesystem::path& path);

void write_density_csv(const std::filesystem::path& path,
                       const GriddedDensity& g);

void write_series_csv(const std::filesystem::path& path,
                      const std::string& header,
                      const std::vector<std::pair<double, double>>& rows);

// summary.json embeds the full run configuration and the engine version.
void write_summary_json(const std::filesystem::path& path,
                        const nlohmann::json& config,
                        const PosteriorSample& sample);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace predres
