#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "predres/copula.hpp"
#include "predres/kernels.hpp"
#include "predres/meanvar.hpp"

namespace predres {

enum class Estimand { Mean, Variance };

struct MeanVarFamily {
  KernelSpec kernel;
  StatsMode mode = StatsMode::Empirical;
};

struct CopulaFamily {
  std::optional<double> rho;       // fixed correlation, or
  std::vector<double> rho_grid;    // prequential selection over this grid
  WeightSchedule schedule = WeightSchedule::schedule_a();
  double grid_min = -10.0;
  double grid_max = 10.0;
  int grid_size = 2001;
};

// Configuration of one predictive-resampling run: absorb the s observed
// points, forward-sample N, evaluate the estimand, repeat B times.
struct ResamplingPlan {
  long N = 0;
  long B = 1000;
  Estimand estimand = Estimand::Mean;
  std::variant<MeanVarFamily, CopulaFamily> family = CopulaFamily{};
  std::uint64_t seed = 0;
  bool allow_degenerate = false;  // permit empirical mode with p >= 2
  int threads = 0;                // 0 = hardware concurrency
};

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // 1/B convention, matching the engine throughout
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

struct PosteriorSample {
  std::vector<double> thetas;
  Summary summary;
  double seconds = 0.0;
  std::optional<double> selected_rho;  // set when a rho grid was used
};

// mean -> arithmetic mean; variance -> 1/n-normalized sample variance.
double evaluate_estimand(Estimand kind, std::span<const double> points);

Summary summarize(const std::vector<double>& thetas);

// Runs PR over B replicates with independent substreams keyed by
// (seed, replicate); output is invariant to replicate execution order.
// data is s x p row-major (one observation per row); the copula family and
// estimand evaluation require p = 1.
PosteriorSample run_pr(const ResamplingPlan& plan, const Matrix& data);

// Gaussian-kernel KDE on the given grid. Automatic bandwidth is Silverman's
// 0.9 min(sd, IQR/1.34) B^{-1/5} and requires at least two distinct values.
GriddedDensity kde(const std::vector<double>& thetas,
                   std::optional<double> bandwidth,
                   const std::vector<double>& grid);

// Convenience grid spanning [min - 5h, max + 5h] of the sample.
std::vector<double> kde_default_grid(const std::vector<double>& thetas,
                                     double bandwidth, int size = 512);

}  // namespace predres
