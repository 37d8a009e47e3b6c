#pragma once

#include <optional>
#include <vector>

#include "predres/rng.hpp"

namespace predres {

// A 1-d density/CDF pair tabulated on a fixed, strictly increasing grid.
// The density is kept renormalized (trapezoid mass exactly 1) and the CDF is
// the trapezoid accumulation of the density.
struct GriddedDensity {
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<double> cdf;

  static GriddedDensity standard_normal(double lo = -10.0, double hi = 10.0,
                                        int size = 2001);
  static GriddedDensity from_density(std::vector<double> grid,
                                     std::vector<double> density);

  std::size_t size() const { return grid.size(); }
  double trapezoid_mass() const;
  void renormalize();
  void recompute_cdf();

  double pdf_at(double x) const;  // linear interpolation, 0 outside the grid
  double cdf_at(double x) const;  // monotone, clamped to [0, 1]
  double quantile(double u) const;  // linear-interpolation inverse of cdf
};

// Mixing coefficients r_n of the copula recursion.
//   A:        (2 - 1/(n+1)) / (n+2)             (sum diverges like 2 log n)
//   B:        (2 - 1/(n+2)) / ((n+3) log(n+3)^2) (summable)
class WeightSchedule {
 public:
  enum class Kind { A, B, Constant, Custom };

  static WeightSchedule schedule_a();
  static WeightSchedule schedule_b();
  static WeightSchedule constant(double r);
  // Custom schedules carry user-declared summability flags used by the
  // total-variation condition checker; past the end of the list the last
  // value repeats.
  static WeightSchedule custom(std::vector<double> values, bool sum_finite,
                               bool sum_sq_finite, bool limsup_positive);

  double operator()(long n) const;
  Kind kind() const { return kind_; }
  double constant_value() const { return constant_; }
  bool sum_finite() const { return sum_finite_; }
  bool sum_sq_finite() const { return sum_sq_finite_; }
  bool limsup_positive() const { return limsup_positive_; }

 private:
  Kind kind_ = Kind::A;
  double constant_ = 0.0;
  std::vector<double> values_;
  bool sum_finite_ = false;
  bool sum_sq_finite_ = false;
  bool limsup_positive_ = false;
};

// Bivariate Gaussian copula density c_rho(u, v); arguments must be strictly
// inside (0, 1) (callers clamp to [1e-10, 1 - 1e-10]).
double gaussian_copula_density(double rho, double u, double v);

constexpr double kCopulaClamp = 1e-10;

// The beta_n predictive sequence on a fixed grid. Single-owner mutable.
class CopulaPredictiveState {
 public:
  CopulaPredictiveState(GriddedDensity f0, double rho,
                        WeightSchedule schedule);

  // One step of the recursion
  //   f_{n+1}(y) = f_n(y) [ (1 - r_n) + r_n c_rho(F_n(y), F_n(x)) ]
  // followed by renormalization and CDF recomputation.
  void absorb(double x);

  // Inverse sampling from the tabulated CDF.
  double sample(Rng& rng) const;

  // Predictive density at x (interpolated); floored away from zero so that
  // prequential log-likelihoods stay finite.
  double log_predictive(double x) const;

  const GriddedDensity& density() const { return density_; }
  long step() const { return step_; }
  double rho() const { return rho_; }
  const WeightSchedule& schedule() const { return schedule_; }

 private:
  GriddedDensity density_;
  long step_ = 0;
  double rho_;
  WeightSchedule schedule_;
};

// L1 distance between consecutive predictive densities (Example 4 statistic).
double d_n_statistic(const GriddedDensity& before, const GriddedDensity& after);

// Distribution-exact form of the same statistic for a single constant-weight
// update: D_n = r * int_0^1 |c_rho(u, v) - 1| du, with v = F_n(X_{n+1})
// uniform on (0,1). The identity holds for every absolutely continuous
// predictive, whereas the tabulated recursion stops resolving D_n once the
// density concentrates below the grid spacing (with r near 1 that happens
// within roughly 10 updates, since each update shrinks the support by about
// sqrt(1 - rho^2)). Midpoint quadrature over u.
double example4_dn(double rho, double r, double v, int quad_points = 4001);

struct RhoSelection {
  double rho = 0.0;
  std::vector<double> scores;  // prequential log-likelihood per candidate
};

// Prequential fit: for each candidate rho, runs the recursion over the data
// in order accumulating log f_{i-1}(x_i); ties break to the smallest rho.
RhoSelection select_rho(const std::vector<double>& data,
                        const std::vector<double>& rho_grid,
                        const WeightSchedule& schedule,
                        const GriddedDensity& f0);

std::vector<double> default_rho_grid();  // {0.05, 0.10, ..., 0.95}

enum class TvVerdict {
  ConvergesByThm3,
  ConvergesByThm4,
  NonconvergenceByExample4,
  Unknown,
};

// Analytic convergence verdict for the schedule/copula pair. copula_bound is
// a uniform bound b on the copula density when one exists (the Gaussian
// copula with rho > 0 is unbounded).
TvVerdict check_tv_conditions(const WeightSchedule& schedule,
                              std::optional<double> copula_bound);

const char* to_string(TvVerdict v);

}  // namespace predres
