#pragma once

#include <vector>

#include "predres/copula.hpp"
#include "predres/meanvar.hpp"
#include "predres/resampler.hpp"

namespace predres {

// Trapezoid integral of |f - g| on a shared grid; in [0, 2].
double l1_distance(const GriddedDensity& f, const GriddedDensity& g);

// Total variation distance between N(m1, v1) and N(m2, v2). Equal variances
// use the closed form 2 Phi(|m1-m2|/(2 sigma)) - 1; otherwise the integral
// (1/2) int |phi1 - phi2| is evaluated by adaptive quadrature to 1e-8.
double tv_gaussian_1d(double m1, double v1, double m2, double v2);

struct PathPoint {
  long n;
  double l1_to_f0;
};

// Family configuration for 1-d self-generating convergence paths.
struct PathConfig {
  bool use_copula = false;
  KernelSpec kernel = KernelSpec::gaussian(1);  // mean/variance family
  double rho = 0.9;                             // copula family
  WeightSchedule schedule = WeightSchedule::schedule_a();
  double grid_min = -10.0;
  double grid_max = 10.0;
  int grid_size = 2001;
};

// Simulates the self-generating sequence from the prior predictive and
// records the L1 distance between the running predictive density and f_0 at
// each checkpoint (checkpoints must be increasing; 0 is allowed).
std::vector<PathPoint> convergence_path(const PathConfig& config, long n_max,
                                        const std::vector<long>& checkpoints,
                                        std::uint64_t seed);

// Plateau index: the first checkpoint n after which the path stays within
// `threshold` of its terminal value (the limit proxy), i.e. the index after
// which f_n is close to its limit. Returns the first checkpoint when the
// whole path already sits inside the band.
long stabilization_index(const std::vector<PathPoint>& path,
                         double threshold = 0.05);

struct RateRow {
  long n;
  double median_scaled_tv;  // median over paths of n^gamma * ||alpha_n-alpha||
};

// Convergence-rate experiment (Gaussian kernel, p = 1): the limit alpha is
// proxied by the state at limit_factor * max(n_list) on the same path.
std::vector<RateRow> rate_experiment(const KernelSpec& kernel,
                                     const std::vector<long>& n_list,
                                     double gamma, int reps,
                                     std::uint64_t seed,
                                     long limit_factor = 100);

struct MartingaleReport {
  Matrix q_target;      // Q_n (1 - 1/(n+1)^2)
  Matrix q_estimate;    // Monte Carlo E(Q_{n+1} | F_n)
  Matrix q_zscores;
  Vector m_estimate;    // Monte Carlo E(M_{n+1} | F_n); target is M_n
  Vector m_zscores;
  long draws = 0;
  bool pass = false;    // all |z| < 4
};

// Monte Carlo check of the one-step identities
//   E(Q_{n+1}^{(i,j)} | F_n) = Q_n^{(i,j)} (1 - 1/(n+1)^2)
//   E(M_{n+1} | F_n) = M_n
// over fresh innovations from the given history (Gaussian kernel semantics;
// requires a nonsingular covariance).
MartingaleReport martingale_report(const KernelSpec& kernel,
                                   const SufficientStats& history, long draws,
                                   std::uint64_t seed);

}  // namespace predres
