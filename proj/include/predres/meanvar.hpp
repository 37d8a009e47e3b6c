#pragma once

#include <Eigen/Dense>

#include "predres/kernels.hpp"
#include "predres/rng.hpp"

#include <nlohmann/json_fwd.hpp>

namespace predres {

enum class StatsMode { Empirical, Regularized };

// Running (n, M_n, Q_n) of the mean/variance predictive sequence, with a
// rank-one-maintained Cholesky factor and log-determinant.
//
// Empirical mode tracks the exact 1/n sample covariance (singular while the
// absorbed points do not span R^p). Regularized mode seeds the rank-one
// recursion at Q_1 = I, which keeps Q_n positive definite for every p.
//
// Single-owner mutable value; movable between threads, not shared mutably.
class SufficientStats {
 public:
  SufficientStats(int p, StatsMode mode);

  void absorb(const Eigen::Ref<const Vector>& x);

  long n() const { return n_; }
  int dim() const { return p_; }
  StatsMode mode() const { return mode_; }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  bool singular() const { return !has_chol_; }
  // Lower-triangular factor with cov = chol * chol^t; only valid when
  // singular() is false.
  const Matrix& chol() const { return chol_; }
  double log_det() const;  // -inf when singular

  // One draw X_{n+1} = M_n + Q_n^{1/2} Z from the current predictive
  // (identity scale while n <= 1).
  Vector sample_next(const KernelSpec& kernel, Rng& rng) const;

  // Multiplicative change of det(Q) when absorbing M_n + Q_n^{1/2} z:
  // (1 - 1/(n+1))^p * (1 + z^t z / (n+1)). Requires a nonsingular cov.
  double det_step_factor(const Eigen::Ref<const Vector>& z) const;

  nlohmann::json to_json() const;
  static SufficientStats from_json(const nlohmann::json& j);

 private:
  void refactorize();

  int p_;
  long n_ = 0;
  StatsMode mode_;
  Vector mean_;
  Matrix cov_;
  Matrix chol_;
  bool has_chol_ = true;
};

// L(a, B) with B given through its lower-triangular square root.
struct LocationScale {
  Vector loc;
  Matrix scale_chol;
  bool has_density = true;
};

// n=0 -> L(0, I); n=1 -> L(X_1, I); n>=2 -> L(M_n, Q_n). With a singular
// empirical Q_n the returned object is flagged density-free and scale_chol
// is the symmetric square root of Q_n.
LocationScale predictive_at(const SufficientStats& stats);

// Density of L(loc, scale^2) at x for a 1-d kernel.
double location_scale_pdf_1d(const LocationScale& d, const KernelSpec& kernel,
                             double x);

struct MomentPair {
  double mean;
  double variance;
};

// Closed-form posterior moments of the PR mean estimand (Gaussian kernel,
// p = 1): E = xbar, Var = sigma2 * s/(s+1) * sum_{i=1}^N (s+i)/((s+i-1)(s+i)^2).
MomentPair posterior_mean_moments(long s, double xbar, double sigma2, long N);

// Closed-form posterior moments of the PR variance estimand:
//   E   = sigma2 * s/(s+1) * (s+N+1)/(s+N)
//   Var = sigma2^2 * { prod_{i=1}^N [1 + 3/(s+i)^4 - 4/(s+i)^3] - (E/sigma2)^2 }
MomentPair posterior_variance_moments(long s, double sigma2, long N);

}  // namespace predres
