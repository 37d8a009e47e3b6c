#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "predres/rng.hpp"

namespace predres {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct MixtureComponent {
  double weight;
  Vector mean;
  Matrix cov;
};

// A standardized base law Z with E(Z) = 0, E(ZZ^t) = I, a Lebesgue density,
// and a finite u-th absolute moment for some u > 2. Gaussian, standardized
// Student-t (scaled by sqrt((df-2)/df)), or a whitened Gaussian mixture.
// Immutable after construction; safe to share across threads.
class KernelSpec {
 public:
  enum class Family { Gaussian, StudentT, GaussianMixture };

  static KernelSpec gaussian(int dim);
  static KernelSpec student_t(int dim, double df);  // requires df > 2
  static KernelSpec gaussian_mixture(std::vector<MixtureComponent> comps);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  double df() const { return df_; }

  // Largest moment order the kernel is reported to admit (u > 2). For the
  // Student-t this is df minus a small margin; Gaussian and mixture tails
  // admit every order, reported as 2.5 to match the validation probe.
  double admissible_u() const;

  double standard_density(const Vector& z) const;
  Vector sample_standard(Rng& rng) const;

  // 1-d only; monotone with limits 0 and 1.
  double standard_cdf_1d(double z) const;

  // Whitened mixture components (empty for Gaussian / Student-t).
  const std::vector<MixtureComponent>& components() const { return comps_; }

  std::string describe() const;

 private:
  KernelSpec(Family f, int dim) : family_(f), dim_(dim) {}

  Family family_;
  int dim_;
  double df_ = 0.0;
  // whitened components: mean and lower Cholesky factor of each covariance
  std::vector<MixtureComponent> comps_;
  std::vector<Matrix> comp_chol_;
  std::vector<double> comp_log_det_;
  std::vector<double> cum_weights_;
};

struct ValidationReport {
  Vector mean_estimate;
  Matrix cov_estimate;
  double u_probe = 2.5;          // order of the probed absolute moment
  double u_moment_estimate = 0;  // empirical E{(Z^tZ)^{u/2}} at u_probe
  double admissible_u = 0;
  bool mean_ok = false;
  bool cov_ok = false;
  bool moment_finite = false;
  long draws = 0;

  bool pass() const { return mean_ok && cov_ok && moment_finite; }
};

// Monte Carlo sanity check of the standardization invariants (3 SE
// tolerances). A failing report is a valid return, not an error.
ValidationReport validate_kernel(const KernelSpec& kernel, long draws,
                                 Rng& rng);

// Parses "gaussian", "student:<df>" or "mixture:<csv path>" (CSV columns:
// weight, mean..., covariance row-major).
KernelSpec parse_kernel(const std::string& text, int dim);

}  // namespace predres
