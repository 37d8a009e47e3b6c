#include "predres/meanvar.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace predres {

namespace {

// In-place Cholesky rank-one update: L L^t + w w^t (additive only; the Q_n
// recursion never needs a downdate). Returns false when a pivot degenerates.
bool chol_rank_one_update(Matrix& L, Vector w) {
  const int p = static_cast<int>(L.rows());
  for (int k = 0; k < p; ++k) {
    double lkk = L(k, k);
    double r = std::hypot(lkk, w(k));
    if (r < 1e-12 || lkk < 1e-12) return false;
    double c = r / lkk;
    double s = w(k) / lkk;
    L(k, k) = r;
    for (int i = k + 1; i < p; ++i) {
      L(i, k) = (L(i, k) + s * w(i)) / c;
      w(i) = c * w(i) - s * L(i, k);
    }
  }
  return true;
}

Matrix symmetric_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Vector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

SufficientStats::SufficientStats(int p, StatsMode mode)
    : p_(p), mode_(mode) {
  if (p < 1) throw std::invalid_argument("SufficientStats: p must be >= 1");
  mean_ = Vector::Zero(p);
  cov_ = Matrix::Identity(p, p);
  chol_ = Matrix::Identity(p, p);
}

void SufficientStats::refactorize() {
  Eigen::LLT<Matrix> llt(cov_);
  if (llt.info() == Eigen::Success &&
      Matrix(llt.matrixL()).diagonal().minCoeff() > 1e-12) {
    chol_ = llt.matrixL();
    has_chol_ = true;
  } else {
    has_chol_ = false;
  }
}

void SufficientStats::absorb(const Eigen::Ref<const Vector>& x) {
  if (x.size() != p_) {
    throw std::invalid_argument("SufficientStats::absorb: dimension mismatch");
  }
  if (n_ == 0) {
    mean_ = x;
    if (mode_ == StatsMode::Empirical) {
      // sample covariance of a single point
      cov_.setZero();
      has_chol_ = false;
    } else {
      cov_.setIdentity();
      chol_.setIdentity();
      has_chol_ = true;
    }
    n_ = 1;
    return;
  }
  // Q_{n+1} = n/(n+1) Q_n + n/(n+1)^2 L_n L_n^t  with  L_n = x - M_n
  const double n = static_cast<double>(n_);
  const Vector d = x - mean_;
  const double a = n / (n + 1.0);
  const double b = n / ((n + 1.0) * (n + 1.0));
  mean_ += d / (n + 1.0);
  cov_ = (a * cov_ + b * d * d.transpose()).eval();
  cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
  ++n_;

  if (has_chol_) {
    chol_ *= std::sqrt(a);
    if (!chol_rank_one_update(chol_, std::sqrt(b) * d)) refactorize();
  } else {
    refactorize();
  }
}

double SufficientStats::log_det() const {
  if (!has_chol_) return -std::numeric_limits<double>::infinity();
  return 2.0 * chol_.diagonal().array().log().sum();
}

Vector SufficientStats::sample_next(const KernelSpec& kernel, Rng& rng) const {
  Vector z = kernel.sample_standard(rng);
  if (n_ <= 1) return mean_ + z;
  if (has_chol_) {
    return mean_ + chol_.triangularView<Eigen::Lower>() * z;
  }
  return mean_ + symmetric_sqrt(cov_) * z;
}

double SufficientStats::det_step_factor(
    const Eigen::Ref<const Vector>& z) const {
  if (!has_chol_) {
    throw std::domain_error("det_step_factor: singular covariance");
  }
  if (z.size() != p_) {
    throw std::invalid_argument("det_step_factor: dimension mismatch");
  }
  const double np1 = static_cast<double>(n_) + 1.0;
  return std::pow(1.0 - 1.0 / np1, p_) * (1.0 + z.squaredNorm() / np1);
}

nlohmann::json SufficientStats::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["mode"] = mode_ == StatsMode::Empirical ? "empirical" : "regularized";
  j["mean"] = std::vector<double>(mean_.data(), mean_.data() + p_);
  std::vector<double> cov;
  cov.reserve(p_ * p_);
  for (int i = 0; i < p_; ++i)
    for (int k = 0; k < p_; ++k) cov.push_back(cov_(i, k));
  j["cov"] = cov;
  return j;
}

SufficientStats SufficientStats::from_json(const nlohmann::json& j) {
  auto mean = j.at("mean").get<std::vector<double>>();
  auto cov = j.at("cov").get<std::vector<double>>();
  const int p = static_cast<int>(mean.size());
  StatsMode mode = j.at("mode").get<std::string>() == "empirical"
                       ? StatsMode::Empirical
                       : StatsMode::Regularized;
  SufficientStats s(p, mode);
  s.n_ = j.at("n").get<long>();
  s.mean_ = Eigen::Map<const Vector>(mean.data(), p);
  s.cov_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                          Eigen::Dynamic, Eigen::RowMajor>>(
      cov.data(), p, p);
  s.refactorize();
  return s;
}

LocationScale predictive_at(const SufficientStats& stats) {
  LocationScale d;
  d.loc = stats.mean();
  if (stats.n() <= 1) {
    d.scale_chol = Matrix::Identity(stats.dim(), stats.dim());
    d.has_density = true;
    return d;
  }
  if (!stats.singular()) {
    d.scale_chol = stats.chol();
    d.has_density = true;
  } else {
    d.scale_chol = symmetric_sqrt(stats.cov());
    d.has_density = false;
  }
  return d;
}

double location_scale_pdf_1d(const LocationScale& d, const KernelSpec& kernel,
                             double x) {
  if (d.loc.size() != 1 || kernel.dim() != 1) {
    throw std::invalid_argument("location_scale_pdf_1d: p must be 1");
  }
  const double s = d.scale_chol(0, 0);
  if (!(s > 0.0)) {
    throw std::domain_error("location_scale_pdf_1d: degenerate scale");
  }
  Vector z(1);
  z(0) = (x - d.loc(0)) / s;
  return kernel.standard_density(z) / s;
}

MomentPair posterior_mean_moments(long s, double xbar, double sigma2, long N) {
  if (s < 2) throw std::invalid_argument("posterior_mean_moments: s >= 2");
  if (N < 0 || sigma2 < 0.0) {
    throw std::invalid_argument("posterior_mean_moments: bad arguments");
  }
  double sum = 0.0;
  for (long i = N; i >= 1; --i) {  // small terms first
    const double si = static_cast<double>(s + i);
    sum += si / ((si - 1.0) * si * si);
  }
  const double sd = static_cast<double>(s);
  return {xbar, sigma2 * (sd / (sd + 1.0)) * sum};
}

MomentPair posterior_variance_moments(long s, double sigma2, long N) {
  if (s < 2) throw std::invalid_argument("posterior_variance_moments: s >= 2");
  if (N < 0 || sigma2 < 0.0) {
    throw std::invalid_argument("posterior_variance_moments: bad arguments");
  }
  const double sd = static_cast<double>(s);
  const double ratio =
      (sd / (sd + 1.0)) * ((sd + N + 1.0) / (sd + static_cast<double>(N)));
  double log_prod = 0.0;
  for (long i = 1; i <= N; ++i) {
    const double si = static_cast<double>(s + i);
    log_prod += std::log1p(3.0 / (si * si * si * si) - 4.0 / (si * si * si));
  }
  const double var =
      sigma2 * sigma2 * (std::exp(log_prod) - ratio * ratio);
  return {sigma2 * ratio, var};
}

}  // namespace predres
