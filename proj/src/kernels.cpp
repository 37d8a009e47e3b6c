#include "predres/kernels.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "predres/special.hpp"

namespace predres {

namespace {

double gaussian_log_density(const Vector& z) {
  return -0.5 * z.squaredNorm() -
         0.5 * z.size() * std::log(2.0 * M_PI);
}

// log density of N(mean, L L^t) at z, with L the lower Cholesky factor.
double mvn_log_density(const Vector& z, const Vector& mean, const Matrix& L,
                       double log_det) {
  Vector w = L.triangularView<Eigen::Lower>().solve(z - mean);
  return -0.5 * w.squaredNorm() - 0.5 * z.size() * std::log(2.0 * M_PI) -
         0.5 * log_det;
}

}  // namespace

KernelSpec KernelSpec::gaussian(int dim) {
  if (dim < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
  return KernelSpec(Family::Gaussian, dim);
}

KernelSpec KernelSpec::student_t(int dim, double df) {
  if (dim < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
  if (!(df > 2.0)) {
    throw std::invalid_argument(
        "KernelSpec: Student-t df must exceed 2 (covariance must exist)");
  }
  KernelSpec k(Family::StudentT, dim);
  k.df_ = df;
  return k;
}

KernelSpec KernelSpec::gaussian_mixture(std::vector<MixtureComponent> comps) {
  if (comps.empty()) {
    throw std::invalid_argument("KernelSpec: mixture needs components");
  }
  const int p = static_cast<int>(comps.front().mean.size());
  if (p < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
  double wsum = 0.0;
  for (const auto& c : comps) {
    if (!(c.weight > 0.0)) {
      throw std::invalid_argument("KernelSpec: component weights must be > 0");
    }
    if (c.mean.size() != p || c.cov.rows() != p || c.cov.cols() != p) {
      throw std::invalid_argument("KernelSpec: inconsistent component sizes");
    }
    wsum += c.weight;
  }
  for (auto& c : comps) c.weight /= wsum;

  // Whiten: subtract the mixture mean, apply inv(chol(mixture covariance)).
  Vector mu = Vector::Zero(p);
  for (const auto& c : comps) mu += c.weight * c.mean;
  Matrix sigma = Matrix::Zero(p, p);
  for (const auto& c : comps) {
    Vector d = c.mean - mu;
    sigma += c.weight * (c.cov + d * d.transpose());
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "KernelSpec: mixture covariance is not positive definite");
  }
  Matrix L = llt.matrixL();

  KernelSpec k(Family::GaussianMixture, p);
  double cum = 0.0;
  for (const auto& c : comps) {
    MixtureComponent w;
    w.weight = c.weight;
    w.mean = L.triangularView<Eigen::Lower>().solve(c.mean - mu);
    Matrix A = L.triangularView<Eigen::Lower>().solve(c.cov);
    w.cov = L.triangularView<Eigen::Lower>()
                .solve(A.transpose())
                .transpose();
    w.cov = 0.5 * (w.cov + w.cov.transpose()).eval();
    Eigen::LLT<Matrix> cllt(w.cov);
    if (cllt.info() != Eigen::Success) {
      throw std::invalid_argument(
          "KernelSpec: component covariance is not positive definite");
    }
    Matrix cl = cllt.matrixL();
    k.comp_chol_.push_back(cl);
    k.comp_log_det_.push_back(2.0 * cl.diagonal().array().log().sum());
    cum += w.weight;
    k.cum_weights_.push_back(cum);
    k.comps_.push_back(std::move(w));
  }
  k.cum_weights_.back() = 1.0;
  return k;
}

double KernelSpec::admissible_u() const {
  if (family_ == Family::StudentT) return df_ - 0.2;
  return 2.5;
}

double KernelSpec::standard_density(const Vector& z) const {
  if (z.size() != dim_) {
    throw std::invalid_argument("standard_density: dimension mismatch");
  }
  switch (family_) {
    case Family::Gaussian:
      return std::exp(gaussian_log_density(z));
    case Family::StudentT: {
      // Z = T * sqrt((df-2)/df), so f_Z(z) = c^p f_T(c z), c = sqrt(df/(df-2))
      const double c = std::sqrt(df_ / (df_ - 2.0));
      Vector t = c * z;
      double lp = std::lgamma(0.5 * (df_ + dim_)) - std::lgamma(0.5 * df_) -
                  0.5 * dim_ * std::log(df_ * M_PI) -
                  0.5 * (df_ + dim_) * std::log1p(t.squaredNorm() / df_);
      return std::exp(lp + dim_ * std::log(c));
    }
    case Family::GaussianMixture: {
      double f = 0.0;
      for (std::size_t i = 0; i < comps_.size(); ++i) {
        f += comps_[i].weight *
             std::exp(mvn_log_density(z, comps_[i].mean, comp_chol_[i],
                                      comp_log_det_[i]));
      }
      return f;
    }
  }
  return 0.0;
}

Vector KernelSpec::sample_standard(Rng& rng) const {
  Vector z(dim_);
  switch (family_) {
    case Family::Gaussian:
      for (int i = 0; i < dim_; ++i) z(i) = rng.normal();
      return z;
    case Family::StudentT: {
      for (int i = 0; i < dim_; ++i) z(i) = rng.normal();
      double v = rng.chi_squared(df_);
      // T = N / sqrt(V/df); standardize by sqrt((df-2)/df)
      return z * std::sqrt((df_ - 2.0) / v);
    }
    case Family::GaussianMixture: {
      double u = rng.uniform();
      std::size_t idx = 0;
      while (idx + 1 < cum_weights_.size() && u > cum_weights_[idx]) ++idx;
      for (int i = 0; i < dim_; ++i) z(i) = rng.normal();
      return comps_[idx].mean +
             comp_chol_[idx].triangularView<Eigen::Lower>() * z;
    }
  }
  return z;
}

double KernelSpec::standard_cdf_1d(double z) const {
  if (dim_ != 1) {
    throw std::invalid_argument("standard_cdf_1d requires a 1-d kernel");
  }
  switch (family_) {
    case Family::Gaussian:
      return norm_cdf(z);
    case Family::StudentT:
      return student_t_cdf(z * std::sqrt(df_ / (df_ - 2.0)), df_);
    case Family::GaussianMixture: {
      double F = 0.0;
      for (std::size_t i = 0; i < comps_.size(); ++i) {
        double sd = comp_chol_[i](0, 0);
        F += comps_[i].weight * norm_cdf((z - comps_[i].mean(0)) / sd);
      }
      return F;
    }
  }
  return 0.0;
}

std::string KernelSpec::describe() const {
  switch (family_) {
    case Family::Gaussian:
      return "gaussian";
    case Family::StudentT:
      return "student:" + std::to_string(df_);
    case Family::GaussianMixture:
      return "mixture(" + std::to_string(comps_.size()) + " components)";
  }
  return "?";
}

ValidationReport validate_kernel(const KernelSpec& kernel, long draws,
                                 Rng& rng) {
  if (draws < 10000) {
    throw std::invalid_argument("validate_kernel: draws must be >= 1e4");
  }
  const int p = kernel.dim();
  ValidationReport rep;
  rep.draws = draws;
  rep.admissible_u = kernel.admissible_u();

  Vector mean = Vector::Zero(p);
  Matrix cov = Matrix::Zero(p, p);
  Vector var_of_coord = Vector::Zero(p);  // for the mean-check SE
  double umom = 0.0, umom2 = 0.0;
  for (long i = 0; i < draws; ++i) {
    Vector z = kernel.sample_standard(rng);
    mean += z;
    cov += z * z.transpose();
    var_of_coord += z.cwiseAbs2();
    double m = std::pow(z.squaredNorm(), rep.u_probe / 2.0);
    umom += m;
    umom2 += m * m;
  }
  mean /= draws;
  cov /= draws;
  var_of_coord /= draws;
  umom /= draws;
  umom2 /= draws;

  rep.mean_estimate = mean;
  rep.cov_estimate = cov;
  rep.u_moment_estimate = umom;

  rep.mean_ok = true;
  for (int i = 0; i < p; ++i) {
    double se = std::sqrt(var_of_coord(i) / draws);
    if (std::fabs(mean(i)) > 3.0 * se) rep.mean_ok = false;
  }
  // Entry-wise check of E(ZZ^t) = I. Fourth moments are not tracked per
  // entry; a conservative SE proxy from the diagonal spread is used.
  rep.cov_ok = true;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      double target = (i == j) ? 1.0 : 0.0;
      double se = std::sqrt(
          std::max(var_of_coord(i) * var_of_coord(j), 1e-12) / draws);
      if (std::fabs(cov(i, j) - target) > 3.0 * 2.0 * se) rep.cov_ok = false;
    }
  }
  double umom_se = std::sqrt(std::max(umom2 - umom * umom, 0.0) / draws);
  rep.moment_finite = std::isfinite(umom) && umom_se < umom;  // heavy-tail flag
  return rep;
}

namespace {

std::vector<MixtureComponent> load_mixture_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mixture file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        if (rows.empty()) {  // header row
          row.clear();
          break;
        }
        throw std::runtime_error("mixture file: non-numeric entry in " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("mixture file is empty: " + path);

  // columns: weight, mean (p), covariance row-major (p*p)
  std::size_t cols = rows.front().size();
  int p = 0;
  while (static_cast<std::size_t>(1 + p + p * p) < cols) ++p;
  if (static_cast<std::size_t>(1 + p + p * p) != cols) {
    throw std::runtime_error("mixture file: column count must be 1+p+p^2");
  }
  std::vector<MixtureComponent> comps;
  for (const auto& r : rows) {
    if (r.size() != cols) {
      throw std::runtime_error("mixture file: ragged rows");
    }
    MixtureComponent c;
    c.weight = r[0];
    c.mean = Eigen::Map<const Vector>(r.data() + 1, p);
    c.cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                           Eigen::Dynamic, Eigen::RowMajor>>(
        r.data() + 1 + p, p, p);
    comps.push_back(std::move(c));
  }
  return comps;
}

}  // namespace

KernelSpec parse_kernel(const std::string& text, int dim) {
  if (text == "gaussian") return KernelSpec::gaussian(dim);
  if (text.rfind("student:", 0) == 0) {
    return KernelSpec::student_t(dim, std::stod(text.substr(8)));
  }
  if (text.rfind("mixture:", 0) == 0) {
    auto comps = load_mixture_csv(text.substr(8));
    auto k = KernelSpec::gaussian_mixture(std::move(comps));
    if (dim > 0 && k.dim() != dim) {
      throw std::invalid_argument("mixture dimension does not match data");
    }
    return k;
  }
  throw std::invalid_argument("unknown kernel spec: " + text);
}

}  // namespace predres
