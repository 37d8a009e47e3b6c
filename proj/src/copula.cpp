#include "predres/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "predres/special.hpp"

namespace predres {

namespace {

double clamp_unit(double u) {
  return std::min(std::max(u, kCopulaClamp), 1.0 - kCopulaClamp);
}

std::size_t cell_index(const std::vector<double>& grid, double x) {
  // index i with grid[i] <= x < grid[i+1]; caller checks bounds
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (i == 0) return 0;
  if (i >= grid.size()) return grid.size() - 2;
  return i - 1;
}

}  // namespace

GriddedDensity GriddedDensity::standard_normal(double lo, double hi,
                                               int size) {
  if (size < 3 || !(hi > lo)) {
    throw std::invalid_argument("GriddedDensity: bad grid spec");
  }
  std::vector<double> grid(size), dens(size);
  const double h = (hi - lo) / (size - 1);
  for (int i = 0; i < size; ++i) {
    grid[i] = lo + i * h;
    dens[i] = norm_pdf(grid[i]);
  }
  return from_density(std::move(grid), std::move(dens));
}

GriddedDensity GriddedDensity::from_density(std::vector<double> grid,
                                            std::vector<double> density) {
  if (grid.size() != density.size() || grid.size() < 3) {
    throw std::invalid_argument("GriddedDensity: size mismatch");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("GriddedDensity: grid must increase");
    }
  }
  GriddedDensity g;
  g.grid = std::move(grid);
  g.density = std::move(density);
  g.renormalize();
  return g;
}

double GriddedDensity::trapezoid_mass() const {
  double m = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    m += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return m;
}

void GriddedDensity::renormalize() {
  double m = trapezoid_mass();
  if (!(m > 0.0)) throw std::domain_error("GriddedDensity: zero mass");
  for (auto& f : density) f /= m;
  recompute_cdf();
}

void GriddedDensity::recompute_cdf() {
  cdf.resize(grid.size());
  cdf[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    cdf[i] = cdf[i - 1] +
             0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  cdf.back() = std::max(cdf.back(), cdf[cdf.size() - 2]);
}

double GriddedDensity::pdf_at(double x) const {
  if (x < grid.front() || x > grid.back()) return 0.0;
  std::size_t i = cell_index(grid, x);
  double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return density[i] + t * (density[i + 1] - density[i]);
}

double GriddedDensity::cdf_at(double x) const {
  if (x <= grid.front()) return 0.0;
  if (x >= grid.back()) return 1.0;
  std::size_t i = cell_index(grid, x);
  double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
  double v = cdf[i] + t * (cdf[i + 1] - cdf[i]);
  return std::min(std::max(v, 0.0), 1.0);
}

double GriddedDensity::quantile(double u) const {
  if (u <= cdf.front()) return grid.front();
  if (u >= cdf.back()) return grid.back();
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  double c0 = cdf[i - 1], c1 = cdf[i];
  if (c1 <= c0) return grid[i];
  double t = (u - c0) / (c1 - c0);
  return grid[i - 1] + t * (grid[i] - grid[i - 1]);
}

WeightSchedule WeightSchedule::schedule_a() {
  WeightSchedule w;
  w.kind_ = Kind::A;
  w.sum_sq_finite_ = true;
  return w;
}

WeightSchedule WeightSchedule::schedule_b() {
  WeightSchedule w;
  w.kind_ = Kind::B;
  w.sum_finite_ = true;
  w.sum_sq_finite_ = true;
  return w;
}

WeightSchedule WeightSchedule::constant(double r) {
  if (!(r > 0.0 && r <= 1.0)) {
    throw std::invalid_argument("WeightSchedule: r must be in (0, 1]");
  }
  WeightSchedule w;
  w.kind_ = Kind::Constant;
  w.constant_ = r;
  w.limsup_positive_ = true;
  return w;
}

WeightSchedule WeightSchedule::custom(std::vector<double> values,
                                      bool sum_finite, bool sum_sq_finite,
                                      bool limsup_positive) {
  if (values.empty()) {
    throw std::invalid_argument("WeightSchedule: empty custom schedule");
  }
  for (double r : values) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw std::invalid_argument("WeightSchedule: r_n must be in (0, 1]");
    }
  }
  WeightSchedule w;
  w.kind_ = Kind::Custom;
  w.values_ = std::move(values);
  w.sum_finite_ = sum_finite;
  w.sum_sq_finite_ = sum_sq_finite;
  w.limsup_positive_ = limsup_positive;
  return w;
}

double WeightSchedule::operator()(long n) const {
  const double nd = static_cast<double>(n);
  switch (kind_) {
    case Kind::A:
      return (2.0 - 1.0 / (nd + 1.0)) / (nd + 2.0);
    case Kind::B: {
      double l = std::log(nd + 3.0);
      return (2.0 - 1.0 / (nd + 2.0)) / ((nd + 3.0) * l * l);
    }
    case Kind::Constant:
      return constant_;
    case Kind::Custom: {
      std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(n),
                                            values_.size() - 1);
      return values_[i];
    }
  }
  return 0.0;
}

double gaussian_copula_density(double rho, double u, double v) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("gaussian_copula_density: rho in [0, 1)");
  }
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    throw std::domain_error("gaussian_copula_density: u, v must be in (0, 1)");
  }
  if (rho == 0.0) return 1.0;
  const double zu = norm_quantile(u);
  const double zv = norm_quantile(v);
  const double d = 1.0 - rho * rho;
  return std::exp(-(rho * rho * (zu * zu + zv * zv) - 2.0 * rho * zu * zv) /
                  (2.0 * d)) /
         std::sqrt(d);
}

CopulaPredictiveState::CopulaPredictiveState(GriddedDensity f0, double rho,
                                             WeightSchedule schedule)
    : density_(std::move(f0)), rho_(rho), schedule_(std::move(schedule)) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("CopulaPredictiveState: rho in [0, 1)");
  }
}

void CopulaPredictiveState::absorb(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("CopulaPredictiveState: non-finite update");
  }
  const double r = schedule_(step_);
  const double v = clamp_unit(density_.cdf_at(x));
  const double zv = norm_quantile(v);
  const double d = 1.0 - rho_ * rho_;
  const double inv_sqrt_d = 1.0 / std::sqrt(d);
  const std::size_t G = density_.size();
  for (std::size_t i = 0; i < G; ++i) {
    double c;
    if (rho_ == 0.0) {
      c = 1.0;
    } else {
      const double zu = norm_quantile(clamp_unit(density_.cdf[i]));
      c = inv_sqrt_d *
          std::exp(-(rho_ * rho_ * (zu * zu + zv * zv) -
                     2.0 * rho_ * zu * zv) /
                   (2.0 * d));
    }
    density_.density[i] *= (1.0 - r) + r * c;
  }
  density_.renormalize();
  ++step_;
}

double CopulaPredictiveState::sample(Rng& rng) const {
  return density_.quantile(rng.uniform());
}

double CopulaPredictiveState::log_predictive(double x) const {
  return std::log(std::max(density_.pdf_at(x), 1e-300));
}

double d_n_statistic(const GriddedDensity& before,
                     const GriddedDensity& after) {
  if (before.size() != after.size() ||
      before.grid.front() != after.grid.front() ||
      before.grid.back() != after.grid.back()) {
    throw std::invalid_argument("d_n_statistic: grid mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 1; i < before.size(); ++i) {
    double a = std::fabs(after.density[i] - before.density[i]);
    double b = std::fabs(after.density[i - 1] - before.density[i - 1]);
    d += 0.5 * (a + b) * (before.grid[i] - before.grid[i - 1]);
  }
  return d;
}

double example4_dn(double rho, double r, double v, int quad_points) {
  if (!(r > 0.0 && r <= 1.0)) {
    throw std::invalid_argument("example4_dn: r must be in (0, 1]");
  }
  if (quad_points < 3) {
    throw std::invalid_argument("example4_dn: too few quadrature points");
  }
  const double vc = clamp_unit(v);
  double s = 0.0;
  for (int i = 0; i < quad_points; ++i) {
    double u = (i + 0.5) / quad_points;
    s += std::fabs(gaussian_copula_density(rho, u, vc) - 1.0);
  }
  return r * s / quad_points;
}

RhoSelection select_rho(const std::vector<double>& data,
                        const std::vector<double>& rho_grid,
                        const WeightSchedule& schedule,
                        const GriddedDensity& f0) {
  if (data.empty()) throw std::invalid_argument("select_rho: empty data");
  if (rho_grid.empty()) {
    throw std::invalid_argument("select_rho: empty rho grid");
  }
  for (double x : data) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("select_rho: non-finite data");
    }
  }
  RhoSelection sel;
  sel.scores.reserve(rho_grid.size());
  double best = -std::numeric_limits<double>::infinity();
  for (double rho : rho_grid) {
    CopulaPredictiveState state(f0, rho, schedule);
    double score = 0.0;
    for (double x : data) {
      score += state.log_predictive(x);
      state.absorb(x);
    }
    sel.scores.push_back(score);
    if (score > best) {  // strict: ties keep the smaller rho
      best = score;
      sel.rho = rho;
    }
  }
  return sel;
}

std::vector<double> default_rho_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

TvVerdict check_tv_conditions(const WeightSchedule& schedule,
                              std::optional<double> copula_bound) {
  switch (schedule.kind()) {
    case WeightSchedule::Kind::B:
      return TvVerdict::ConvergesByThm3;
    case WeightSchedule::Kind::A:
      return copula_bound ? TvVerdict::ConvergesByThm4 : TvVerdict::Unknown;
    case WeightSchedule::Kind::Constant:
      // A fixed copula density at unit bound is the independence copula, for
      // which the recursion is stationary; otherwise the Example 4
      // separation condition applies.
      if (copula_bound && *copula_bound <= 1.0) return TvVerdict::Unknown;
      return TvVerdict::NonconvergenceByExample4;
    case WeightSchedule::Kind::Custom:
      if (schedule.sum_finite()) return TvVerdict::ConvergesByThm3;
      if (schedule.sum_sq_finite() && copula_bound) {
        return TvVerdict::ConvergesByThm4;
      }
      if (schedule.limsup_positive() &&
          !(copula_bound && *copula_bound <= 1.0)) {
        return TvVerdict::NonconvergenceByExample4;
      }
      return TvVerdict::Unknown;
  }
  return TvVerdict::Unknown;
}

const char* to_string(TvVerdict v) {
  switch (v) {
    case TvVerdict::ConvergesByThm3:
      return "ConvergesByThm3";
    case TvVerdict::ConvergesByThm4:
      return "ConvergesByThm4";
    case TvVerdict::NonconvergenceByExample4:
      return "NonconvergenceByExample4";
    case TvVerdict::Unknown:
      return "Unknown";
  }
  return "?";
}

}  // namespace predres
