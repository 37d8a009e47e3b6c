#include "predres/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "predres/special.hpp"

namespace predres {

namespace {

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double l1_distance(const GriddedDensity& f, const GriddedDensity& g) {
  if (f.size() != g.size() || f.grid.front() != g.grid.front() ||
      f.grid.back() != g.grid.back()) {
    throw std::invalid_argument("l1_distance: grid mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    double a = std::fabs(f.density[i] - g.density[i]);
    double b = std::fabs(f.density[i - 1] - g.density[i - 1]);
    d += 0.5 * (a + b) * (f.grid[i] - f.grid[i - 1]);
  }
  return d;
}

double tv_gaussian_1d(double m1, double v1, double m2, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) {
    throw std::invalid_argument("tv_gaussian_1d: variances must be positive");
  }
  if (m1 == m2 && v1 == v2) return 0.0;
  const double s1 = std::sqrt(v1), s2 = std::sqrt(v2);
  if (v1 == v2) {
    return 2.0 * norm_cdf(std::fabs(m1 - m2) / (2.0 * s1)) - 1.0;
  }
  auto absdiff = [&](double x) {
    return std::fabs(norm_pdf((x - m1) / s1) / s1 -
                     norm_pdf((x - m2) / s2) / s2);
  };
  const double smax = std::max(s1, s2);
  const double lo = std::min(m1, m2) - 12.0 * smax;
  const double hi = std::max(m1, m2) + 12.0 * smax;
  double tv = 0.5 * adaptive_simpson(absdiff, lo, hi, 1e-9);
  return std::min(std::max(tv, 0.0), 1.0);
}

std::vector<PathPoint> convergence_path(const PathConfig& config, long n_max,
                                        const std::vector<long>& checkpoints,
                                        std::uint64_t seed) {
  if (config.kernel.dim() != 1) {
    throw std::invalid_argument("convergence_path: p must be 1");
  }
  std::vector<PathPoint> out;
  Rng rng = substream(seed, 0);

  if (!config.use_copula) {
    // tabulate f_0 once; the predictive density is re-evaluated per node
    const int G = config.grid_size;
    std::vector<double> grid(G), f0(G);
    const double h = (config.grid_max - config.grid_min) / (G - 1);
    Vector z1(1);
    for (int i = 0; i < G; ++i) {
      grid[i] = config.grid_min + i * h;
      z1(0) = grid[i];
      f0[i] = config.kernel.standard_density(z1);
    }
    SufficientStats stats(1, StatsMode::Empirical);
    auto record = [&](long n) {
      LocationScale pred = predictive_at(stats);
      const double s = pred.scale_chol(0, 0);
      double d = 0.0, prev = 0.0;
      for (int i = 0; i < G; ++i) {
        z1(0) = (grid[i] - pred.loc(0)) / s;
        double cur =
            std::fabs(config.kernel.standard_density(z1) / s - f0[i]);
        if (i > 0) d += 0.5 * (cur + prev) * h;
        prev = cur;
      }
      out.push_back({n, d});
    };
    std::size_t ci = 0;
    for (long n = 0; n <= n_max; ++n) {
      while (ci < checkpoints.size() && checkpoints[ci] == n) {
        record(n);
        ++ci;
      }
      if (n == n_max) break;
      Vector x = stats.sample_next(config.kernel, rng);
      stats.absorb(x);
    }
    return out;
  }

  GriddedDensity f0 = GriddedDensity::standard_normal(
      config.grid_min, config.grid_max, config.grid_size);
  CopulaPredictiveState state(f0, config.rho, config.schedule);
  std::size_t ci = 0;
  for (long n = 0; n <= n_max; ++n) {
    while (ci < checkpoints.size() && checkpoints[ci] == n) {
      out.push_back({n, l1_distance(state.density(), f0)});
      ++ci;
    }
    if (n == n_max) break;
    double x = state.sample(rng);
    state.absorb(x);
  }
  return out;
}

long stabilization_index(const std::vector<PathPoint>& path,
                         double threshold) {
  if (path.empty()) return 0;
  const double terminal = path.back().l1_to_f0;
  long stab = path.front().n;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (std::fabs(path[i].l1_to_f0 - terminal) >= threshold) {
      stab = path[i + 1].n;
    }
  }
  return stab;
}

std::vector<RateRow> rate_experiment(const KernelSpec& kernel,
                                     const std::vector<long>& n_list,
                                     double gamma, int reps,
                                     std::uint64_t seed, long limit_factor) {
  if (kernel.dim() != 1) {
    throw std::invalid_argument("rate_experiment: p must be 1");
  }
  if (n_list.empty() || reps < 1) {
    throw std::invalid_argument("rate_experiment: empty setup");
  }
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("rate_experiment: n_list must increase");
    }
  }
  const long n_limit = limit_factor * n_list.back();
  std::vector<std::vector<double>> scaled(n_list.size());

  Vector zv(1);
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(rep));
    long n = 0;
    double m = 0.0, q = 0.0;  // running mean and 1/n variance
    std::vector<std::pair<double, double>> snapshots;
    std::size_t ni = 0;
    while (n < n_limit) {
      double z = kernel.sample_standard(rng)(0);
      double x = n <= 1 ? m + z : m + std::sqrt(q) * z;
      if (n == 0) {
        m = x;
        q = 0.0;
      } else {
        const double nd = static_cast<double>(n);
        const double d = x - m;
        m += d / (nd + 1.0);
        q = nd / (nd + 1.0) * q + nd / ((nd + 1.0) * (nd + 1.0)) * d * d;
      }
      ++n;
      if (ni < n_list.size() && n == n_list[ni]) {
        snapshots.emplace_back(m, q);
        ++ni;
      }
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      double tv =
          tv_gaussian_1d(snapshots[i].first, snapshots[i].second, m, q);
      scaled[i].push_back(std::pow(static_cast<double>(n_list[i]), gamma) *
                          tv);
    }
  }

  std::vector<RateRow> rows;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    auto& v = scaled[i];
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    rows.push_back({n_list[i], v[v.size() / 2]});
  }
  return rows;
}

MartingaleReport martingale_report(const KernelSpec& kernel,
                                   const SufficientStats& history, long draws,
                                   std::uint64_t seed) {
  if (history.singular()) {
    throw std::domain_error("martingale_report: singular covariance");
  }
  const int p = history.dim();
  const long n = history.n();
  const double nd = static_cast<double>(n);
  const double a = nd / (nd + 1.0);
  const double b = nd / ((nd + 1.0) * (nd + 1.0));

  MartingaleReport rep;
  rep.draws = draws;
  rep.q_target =
      history.cov() * (1.0 - 1.0 / ((nd + 1.0) * (nd + 1.0)));

  Matrix qsum = Matrix::Zero(p, p), qsum2 = Matrix::Zero(p, p);
  Vector msum = Vector::Zero(p), msum2 = Vector::Zero(p);
  Rng rng = substream(seed, 0);
  for (long k = 0; k < draws; ++k) {
    Vector z = kernel.sample_standard(rng);
    Vector d = history.chol().triangularView<Eigen::Lower>() * z;
    Matrix qn = a * history.cov() + b * d * d.transpose();
    Vector mn = history.mean() + d / (nd + 1.0);
    qsum += qn;
    qsum2 += qn.cwiseAbs2();
    msum += mn;
    msum2 += mn.cwiseAbs2();
  }
  rep.q_estimate = qsum / static_cast<double>(draws);
  rep.m_estimate = msum / static_cast<double>(draws);

  rep.q_zscores = Matrix::Zero(p, p);
  rep.m_zscores = Vector::Zero(p);
  rep.pass = true;
  for (int i = 0; i < p; ++i) {
    double mvar = msum2(i) / draws - rep.m_estimate(i) * rep.m_estimate(i);
    double mse = std::sqrt(std::max(mvar, 1e-300) / draws);
    rep.m_zscores(i) = (rep.m_estimate(i) - history.mean()(i)) / mse;
    if (std::fabs(rep.m_zscores(i)) >= 4.0) rep.pass = false;
    for (int j = 0; j < p; ++j) {
      double qvar =
          qsum2(i, j) / draws - rep.q_estimate(i, j) * rep.q_estimate(i, j);
      double qse = std::sqrt(std::max(qvar, 1e-300) / draws);
      rep.q_zscores(i, j) =
          (rep.q_estimate(i, j) - rep.q_target(i, j)) / qse;
      if (std::fabs(rep.q_zscores(i, j)) >= 4.0) rep.pass = false;
    }
  }
  return rep;
}

}  // namespace predres
