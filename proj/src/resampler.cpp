#include "predres/resampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "predres/special.hpp"

namespace predres {

namespace {

// Scalar running (n, mean, 1/n-variance) following the same rank-one
// recursion as SufficientStats, so estimand values match batch evaluation.
struct ScalarStat {
  long n = 0;
  double mean = 0.0;
  double q = 0.0;

  void absorb(double x) {
    if (n == 0) {
      mean = x;
      q = 0.0;
      n = 1;
      return;
    }
    const double nd = static_cast<double>(n);
    const double d = x - mean;
    mean += d / (nd + 1.0);
    q = nd / (nd + 1.0) * q + nd / ((nd + 1.0) * (nd + 1.0)) * d * d;
    ++n;
  }

  double value(Estimand kind) const {
    return kind == Estimand::Mean ? mean : q;
  }
};

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.size() == 1) return sorted.front();
  double h = p * (static_cast<double>(sorted.size()) - 1.0);
  std::size_t i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= sorted.size()) return sorted.back();
  double t = h - static_cast<double>(i);
  return sorted[i] + t * (sorted[i + 1] - sorted[i]);
}

template <class Body>
void run_replicates(long B, int threads, Body&& body) {
  unsigned hw = std::thread::hardware_concurrency();
  int nthreads = threads > 0 ? threads : static_cast<int>(hw ? hw : 1);
  nthreads = static_cast<int>(std::min<long>(nthreads, B));
  if (nthreads <= 1) {
    for (long b = 0; b < B; ++b) body(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (long b = t; b < B; b += nthreads) body(b);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double evaluate_estimand(Estimand kind, std::span<const double> points) {
  if (points.empty()) {
    throw std::invalid_argument("evaluate_estimand: empty input");
  }
  double mean = 0.0;
  for (double x : points) mean += x;
  mean /= static_cast<double>(points.size());
  if (kind == Estimand::Mean) return mean;
  double q = 0.0;
  for (double x : points) q += (x - mean) * (x - mean);
  return q / static_cast<double>(points.size());
}

Summary summarize(const std::vector<double>& thetas) {
  if (thetas.empty()) throw std::invalid_argument("summarize: empty sample");
  Summary s;
  for (double t : thetas) s.mean += t;
  s.mean /= static_cast<double>(thetas.size());
  for (double t : thetas) s.variance += (t - s.mean) * (t - s.mean);
  s.variance /= static_cast<double>(thetas.size());
  std::vector<double> sorted = thetas;
  std::sort(sorted.begin(), sorted.end());
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q95 = quantile_sorted(sorted, 0.95);
  return s;
}

PosteriorSample run_pr(const ResamplingPlan& plan, const Matrix& data) {
  const auto t0 = std::chrono::steady_clock::now();
  const long s = data.rows();
  const int p = static_cast<int>(data.cols());
  if (s < 1 || p < 1) throw std::invalid_argument("run_pr: empty dataset");
  if (!data.allFinite()) throw std::invalid_argument("run_pr: non-finite data");
  if (plan.N < 0 || plan.B < 1) {
    throw std::invalid_argument("run_pr: N >= 0 and B >= 1 required");
  }

  PosteriorSample out;
  out.thetas.assign(plan.B, 0.0);

  // Estimands are scalar; for p >= 2 they are evaluated on the first
  // coordinate of the sequence.
  ScalarStat base_stat;
  for (long i = 0; i < s; ++i) base_stat.absorb(data(i, 0));

  if (const auto* mv = std::get_if<MeanVarFamily>(&plan.family)) {
    if (mv->kernel.dim() != p) {
      throw std::invalid_argument("run_pr: kernel/data dimension mismatch");
    }
    if (mv->mode == StatsMode::Empirical && p >= 2 && !plan.allow_degenerate) {
      throw std::invalid_argument(
          "run_pr: empirical mode with p >= 2 yields a degenerate predictive; "
          "pass allow_degenerate to force");
    }
    SufficientStats base(p, mv->mode);
    for (long i = 0; i < s; ++i) base.absorb(data.row(i).transpose());

    run_replicates(plan.B, plan.threads, [&](long b) {
      Rng rng = substream(plan.seed, static_cast<std::uint64_t>(b));
      SufficientStats stats = base;
      ScalarStat est = base_stat;
      for (long j = 0; j < plan.N; ++j) {
        Vector x = stats.sample_next(mv->kernel, rng);
        stats.absorb(x);
        est.absorb(x(0));
      }
      out.thetas[static_cast<std::size_t>(b)] = est.value(plan.estimand);
    });
  } else {
    const auto& cf = std::get<CopulaFamily>(plan.family);
    if (p != 1) throw std::invalid_argument("run_pr: copula family needs p=1");
    GriddedDensity f0 =
        GriddedDensity::standard_normal(cf.grid_min, cf.grid_max,
                                        cf.grid_size);
    std::vector<double> xs(data.data(), data.data() + s);
    double rho;
    if (cf.rho) {
      rho = *cf.rho;
    } else {
      const auto& grid =
          cf.rho_grid.empty() ? default_rho_grid() : cf.rho_grid;
      rho = select_rho(xs, grid, cf.schedule, f0).rho;
      out.selected_rho = rho;
    }
    CopulaPredictiveState base(f0, rho, cf.schedule);
    for (double x : xs) base.absorb(x);

    run_replicates(plan.B, plan.threads, [&](long b) {
      Rng rng = substream(plan.seed, static_cast<std::uint64_t>(b));
      CopulaPredictiveState state = base;
      ScalarStat est = base_stat;
      for (long j = 0; j < plan.N; ++j) {
        double x = state.sample(rng);
        state.absorb(x);
        est.absorb(x);
      }
      out.thetas[static_cast<std::size_t>(b)] = est.value(plan.estimand);
    });
  }

  out.summary = summarize(out.thetas);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  return out;
}

GriddedDensity kde(const std::vector<double>& thetas,
                   std::optional<double> bandwidth,
                   const std::vector<double>& grid) {
  if (thetas.empty()) throw std::invalid_argument("kde: empty sample");
  double h;
  if (bandwidth) {
    h = *bandwidth;
  } else {
    if (thetas.size() < 2) {
      throw std::invalid_argument("kde: automatic bandwidth needs B >= 2");
    }
    Summary s = summarize(thetas);
    std::vector<double> sorted = thetas;
    std::sort(sorted.begin(), sorted.end());
    double iqr =
        quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double sd = std::sqrt(s.variance);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0)) {
      throw std::invalid_argument("kde: degenerate sample, pass a bandwidth");
    }
    h = 0.9 * spread *
        std::pow(static_cast<double>(thetas.size()), -0.2);
  }
  if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be > 0");

  std::vector<double> dens(grid.size(), 0.0);
  const double scale = 1.0 / (static_cast<double>(thetas.size()) * h);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double f = 0.0;
    for (double t : thetas) f += norm_pdf((grid[i] - t) / h);
    dens[i] = f * scale;
  }
  return GriddedDensity::from_density(grid, std::move(dens));
}

std::vector<double> kde_default_grid(const std::vector<double>& thetas,
                                     double bandwidth, int size) {
  auto [lo, hi] = std::minmax_element(thetas.begin(), thetas.end());
  double a = *lo - 5.0 * bandwidth;
  double b = *hi + 5.0 * bandwidth;
  if (!(b > a)) b = a + 1.0;
  std::vector<double> g(size);
  for (int i = 0; i < size; ++i) {
    g[i] = a + (b - a) * static_cast<double>(i) / (size - 1);
  }
  return g;
}

}  // namespace predres
