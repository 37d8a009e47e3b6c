#include <doctest.h>

#include <cmath>

#include "predres/resampler.hpp"

using namespace predres;

namespace {

Matrix column(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST_CASE("estimand evaluation") {
  std::vector<double> xs{1.0, 2.0, 3.0, 6.0};
  CHECK(evaluate_estimand(Estimand::Mean, xs) == doctest::Approx(3.0));
  // 1/n convention: mean 3, squared deviations 4+1+0+9 = 14, /4
  CHECK(evaluate_estimand(Estimand::Variance, xs) == doctest::Approx(3.5));
  std::vector<double> empty;
  CHECK_THROWS(evaluate_estimand(Estimand::Mean, empty));
}

TEST_CASE("summary quantiles") {
  std::vector<double> t;
  for (int i = 1; i <= 100; ++i) t.push_back(static_cast<double>(i));
  auto s = summarize(t);
  CHECK(s.mean == doctest::Approx(50.5));
  // 1/B variance of 1..100
  CHECK(s.variance == doctest::Approx((100.0 * 100.0 - 1.0) / 12.0));
  CHECK(s.q50 == doctest::Approx(50.5).epsilon(0.02));
  CHECK(s.q05 < s.q50);
  CHECK(s.q50 < s.q95);
}

TEST_CASE("N = 0 returns the plug-in estimate for every replicate") {
  ResamplingPlan plan;
  plan.N = 0;
  plan.B = 16;
  plan.estimand = Estimand::Mean;
  plan.family = MeanVarFamily{KernelSpec::gaussian(1), StatsMode::Empirical};
  auto data = column({0.0, 1.0, 5.0});
  auto out = run_pr(plan, data);
  REQUIRE(out.thetas.size() == 16);
  for (double t : out.thetas) CHECK(t == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("seed determinism and thread invariance") {
  auto data = column({-1.0, 0.3, 0.7, 2.2, -0.5});
  ResamplingPlan plan;
  plan.N = 50;
  plan.B = 64;
  plan.seed = 99;
  plan.family = MeanVarFamily{KernelSpec::gaussian(1), StatsMode::Empirical};

  plan.threads = 1;
  auto a = run_pr(plan, data);
  auto b = run_pr(plan, data);
  plan.threads = 4;
  auto c = run_pr(plan, data);
  REQUIRE(a.thetas.size() == b.thetas.size());
  REQUIRE(a.thetas.size() == c.thetas.size());
  for (std::size_t i = 0; i < a.thetas.size(); ++i) {
    CHECK(a.thetas[i] == b.thetas[i]);
    CHECK(a.thetas[i] == c.thetas[i]);
  }
  plan.seed = 100;
  auto d = run_pr(plan, data);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.thetas.size(); ++i) {
    any_diff = any_diff || a.thetas[i] != d.thetas[i];
  }
  CHECK(any_diff);
}

TEST_CASE("input validation") {
  ResamplingPlan plan;
  plan.family = MeanVarFamily{KernelSpec::gaussian(2), StatsMode::Empirical};
  Matrix data2(3, 2);
  data2 << 0, 1, 1, 0, 2, 2;
  // empirical mode with p >= 2 needs the explicit opt-in
  CHECK_THROWS(run_pr(plan, data2));
  plan.allow_degenerate = true;
  plan.B = 4;
  plan.N = 5;
  CHECK_NOTHROW(run_pr(plan, data2));

  // kernel/data dimension mismatch
  plan.family = MeanVarFamily{KernelSpec::gaussian(3), StatsMode::Empirical};
  CHECK_THROWS(run_pr(plan, data2));

  // copula family is 1-d only
  plan.family = CopulaFamily{};
  CHECK_THROWS(run_pr(plan, data2));
}

TEST_CASE("copula family records the selected rho") {
  Rng rng = substream(8, 0);
  Matrix data(60, 1);
  for (int i = 0; i < 60; ++i) data(i, 0) = rng.normal();
  ResamplingPlan plan;
  plan.N = 20;
  plan.B = 8;
  plan.seed = 5;
  CopulaFamily fam;
  fam.rho_grid = {0.1, 0.5};
  fam.grid_size = 501;
  plan.family = fam;
  auto out = run_pr(plan, data);
  REQUIRE(out.selected_rho.has_value());
  CHECK((*out.selected_rho == 0.1 || *out.selected_rho == 0.5));

  fam.rho = 0.3;
  plan.family = fam;
  auto out2 = run_pr(plan, data);
  CHECK_FALSE(out2.selected_rho.has_value());
}

TEST_CASE("mean-estimand PR matches the closed form (small run)") {
  Rng rng = substream(17, 0);
  const long s = 30;
  Matrix data(s, 1);
  for (long i = 0; i < s; ++i) data(i, 0) = 2.0 + rng.normal();
  double xbar = data.col(0).mean();
  double sig2 = (data.col(0).array() - xbar).square().sum() / s;

  ResamplingPlan plan;
  plan.N = 100;
  plan.B = 2000;
  plan.seed = 3;
  plan.family = MeanVarFamily{KernelSpec::gaussian(1), StatsMode::Empirical};
  auto out = run_pr(plan, data);
  auto cf = posterior_mean_moments(s, xbar, sig2, plan.N);
  double se = std::sqrt(cf.variance / plan.B);
  CHECK(std::fabs(out.summary.mean - cf.mean) < 4.0 * se);
  CHECK(out.summary.variance ==
        doctest::Approx(cf.variance).epsilon(0.15));
}

TEST_CASE("kde") {
  std::vector<double> t{-1.0, -0.5, 0.0, 0.2, 0.5, 0.9, 1.4, 2.0};
  auto grid = kde_default_grid(t, 0.5);
  auto g = kde(t, 0.5, grid);
  CHECK(g.trapezoid_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.pdf_at(0.2) > g.pdf_at(5.0));

  auto g2 = kde(t, std::nullopt, grid);  // Silverman bandwidth
  CHECK(g2.trapezoid_mass() == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> flat(10, 3.0);
  CHECK_THROWS(kde(flat, std::nullopt, grid));  // degenerate auto bandwidth
  CHECK_NOTHROW(kde(flat, 0.25, kde_default_grid(flat, 0.25)));
}
