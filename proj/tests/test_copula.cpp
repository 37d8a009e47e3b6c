#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "predres/copula.hpp"
#include "predres/diagnostics.hpp"
#include "predres/special.hpp"

using namespace predres;

TEST_CASE("gaussian copula density") {
  CHECK(gaussian_copula_density(0.0, 0.3, 0.8) == 1.0);
  // rho = 0.9 at the median pair: c = 1/sqrt(1 - rho^2) since z_u = z_v = 0
  CHECK(gaussian_copula_density(0.9, 0.5, 0.5) ==
        doctest::Approx(1.0 / std::sqrt(0.19)).epsilon(1e-14));
  CHECK_THROWS(gaussian_copula_density(0.9, 0.0, 0.5));
  CHECK_THROWS(gaussian_copula_density(0.9, 0.5, 1.0));
  CHECK_THROWS(gaussian_copula_density(-0.1, 0.5, 0.5));
  CHECK_THROWS(gaussian_copula_density(1.0, 0.5, 0.5));

  // uniform marginal: int_0^1 c(u, v) du = 1 for any v
  for (double rho : {0.3, 0.7}) {
    for (double v : {0.2, 0.5, 0.9}) {
      const int n = 200000;
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double u = (i + 0.5) / n;
        s += gaussian_copula_density(rho, u, v);
      }
      CHECK(s / n == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("weight schedules match their formulas") {
  auto a = WeightSchedule::schedule_a();
  auto b = WeightSchedule::schedule_b();
  CHECK(a(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a(1) == doctest::Approx((2.0 - 0.5) / 3.0).epsilon(1e-15));
  double l3 = std::log(3.0);
  CHECK(b(0) == doctest::Approx(1.5 / (3.0 * l3 * l3)).epsilon(1e-15));
  // schedule A behaves like 2/n, schedule B is summable
  CHECK(a(9999) == doctest::Approx(2.0 / 10001.0).epsilon(1e-3));
  double sa = 0.0, sb = 0.0;
  for (long n = 0; n < 200000; ++n) {
    sa += a(n);
    sb += b(n);
  }
  CHECK(sa > 20.0);  // divergent, ~2 log n
  CHECK(sb < 3.0);
  for (long n : {0L, 5L, 1000L}) {
    CHECK(a(n) > 0.0);
    CHECK(a(n) < 1.0);
    CHECK(b(n) < a(n));
  }

  auto c = WeightSchedule::constant(0.25);
  CHECK(c(0) == 0.25);
  CHECK(c(1000000) == 0.25);
  CHECK_THROWS(WeightSchedule::constant(0.0));
  CHECK_THROWS(WeightSchedule::constant(1.5));

  auto u = WeightSchedule::custom({0.5, 0.25}, false, true, false);
  CHECK(u(0) == 0.5);
  CHECK(u(1) == 0.25);
  CHECK(u(10) == 0.25);  // last value repeats
  CHECK_THROWS(WeightSchedule::custom({}, false, false, false));
}

TEST_CASE("gridded density is self-consistent") {
  auto g = GriddedDensity::standard_normal(-8, 8, 1601);
  CHECK(g.trapezoid_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.cdf_at(0.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(g.pdf_at(0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-4));
  CHECK(g.pdf_at(-100.0) == 0.0);
  CHECK(g.cdf_at(100.0) == 1.0);
  // quantile inverts cdf_at exactly on the shared piecewise-linear cdf
  for (double u : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    CHECK(g.cdf_at(g.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
  }
  CHECK_THROWS(GriddedDensity::standard_normal(5, -5, 101));
  CHECK_THROWS(GriddedDensity::from_density({0, 1}, {1, 1}));
}

TEST_CASE("copula update invariants") {
  auto f0 = GriddedDensity::standard_normal(-10, 10, 2001);
  CopulaPredictiveState state(f0, 0.8, WeightSchedule::schedule_a());
  Rng rng = substream(21, 0);
  for (int n = 0; n < 50; ++n) {
    GriddedDensity before = state.density();
    double r = state.schedule()(state.step());
    double x = state.sample(rng);
    state.absorb(x);
    CHECK(state.density().trapezoid_mass() ==
          doctest::Approx(1.0).epsilon(1e-12));
    double dmin = *std::min_element(state.density().density.begin(),
                                    state.density().density.end());
    CHECK(dmin >= 0.0);
    // Theorem 3 bound holds pathwise up to renormalization error
    CHECK(d_n_statistic(before, state.density()) <= 2.0 * r + 1e-3);
  }
  CHECK(state.step() == 50);
  CHECK_THROWS(state.absorb(std::nan("")));
  CHECK_THROWS(CopulaPredictiveState(f0, 1.0, WeightSchedule::schedule_a()));
}

TEST_CASE("example4_dn in the u-coordinate") {
  CHECK(example4_dn(0.0, 1.0, 0.3) == 0.0);  // independence copula
  Rng rng = substream(41, 0);
  for (int i = 0; i < 20; ++i) {
    double v = rng.uniform();
    double d = example4_dn(0.9, 0.5, v);
    CHECK(d > 0.0);
    CHECK(d <= 2.0 * 0.5 + 1e-6);  // D_n <= 2 r_n
  }
  // scales linearly in r
  CHECK(example4_dn(0.7, 1.0, 0.4) ==
        doctest::Approx(4.0 * example4_dn(0.7, 0.25, 0.4)).epsilon(1e-12));
  CHECK_THROWS(example4_dn(0.7, 0.0, 0.4));
}

TEST_CASE("d_n_statistic basics") {
  auto f = GriddedDensity::standard_normal(-10, 10, 801);
  CHECK(d_n_statistic(f, f) == 0.0);
  auto g = GriddedDensity::standard_normal(-10, 10, 901);
  CHECK_THROWS(d_n_statistic(f, g));
}

TEST_CASE("pit of inverse sampling is uniform") {
  auto f0 = GriddedDensity::standard_normal(-10, 10, 2001);
  CopulaPredictiveState state(f0, 0.5, WeightSchedule::schedule_a());
  Rng rng = substream(33, 0);
  for (int i = 0; i < 30; ++i) state.absorb(state.sample(rng));
  // Kolmogorov-Smirnov of F(X) against U(0,1)
  const int n = 20000;
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    u[i] = state.density().cdf_at(state.sample(rng));
  }
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    ks = std::max(ks, std::fabs(u[i] - (i + 1.0) / n));
    ks = std::max(ks, std::fabs(u[i] - static_cast<double>(i) / n));
  }
  CHECK(ks < 1.95 / std::sqrt(static_cast<double>(n)));  // ~ 0.1% level
}

TEST_CASE("prequential rho selection") {
  auto f0 = GriddedDensity::standard_normal(-10, 10, 1001);
  auto sched = WeightSchedule::schedule_a();

  auto single = select_rho({0.1, -0.2, 0.3}, {0.4}, sched, f0);
  CHECK(single.rho == 0.4);
  CHECK(single.scores.size() == 1);

  CHECK_THROWS(select_rho({}, {0.4}, sched, f0));
  CHECK_THROWS(select_rho({0.1}, {}, sched, f0));

  auto grid = default_rho_grid();
  REQUIRE(grid.size() == 19);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(0.95));

  // two well-separated clusters demand strong dependence
  Rng rng = substream(5, 0);
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) {
    xs.push_back((i % 2 ? 4.0 : -4.0) + 0.3 * rng.normal());
  }
  auto sel = select_rho(xs, grid, sched, f0);
  CHECK(sel.rho >= 0.5);
}

TEST_CASE("total-variation verdicts") {
  using K = WeightSchedule;
  CHECK(check_tv_conditions(K::schedule_b(), std::nullopt) ==
        TvVerdict::ConvergesByThm3);
  CHECK(check_tv_conditions(K::schedule_a(), 2.0) ==
        TvVerdict::ConvergesByThm4);
  CHECK(check_tv_conditions(K::schedule_a(), std::nullopt) ==
        TvVerdict::Unknown);
  CHECK(check_tv_conditions(K::constant(0.5), std::nullopt) ==
        TvVerdict::NonconvergenceByExample4);
  CHECK(check_tv_conditions(K::constant(0.5), 1.0) == TvVerdict::Unknown);
  CHECK(check_tv_conditions(K::custom({0.1}, true, true, false),
                            std::nullopt) == TvVerdict::ConvergesByThm3);
  CHECK(check_tv_conditions(K::custom({0.1}, false, true, false), 3.0) ==
        TvVerdict::ConvergesByThm4);
  CHECK(check_tv_conditions(K::custom({0.1}, false, false, true),
                            std::nullopt) ==
        TvVerdict::NonconvergenceByExample4);
  CHECK(check_tv_conditions(K::custom({0.1}, false, false, false),
                            std::nullopt) == TvVerdict::Unknown);
  CHECK(std::string(to_string(TvVerdict::ConvergesByThm3)) ==
        "ConvergesByThm3");
}
