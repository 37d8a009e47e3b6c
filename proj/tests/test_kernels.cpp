#include <doctest.h>

#include <cmath>
#include <fstream>

#include "predres/kernels.hpp"
#include "predres/special.hpp"

using namespace predres;

namespace {

// composite Simpson quadrature of a 1-d integrand
template <class F>
double simpson(const F& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double density_1d(const KernelSpec& k, double z) {
  Vector v(1);
  v(0) = z;
  return k.standard_density(v);
}

}  // namespace

TEST_CASE("special functions against frozen references") {
  // norm_cdf(1.96) computed from erfc
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(norm_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  // quantile is the functional inverse of the cdf across the bulk
  for (double p : {1e-10, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
  }
  // I_x(a,b) at analytic points: I_x(1,1) = x, I_x(2,2) = x^2(3-2x)
  CHECK(betainc_reg(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(betainc_reg(2, 2, 0.4) ==
        doctest::Approx(0.4 * 0.4 * (3 - 0.8)).epsilon(1e-12));
  // t-cdf symmetry and the Cauchy-adjacent check t(1): F(1) = 3/4
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(student_t_cdf(-2.0, 7.0) + student_t_cdf(2.0, 7.0) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("gaussian kernel normalization and cdf") {
  auto k = KernelSpec::gaussian(1);
  double mass =
      simpson([&](double z) { return density_1d(k, z); }, -50, 50, 20000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  for (double z : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    double num =
        simpson([&](double t) { return density_1d(k, t); }, -50, z, 20000);
    CHECK(k.standard_cdf_1d(z) == doctest::Approx(num).epsilon(1e-8));
  }
}

TEST_CASE("student kernel is standardized") {
  auto k = KernelSpec::student_t(1, 4.0);
  double mass =
      simpson([&](double z) { return density_1d(k, z); }, -200, 200, 400000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  double var = simpson([&](double z) { return z * z * density_1d(k, z); },
                       -200, 200, 400000);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
  for (double z : {-1.5, 0.0, 0.7, 2.5}) {
    double num =
        simpson([&](double t) { return density_1d(k, t); }, -200, z, 400000);
    CHECK(k.standard_cdf_1d(z) == doctest::Approx(num).epsilon(1e-7));
  }
  CHECK_THROWS(KernelSpec::student_t(1, 2.0));
  CHECK_THROWS(KernelSpec::student_t(1, 1.5));
}

TEST_CASE("mixture kernel is whitened") {
  std::vector<MixtureComponent> comps;
  Vector m1(1), m2(1);
  m1 << -3.0;
  m2 << 2.0;
  Matrix v1(1, 1), v2(1, 1);
  v1 << 0.5;
  v2 << 2.0;
  comps.push_back({0.4, m1, v1});
  comps.push_back({0.6, m2, v2});
  auto k = KernelSpec::gaussian_mixture(comps);

  double mass =
      simpson([&](double z) { return density_1d(k, z); }, -60, 60, 60000);
  double mean = simpson([&](double z) { return z * density_1d(k, z); }, -60,
                        60, 60000);
  double var = simpson([&](double z) { return z * z * density_1d(k, z); },
                       -60, 60, 60000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
  for (double z : {-2.0, 0.0, 1.3}) {
    double num =
        simpson([&](double t) { return density_1d(k, t); }, -60, z, 60000);
    CHECK(k.standard_cdf_1d(z) == doctest::Approx(num).epsilon(1e-8));
  }
}

TEST_CASE("monte carlo validation of every family") {
  Rng rng = substream(7, 0);
  for (auto k : {KernelSpec::gaussian(2), KernelSpec::student_t(2, 5.0)}) {
    auto rep = validate_kernel(k, 200000, rng);
    CHECK(rep.pass());
  }
  std::vector<MixtureComponent> comps;
  Vector m1(2), m2(2);
  m1 << 1.0, -1.0;
  m2 << -0.5, 0.5;
  Matrix c1 = Matrix::Identity(2, 2), c2 = Matrix::Identity(2, 2) * 3.0;
  c2(0, 1) = c2(1, 0) = 0.8;
  comps.push_back({0.3, m1, c1});
  comps.push_back({0.7, m2, c2});
  auto mix = KernelSpec::gaussian_mixture(comps);
  auto rep = validate_kernel(mix, 200000, rng);
  CHECK(rep.pass());
}

TEST_CASE("parse_kernel round trips") {
  auto g = parse_kernel("gaussian", 3);
  CHECK(g.family() == KernelSpec::Family::Gaussian);
  CHECK(g.dim() == 3);
  auto t = parse_kernel("student:4.5", 2);
  CHECK(t.family() == KernelSpec::Family::StudentT);
  CHECK(t.df() == doctest::Approx(4.5));
  CHECK_THROWS(parse_kernel("student:2", 1));
  CHECK_THROWS(parse_kernel("wibble", 1));

  const char* path = "mixture_tmp.csv";
  {
    std::ofstream f(path);
    f << "weight,mean,cov\n";
    f << "0.25,-5,1\n0.75,2,4\n";
  }
  auto mk = parse_kernel(std::string("mixture:") + path, 1);
  CHECK(mk.family() == KernelSpec::Family::GaussianMixture);
  CHECK(mk.components().size() == 2);
  // whitened: unit second moment
  Rng rng = substream(3, 1);
  auto rep = validate_kernel(mk, 100000, rng);
  CHECK(rep.pass());
  std::remove(path);
}
