#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kdvlab/oracle.hpp"
#include "kdvlab/spectral.hpp"

using namespace kdvlab;

namespace {

constexpr double kPi = std::numbers::pi;

RealField gaussian(const Grid& g, double width = 1.0) {
  return RealField::sample(
      g, [&](double x) { return std::exp(-x * x / (2.0 * width * width)); });
}

RealField random_band_limited(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  RealField f(g);
  for (int k = 1; k <= 6; ++k) {
    const double a = amp(rng);
    const double b = amp(rng);
    for (int m = 0; m < g.n(); ++m) {
      const double th = 2.0 * kPi * k * g.x(m) / g.L();
      f[m] += a * std::cos(th) + b * std::sin(th);
    }
  }
  return f;
}

}  // namespace

TEST_CASE("grid layout") {
  Grid g = make_grid(16, 8.0);
  CHECK(g.dx() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.x(0) == doctest::Approx(-4.0));
  CHECK(g.x(15) == doctest::Approx(3.5));
  CHECK(g.mode(0) == 0);
  CHECK(g.mode(7) == 7);
  CHECK(g.mode(8) == -8);
  CHECK(g.mode(15) == -1);
  CHECK(g.nyquist_index() == 8);
  CHECK(g.xi(1) == doctest::Approx(2.0 * kPi / 8.0));
  CHECK(g.xi(8) == doctest::Approx(-8.0 * 2.0 * kPi / 8.0));
  CHECK(make_grid(16, 8.0) == g);
  CHECK(make_grid(32, 8.0) != g);

  CHECK_THROWS(make_grid(12, 8.0));  // not a power of two
  CHECK_THROWS(make_grid(4, 8.0));   // too small
  CHECK_THROWS(make_grid(16, 0.0));
  CHECK_THROWS(make_grid(16, -1.0));
}

TEST_CASE("transform round trip is the identity") {
  Grid g = make_grid(128, 40.0);
  RealField f = gaussian(g);
  add_scaled(f, 0.3, random_band_limited(g, 17));
  RealField back = to_physical(to_spectral(f));
  for (int m = 0; m < g.n(); ++m) {
    CHECK(back[m] == doctest::Approx(f[m]).epsilon(1e-12));
  }
}

TEST_CASE("forward transform matches the direct summation") {
  Grid g = make_grid(128, 30.0);
  RealField f = gaussian(g);
  add_scaled(f, 0.2, random_band_limited(g, 3));
  SpectralField fast = to_spectral(f);
  SpectralField slow = oracle::direct_transform(f);
  for (int i = 0; i < g.n(); ++i) {
    CHECK(std::abs(fast[i] - slow[i]) < 1e-10);
  }
}

TEST_CASE("gaussian transform hits the closed form") {
  // exp(-x^2/2) transforms to sqrt(2 pi) exp(-xi^2/2).
  Grid g = make_grid(256, 64.0);
  SpectralField F = to_spectral(gaussian(g));
  CHECK(F[0].real() == doctest::Approx(2.5066282746310002).epsilon(1e-12));
  CHECK(F[0].imag() == doctest::Approx(0.0).epsilon(1e-14));
  for (int i = 0; i < g.n(); ++i) {
    const double xi = g.xi(i);
    if (std::abs(xi) > 4.0) continue;
    const double expected = 2.5066282746310002 * std::exp(-xi * xi / 2.0);
    CHECK(F[i].real() == doctest::Approx(expected).epsilon(1e-11));
    CHECK(std::abs(F[i].imag()) < 1e-12);
  }
}

TEST_CASE("real fields have Hermitian coefficients") {
  Grid g = make_grid(64, 20.0);
  RealField f = random_band_limited(g, 5);
  SpectralField F = to_spectral(f);
  for (int i = 1; i < g.n() / 2; ++i) {
    CHECK(std::abs(F[i] - std::conj(F[g.n() - i])) < 1e-12);
  }
}

TEST_CASE("Plancherel identity") {
  Grid g = make_grid(128, 32.0);
  RealField f = gaussian(g);
  add_scaled(f, 0.4, random_band_limited(g, 11));
  const double physical = lp_norm(f, Lp::L2);
  const double spectral = std::sqrt(plancherel_l2_squared(to_spectral(f)));
  CHECK(spectral == doctest::Approx(physical).epsilon(1e-12));
}

TEST_CASE("norms of the unit gaussian") {
  Grid g = make_grid(512, 64.0);
  RealField f = gaussian(g);
  CHECK(lp_norm(f, Lp::L1) == doctest::Approx(2.5066282746310002).epsilon(1e-12));
  CHECK(lp_norm(f, Lp::L2) == doctest::Approx(1.3313353638003897).epsilon(1e-12));
  CHECK(lp_norm(f, Lp::Linf) == doctest::Approx(1.0).epsilon(1e-12));
  // || d/dx exp(-x^2/2) ||_{L^2} = pi^{1/4} / sqrt(2).
  CHECK(sobolev_norm(f, Lp::L2, 1) ==
        doctest::Approx(0.9413962637767148).epsilon(1e-11));
  CHECK(sobolev_norm(f, Lp::L2, 0) ==
        doctest::Approx(lp_norm(f, Lp::L2)).epsilon(1e-14));
}

TEST_CASE("spectral derivative of a single harmonic") {
  Grid g = make_grid(64, 2.0 * kPi);
  const int k0 = 3;
  RealField f = RealField::sample(g, [&](double x) { return std::sin(k0 * x); });
  RealField d1 = to_physical(derivative(to_spectral(f), 1));
  RealField d3 = to_physical(derivative(to_spectral(f), 3));
  for (int m = 0; m < g.n(); ++m) {
    const double x = g.x(m);
    CHECK(d1[m] == doctest::Approx(k0 * std::cos(k0 * x)).epsilon(1e-10));
    CHECK(d3[m] ==
          doctest::Approx(-k0 * k0 * k0 * std::cos(k0 * x)).epsilon(1e-10));
  }
}

TEST_CASE("odd derivative of the pure Nyquist mode vanishes") {
  Grid g = make_grid(32, 16.0);
  // Alternating +1/-1 samples: exactly the Nyquist cosine.
  RealField f(g);
  for (int m = 0; m < g.n(); ++m) f[m] = (m % 2 == 0) ? 1.0 : -1.0;
  RealField d1 = to_physical(derivative(to_spectral(f), 1));
  for (int m = 0; m < g.n(); ++m) CHECK(std::abs(d1[m]) < 1e-13);
}

TEST_CASE("dissipation and dispersion symbols") {
  Grid g = make_grid(32, 8.0);
  std::vector<double> sym = dissipation_symbol(g, 1.5);
  CHECK(sym[0] == 0.0);
  for (int i = 1; i < g.n(); ++i) {
    CHECK(sym[i] == doctest::Approx(std::pow(std::abs(g.xi(i)), 1.5)));
  }
  CHECK_THROWS(dissipation_symbol(g, 0.0));
  CHECK_THROWS(dissipation_symbol(g, 2.5));

  std::vector<std::complex<double>> disp = dispersion_symbol(g);
  CHECK(disp[g.nyquist_index()] == std::complex<double>(0.0, 0.0));
  for (int i = 0; i < g.n(); ++i) {
    if (i == g.nyquist_index()) continue;
    const double xi = g.xi(i);
    CHECK(disp[i].real() == 0.0);
    CHECK(disp[i].imag() == doctest::Approx(xi * xi * xi));
  }
}

TEST_CASE("moments of gaussian and its derivative") {
  Grid g = make_grid(512, 64.0);
  RealField f = gaussian(g);
  MomentResult m0 = moment(f, 0);
  MomentResult m1 = moment(f, 1);
  MomentResult m2 = moment(f, 2);
  CHECK(m0.decay_ok);
  CHECK(m0.value == doctest::Approx(2.5066282746310002).epsilon(1e-12));
  CHECK(std::abs(m1.value) < 1e-12);
  CHECK(m2.value == doctest::Approx(2.5066282746310002).epsilon(1e-10));

  RealField df = RealField::sample(
      g, [](double x) { return -x * std::exp(-x * x / 2.0); });
  CHECK(moment(df, 0).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(moment(df, 1).value ==
        doctest::Approx(-2.5066282746310002).epsilon(1e-11));
}

TEST_CASE("moment decay guard flags a wide field") {
  Grid g = make_grid(64, 8.0);  // box barely contains the gaussian
  RealField f = gaussian(g, 2.0);
  CHECK_FALSE(moment(f, 0).decay_ok);
}

TEST_CASE("rescale dilates a gaussian mass-preservingly") {
  // lambda f(lambda x): exp(-x^2/2) with lambda = 2 becomes
  // 2 exp(-2 x^2), same integral.
  Grid g = make_grid(512, 64.0);
  RealField f = gaussian(g);
  RealField r = rescale(f, 2.0);
  for (int m = 0; m < g.n(); ++m) {
    const double x = g.x(m);
    if (std::abs(x) > 10.0) continue;
    CHECK(r[m] == doctest::Approx(2.0 * std::exp(-2.0 * x * x)).epsilon(1e-9));
  }
  CHECK(moment(r, 0).value == doctest::Approx(moment(f, 0).value).epsilon(1e-10));
}

TEST_CASE("rescale rejects unrepresentable dilations") {
  Grid g = make_grid(64, 16.0);
  // Nearly band-filling data cannot be squeezed (spectrum would spill).
  RealField osc(g);
  for (int m = 0; m < g.n(); ++m) {
    osc[m] = std::cos(2.0 * kPi * 20.0 * g.x(m) / g.L());
  }
  CHECK_THROWS(rescale(osc, 0.5));
  // A wide field cannot be stretched (samples would leave the box).
  RealField wide = gaussian(g, 4.0);
  CHECK_THROWS(rescale(wide, 3.0));
}

TEST_CASE("convolution matches the direct summation") {
  Grid g = make_grid(128, 40.0);
  RealField f = gaussian(g);
  RealField h = RealField::sample(
      g, [](double x) { return std::exp(-2.0 * x * x) * (1.0 + x); });
  RealField fast = convolve(f, h);
  RealField slow = oracle::direct_convolution(f, h);
  for (int m = 0; m < g.n(); ++m) {
    CHECK(fast[m] == doctest::Approx(slow[m]).epsilon(1e-9));
  }
}

TEST_CASE("convolution of gaussians widens them") {
  // exp(-x^2/2) * exp(-x^2/2) = sqrt(pi) exp(-x^2/4).
  Grid g = make_grid(256, 64.0);
  RealField f = gaussian(g);
  RealField conv = convolve(f, f);
  for (int m = 0; m < g.n(); ++m) {
    const double x = g.x(m);
    if (std::abs(x) > 12.0) continue;
    const double expected = 1.7724538509055159 * std::exp(-x * x / 4.0);
    CHECK(conv[m] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("Gagliardo-Nirenberg interpolation holds on samples") {
  // ||f||_inf^2 <= ||f||_2 ||f'||_2 for mean-zero-ish decaying data; on the
  // discrete torus allow a hair of slack.
  Grid g = make_grid(256, 48.0);
  RealField f = RealField::sample(
      g, [](double x) { return std::exp(-x * x / 2.0) * std::sin(2.0 * x); });
  const double lhs = lp_norm(f, Lp::Linf) * lp_norm(f, Lp::Linf);
  const double rhs = lp_norm(f, Lp::L2) * sobolev_norm(f, Lp::L2, 1);
  CHECK(lhs <= rhs * (1.0 + 1e-6));
}

TEST_CASE("boundary amplitude sees edge mass") {
  Grid g = make_grid(128, 16.0);
  CHECK(boundary_amplitude(gaussian(g, 0.5)) < 1e-16);
  RealField shifted = RealField::sample(
      g, [&](double x) { return std::exp(-(x + 8.0) * (x + 8.0) / 2.0); });
  CHECK(boundary_amplitude(shifted) > 0.5);
}
