#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kdvlab/fit.hpp"
#include "kdvlab/linear.hpp"
#include "kdvlab/spectral.hpp"

using namespace kdvlab;

namespace {

RealField shifted_gaussian(const Grid& g, double shift) {
  return RealField::sample(g, [&](double x) {
    return std::exp(-(x - shift) * (x - shift) / 2.0);
  });
}

}  // namespace

TEST_CASE("linear flow at t = 0 returns the data unchanged") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = shifted_gaussian(g, 0.7);
  RealField u = linear_solution(u0, 1.5, 0.0);
  for (int m = 0; m < g.n(); ++m) CHECK(u[m] == u0[m]);
}

TEST_CASE("linear flow equals convolution with the sampled kernel") {
  Grid g = make_grid(1024, 256.0);
  RealField u0 = shifted_gaussian(g, 1.0);
  SUBCASE("dissipative only") {
    RealField a = heat_solution(u0, 1.5, 2.0);
    RealField b = convolve(sample_G(g, 1.5, 2.0), u0);
    for (int m = 0; m < g.n(); ++m) {
      CHECK(a[m] == doctest::Approx(b[m]).epsilon(1e-12));
    }
  }
  SUBCASE("with dispersion") {
    RealField a = linear_solution(u0, 1.5, 2.0);
    RealField b = convolve(sample_S(g, 1.5, 2.0), u0);
    for (int m = 0; m < g.n(); ++m) {
      CHECK(a[m] == doctest::Approx(b[m]).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear flow semigroup property") {
  Grid g = make_grid(1024, 256.0);
  RealField u0 = shifted_gaussian(g, -0.5);
  RealField two_hops = linear_solution(linear_solution(u0, 1.2, 1.5), 1.2, 2.5);
  RealField one_hop = linear_solution(u0, 1.2, 4.0);
  for (int m = 0; m < g.n(); ++m) {
    CHECK(two_hops[m] == doctest::Approx(one_hop[m]).epsilon(1e-12));
  }
}

TEST_CASE("linear flow dissipates exactly by the symbol") {
  // Each Fourier mode decays by exp(-t |xi|^alpha) in modulus.
  Grid g = make_grid(256, 64.0);
  RealField u0 = shifted_gaussian(g, 0.0);
  SpectralField F0 = to_spectral(u0);
  SpectralField Ft = to_spectral(linear_solution(u0, 1.0, 3.0));
  for (int i = 0; i < g.n(); ++i) {
    const double expected = std::abs(F0[i]) * std::exp(-3.0 * std::abs(g.xi(i)));
    CHECK(std::abs(Ft[i]) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("expansion spec computes gaussian moments") {
  Grid g = make_grid(512, 64.0);
  RealField u0 = shifted_gaussian(g, 0.0);
  ExpansionSpec spec = make_expansion_spec(u0, 1.5, 3);
  REQUIRE(spec.moments.size() == 4);
  CHECK(spec.moments[0] == doctest::Approx(2.5066282746310002).epsilon(1e-12));
  CHECK(std::abs(spec.moments[1]) < 1e-12);
  CHECK(spec.moments[2] == doctest::Approx(2.5066282746310002).epsilon(1e-10));
  CHECK(std::abs(spec.moments[3]) < 1e-9);
  CHECK(spec.warnings.empty());
}

TEST_CASE("expansion spec warns when moments are polluted") {
  Grid g = make_grid(64, 8.0);
  RealField wide = RealField::sample(
      g, [](double x) { return std::exp(-x * x / 8.0); });
  ExpansionSpec spec = make_expansion_spec(wide, 1.5, 1);
  CHECK_FALSE(spec.warnings.empty());
}

TEST_CASE("first-order expansion assembles the right kernel combination") {
  // For N = 1 the expansion is M0 G - M1 G' - t M0 G'''.
  Grid g = make_grid(1024, 256.0);
  RealField u0 = shifted_gaussian(g, 0.8);
  const double alpha = 1.4;
  const double t = 3.0;
  ExpansionSpec spec = make_expansion_spec(u0, alpha, 1);
  RealField fast = full_expansion(spec, g, t);

  RealField manual(g);
  add_scaled(manual, spec.moments[0],
             kernel_derivative(g, KernelKind::Heat, alpha, t, 0));
  add_scaled(manual, -spec.moments[1],
             kernel_derivative(g, KernelKind::Heat, alpha, t, 1));
  add_scaled(manual, -t * spec.moments[0],
             kernel_derivative(g, KernelKind::Heat, alpha, t, 3));
  for (int m = 0; m < g.n(); ++m) {
    CHECK(fast[m] == doctest::Approx(manual[m]).epsilon(1e-11));
  }
}

TEST_CASE("heat expansion order zero is mass times the kernel") {
  Grid g = make_grid(512, 128.0);
  RealField u0 = shifted_gaussian(g, 0.3);
  ExpansionSpec spec = make_expansion_spec(u0, 1.0, 0);
  RealField e0 = heat_expansion(spec, g, 2.0);
  RealField Gm(g);
  add_scaled(Gm, spec.moments[0], sample_G(g, 1.0, 2.0));
  for (int m = 0; m < g.n(); ++m) {
    CHECK(e0[m] == doctest::Approx(Gm[m]).epsilon(1e-13));
  }
}

TEST_CASE("convolution Taylor remainder obeys the derivative bound") {
  // || g*h - sum (-1)^n/n! M_n(h) g^(n) ||_inf
  //   <= ||g^{(N+1)}||_inf / (N+1)! * integral |x|^{N+1} |h|.
  Grid g = make_grid(1024, 256.0);
  RealField wide = RealField::sample(
      g, [](double x) { return std::exp(-x * x / 32.0); });
  RealField narrow = RealField::sample(
      g, [](double x) { return std::exp(-2.0 * x * x) * (1.0 + 0.5 * x); });
  for (int order : {0, 1, 2}) {
    const double lhs = convolution_taylor_remainder(wide, narrow, order, Lp::Linf);
    double absmom = 0.0;
    for (int m = 0; m < g.n(); ++m) {
      absmom += std::pow(std::abs(g.x(m)), order + 1) *
                std::abs(narrow[m]) * g.dx();
    }
    double fact = 1.0;
    for (int k = 2; k <= order + 1; ++k) fact *= k;
    const double rhs = sobolev_norm(wide, Lp::Linf, order + 1) / fact * absmom;
    CHECK(lhs <= rhs * (1.0 + 1e-9));
    CHECK(lhs > 0.0);
  }
}

TEST_CASE("log spaced times") {
  std::vector<double> ts = log_spaced_times(2.0, 32.0, 5);
  REQUIRE(ts.size() == 5);
  CHECK(ts.front() == doctest::Approx(2.0));
  CHECK(ts.back() == doctest::Approx(32.0));
  CHECK(ts[2] == doctest::Approx(8.0).epsilon(1e-12));
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
}

TEST_CASE("remainder series carries the predicted exponent") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = shifted_gaussian(g, 0.0);
  RemainderSeries rs =
      remainder_series(u0, 1.5, log_spaced_times(2.0, 8.0, 6), 1, Lp::L2, 0);
  CHECK(rs.predicted_exponent == doctest::Approx(-5.0 / 3.0).epsilon(1e-12));
  CHECK(rs.order == 1);
  CHECK_FALSE(rs.log_correction);
  REQUIRE(rs.norms.size() == 6);
  for (const NormPoint& np : rs.norms) CHECK(np.value > 0.0);

  RemainderSeries r1 =
      remainder_series(u0, 0.8, log_spaced_times(2.0, 8.0, 6), 0, Lp::Linf, 1);
  CHECK(r1.predicted_exponent == doctest::Approx(-(1.0 + 1.0 + 1.0) / 0.8));
}

TEST_CASE("measured first-order remainder decay matches the theory") {
  // alpha = 1.5, N = 0, L^2: || S(t)*u0 - M0 G(t) ||_2 ~ t^{-1}.
  Grid g = make_grid(8192, 1024.0);
  RealField u0 = shifted_gaussian(g, 1.0);  // nonzero first moment
  std::vector<double> times = log_spaced_times(16.0, 256.0, 12);
  RemainderSeries rs = remainder_series(u0, 1.5, times, 0, Lp::L2, 0);
  std::vector<double> vals;
  for (const NormPoint& np : rs.norms) vals.push_back(np.value);
  DecayFit fit = fit_power_law(rs.times, vals, 16.0, 256.0);
  CHECK(fit.slope == doctest::Approx(rs.predicted_exponent).epsilon(0.12));
  CHECK(fit.r_squared > 0.99);
}
