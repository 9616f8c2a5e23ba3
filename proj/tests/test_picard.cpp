#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "kdvlab/picard.hpp"
#include "kdvlab/spectral.hpp"

using namespace kdvlab;

namespace {

RealField bump(const Grid& g, double amp) {
  return RealField::sample(
      g, [&](double x) { return amp * std::exp(-x * x / 2.0); });
}

double linf_diff(const RealField& a, const RealField& b) {
  RealField d = a;
  add_scaled(d, -1.0, b);
  return lp_norm(d, Lp::Linf);
}

// S(t)*u0 - 1/2 int_0^t S(t-s) d/dx (S(s)*u0)^2 ds by direct Simpson
// quadrature over a fine s-grid: an independent construction of the first
// iterate, no ODE stepping involved.
RealField first_iterate_by_quadrature(const RealField& u0, double alpha,
                                      double t, int panels) {
  const Grid& g = u0.grid;
  const std::vector<double> diss = dissipation_symbol(g, alpha);
  const std::vector<std::complex<double>> disp = dispersion_symbol(g);

  std::vector<double> ss;
  for (int k = 0; k <= panels; ++k) ss.push_back(t * k / panels);
  const std::vector<double> w = simpson_weights(ss);

  SpectralField rhs = to_spectral(linear_solution(u0, alpha, t));
  SpectralField acc(g);
  for (int k = 0; k <= panels; ++k) {
    RealField f0 = linear_solution(u0, alpha, ss[k]);
    for (double& v : f0.values) v *= v;
    SpectralField F2 = to_spectral(f0);
    for (int i = 0; i < g.n(); ++i) {
      const std::complex<double> prop =
          std::exp((t - ss[k]) * (disp[i] - diss[i]));
      acc.coeffs[i] +=
          w[k] * prop * std::complex<double>(0.0, 0.5 * g.xi(i)) * F2.coeffs[i];
    }
  }
  acc.coeffs[g.nyquist_index()] = 0.0;
  add_scaled(rhs, -1.0, acc);
  return to_physical(rhs);
}

}  // namespace

TEST_CASE("iterate count needed for the extra decay power") {
  CHECK(picard_order(1.01).order == 0);
  CHECK_FALSE(picard_order(1.01).boundary);
  CHECK(picard_order(1.2).order == 0);
  CHECK_FALSE(picard_order(1.2).boundary);
  CHECK(picard_order(1.5).order == 0);
  CHECK(picard_order(1.5).boundary);
  CHECK(picard_order(1.6).order == 1);
  CHECK_FALSE(picard_order(1.6).boundary);
  CHECK(picard_order(5.0 / 3.0).order == 1);
  CHECK(picard_order(5.0 / 3.0).boundary);
  CHECK(picard_order(1.7).order == 2);
  CHECK_FALSE(picard_order(1.7).boundary);
  CHECK(picard_order(1.75).order == 2);
  CHECK(picard_order(1.75).boundary);
  CHECK(picard_order(1.9).order == 8);
  CHECK(picard_order(1.9).boundary);
  CHECK(picard_order(1.99).order == 98);
  CHECK(picard_order(1.99).boundary);

  CHECK_THROWS(picard_order(1.0));
  CHECK_THROWS(picard_order(2.0));
  CHECK_THROWS(picard_order(0.8));
}

TEST_CASE("zeroth iterate is the exact linear flow") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = bump(g, 0.5);
  SolverConfig cfg;
  cfg.alpha = 1.4;
  cfg.T = 2.0;
  cfg.dt = 0.05;
  cfg.output_times = {0.0, 1.0, 2.0};
  Trajectory traj = picard_iterate(u0, cfg.alpha, 0, cfg);
  REQUIRE(traj.frames.size() == 3);
  for (const Frame& f : traj.frames) {
    CHECK(linf_diff(f.u, linear_solution(u0, cfg.alpha, f.t)) < 1e-13);
  }
}

TEST_CASE("first iterate matches the direct Duhamel quadrature") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = bump(g, 0.5);
  SolverConfig cfg;
  cfg.alpha = 1.4;
  cfg.T = 2.0;
  cfg.dt = 0.0125;
  cfg.output_times = {2.0};
  Trajectory traj = picard_iterate(u0, cfg.alpha, 1, cfg);
  RealField direct = first_iterate_by_quadrature(u0, cfg.alpha, 2.0, 80);
  CHECK(linf_diff(traj.frames.back().u, direct) < 1e-6);
}

TEST_CASE("ladder steps are fourth order in dt") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = bump(g, 0.5);
  auto end_state = [&](double dt) {
    SolverConfig cfg;
    cfg.alpha = 1.4;
    cfg.T = 2.0;
    cfg.dt = dt;
    cfg.output_times = {2.0};
    return picard_iterate(u0, cfg.alpha, 2, cfg).frames.back().u;
  };
  RealField fine = end_state(0.00625);
  const double e1 = linf_diff(end_state(0.1), fine);
  const double e2 = linf_diff(end_state(0.05), fine);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.5);
  CHECK(order < 4.6);
}

TEST_CASE("iterates approach the nonlinear solution") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = bump(g, 0.3);
  SolverConfig cfg;
  cfg.alpha = 1.4;
  cfg.T = 2.0;
  cfg.dt = 0.025;
  cfg.output_times = {2.0};
  Trajectory truth = simulate(u0, cfg);

  double prev = 1e300;
  for (int level : {0, 1, 2, 3}) {
    Trajectory fn = picard_iterate(u0, cfg.alpha, level, cfg);
    const double err = linf_diff(fn.frames.back().u, truth.frames.back().u);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-6);
}

TEST_CASE("remainder series against the first iterate") {
  Grid g = make_grid(512, 128.0);
  RealField u0 = bump(g, 0.5);
  SolverConfig cfg;
  cfg.alpha = 1.4;
  cfg.T = 8.0;
  cfg.dt = 0.0;
  cfg.output_times = {2.0, 4.0, 8.0};
  Trajectory u_traj = simulate(u0, cfg);
  Trajectory f_traj = picard_iterate(u0, cfg.alpha, 1, cfg);

  RemainderSeries rs = picard_remainder(u_traj, f_traj, Lp::L2, 0);
  CHECK(rs.predicted_exponent ==
        doctest::Approx(-1.0714285714285714).epsilon(1e-12));
  CHECK_FALSE(rs.log_correction);
  REQUIRE(rs.times.size() == 3);
  for (const NormPoint& np : rs.norms) CHECK(np.value > 0.0);

  SolverConfig cfg15 = cfg;
  cfg15.alpha = 1.5;
  Trajectory u15 = simulate(u0, cfg15);
  Trajectory f15 = picard_iterate(u0, 1.5, 1, cfg15);
  RemainderSeries rs15 = picard_remainder(u15, f15, Lp::L2, 0);
  CHECK(rs15.log_correction);  // alpha = 1.5 sits on the order-0 boundary
  CHECK(rs15.predicted_exponent == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("remainder requires matching frames") {
  Grid g = make_grid(256, 64.0);
  RealField u0 = bump(g, 0.4);
  SolverConfig a;
  a.alpha = 1.4;
  a.T = 2.0;
  a.dt = 0.05;
  a.output_times = {1.0, 2.0};
  SolverConfig b = a;
  b.output_times = {2.0};
  Trajectory ua = simulate(u0, a);
  Trajectory fb = picard_iterate(u0, 1.4, 1, b);
  CHECK_THROWS(picard_remainder(ua, fb, Lp::L2, 0));
}
