#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kdvlab/oracle.hpp"
#include "kdvlab/spectral.hpp"

using namespace kdvlab;

namespace {

double linf_diff(const RealField& a, const RealField& b) {
  RealField d = a;
  add_scaled(d, -1.0, b);
  return lp_norm(d, Lp::Linf);
}

RealField test_field(const Grid& g) {
  return RealField::sample(g, [](double x) {
    return 0.6 * std::exp(-x * x / 2.0) + 0.2 * std::exp(-(x - 3.0) * (x - 3.0));
  });
}

}  // namespace

TEST_CASE("canonical grid is the documented tiny grid") {
  Grid g = oracle::canonical_grid();
  CHECK(g == make_grid(128, 64.0));
  CHECK(g.n() == 128);
  CHECK(g.L() == 64.0);
}

TEST_CASE("direct transform agrees with the fast transform") {
  Grid g = oracle::canonical_grid();
  RealField f = test_field(g);
  SpectralField slow = oracle::direct_transform(f);
  SpectralField fast = to_spectral(f);
  double worst = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    worst = std::max(worst, std::abs(slow.coeffs[i] - fast.coeffs[i]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("direct convolution agrees with the spectral product") {
  Grid g = oracle::canonical_grid();
  RealField f = test_field(g);
  RealField h = RealField::sample(
      g, [](double x) { return std::exp(-2.0 * x * x); });
  CHECK(linf_diff(oracle::direct_convolution(f, h), convolve(f, h)) < 1e-10);
}

TEST_CASE("reference march agrees with the production solver") {
  Grid g = oracle::canonical_grid();
  RealField u0 = test_field(g);
  SolverConfig cfg;
  cfg.alpha = 1.4;
  cfg.T = 2.0;
  cfg.dt = 0.02;
  cfg.dealias = false;  // the reference march never dealiases
  cfg.output_times = {2.0};
  Trajectory traj = simulate(u0, cfg);
  RealField ref = oracle::reference_solve(u0, 1.4, 2.0);
  CHECK(linf_diff(traj.frames.back().u, ref) < 1e-7);

  // With the 2/3 rule on, the paths differ by the aliasing content of the
  // coarse grid, which stays small but visible.
  SolverConfig dealiased = cfg;
  dealiased.dealias = true;
  Trajectory traj2 = simulate(u0, dealiased);
  CHECK(linf_diff(traj2.frames.back().u, ref) < 1e-5);
}

TEST_CASE("direct Duhamel reconstruction matches the marched state") {
  Grid g = oracle::canonical_grid();
  RealField u0 = test_field(g);
  SolverConfig cfg;
  cfg.alpha = 1.4;
  cfg.T = 2.0;
  cfg.dt = 0.0125;
  for (int k = 0; k <= 40; ++k) cfg.output_times.push_back(0.05 * k);
  Trajectory traj = simulate(u0, cfg);
  RealField rebuilt = oracle::duhamel_direct(traj, 2.0);
  CHECK(linf_diff(traj.frames.back().u, rebuilt) < 5e-6);

  CHECK_THROWS(oracle::duhamel_direct(traj, 1.987));  // no frame at t

  Trajectory late = traj;
  late.frames.erase(late.frames.begin());
  CHECK_THROWS(oracle::duhamel_direct(late, 2.0));  // no frame at 0
}

TEST_CASE("oracle grids are capped") {
  Grid big = make_grid(1024, 256.0);
  RealField f = test_field(big);
  CHECK_THROWS(oracle::direct_transform(f));
  CHECK_THROWS(oracle::direct_convolution(f, f));

  Grid bigger = make_grid(2048, 256.0);
  RealField f2 = test_field(bigger);
  CHECK_THROWS(oracle::reference_solve(f2, 1.5, 1.0));

  Grid g = oracle::canonical_grid();
  RealField u0 = test_field(g);
  CHECK_THROWS(oracle::reference_solve(u0, 1.5, 25.0));
  CHECK_THROWS(oracle::reference_solve(u0, 1.5, 0.0));
}
