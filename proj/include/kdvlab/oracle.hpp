#pragma once

#include "kdvlab/solver.hpp"

namespace kdvlab::oracle {

// Slow, independent reference paths for cross-checking the fast spectral
// pipeline. These are deliberately written as direct summations with their
// own internals; grid sizes are capped to keep them honest and quick.

// O(n^2) transform: coeffs[i] = dx * sum_m f(x_m) exp(-i x_m xi_i). n <= 512.
SpectralField direct_transform(const RealField& f);

// Periodic direct-sum convolution (f*g)(x_m) = dx * sum_l f(x_l) g(x_m - x_l)
// with the argument wrapped into the box. n <= 512.
RealField direct_convolution(const RealField& f, const RealField& g);

// Tiny-dt integrating-factor RK4 reference march to time T, with its own
// stepping loop and dt = cfl/16, no dealiasing. n <= 1024, T <= 20.
RealField reference_solve(const RealField& u0, double alpha, double T);

// The right side of the Duhamel identity at time t,
//   S(t)*u0 - 1/2 integral_0^t S(t-s) d/dx u^2(s) ds,
// reconstructed from the trajectory's frames by Simpson quadrature.
RealField duhamel_direct(const Trajectory& traj, double t);

// The canonical tiny grid the oracle suite runs on.
Grid canonical_grid();

}  // namespace kdvlab::oracle
