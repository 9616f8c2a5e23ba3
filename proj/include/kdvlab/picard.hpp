#pragma once

#include "kdvlab/linear.hpp"
#include "kdvlab/solver.hpp"

namespace kdvlab {

// How many Picard iterates the decay theory needs before the remainder gains
// a full extra power: N = min{ n >= 0 : alpha <= (2n+3)/(n+2) }. boundary is
// set when alpha sits exactly on the threshold, which brings a logarithmic
// correction. Defined for 1 < alpha < 2.
struct PicardOrder {
  int order;
  bool boundary;
};
PicardOrder picard_order(double alpha);

// The n-th Picard iterate of the Duhamel map
//   F^0 = S(t)*u0,
//   F^{m+1} = S(t)*u0 - 1/2 integral_0^t S(t-s) d/dx (F^m(s))^2 ds,
// computed by integrating the equivalent forced ODE ladder
//   d/dt F^{m+1} = sigma F^{m+1} - (i xi/2) F[(F^m)^2]
// with the same IF-RK4 stepper as simulate. n = 0 returns the exact linear
// flow at the frame times.
Trajectory picard_iterate(const RealField& u0, double alpha, int n,
                          const SolverConfig& config);

// || u(t) - F^n(t) || over matching frames, with the predicted exponent
//   -(1 - 1/p)/alpha - j/alpha - 1/alpha
// and the log-corrected flag on boundary alpha.
RemainderSeries picard_remainder(const Trajectory& u_traj,
                                 const Trajectory& f_traj, Lp p, int j);

}  // namespace kdvlab
