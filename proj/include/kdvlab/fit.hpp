#pragma once

#include "kdvlab/linear.hpp"
#include "kdvlab/solver.hpp"

namespace kdvlab {

// Least-squares line through (log t, log v), or (log t, log(v / log t)) when
// log_correction is set. Points outside [window_lo, window_hi] are ignored.
// Requires at least 5 in-window points with positive values.
struct DecayFit {
  double slope;
  double intercept;
  double r_squared;
  double window_lo;
  double window_hi;
  bool log_correction;
  int points_used;
};
DecayFit fit_power_law(const std::vector<double>& times,
                       const std::vector<double>& values, double window_lo,
                       double window_hi, bool log_correction = false);

// || u(t) - S_alpha(t)*u0 || per frame, with the sharp first-order exponent:
//   alpha < 1:  -(1-1/p)/alpha - j/alpha - 1/alpha
//   alpha = 1:  -(1-1/p) - j - 1, log-corrected
//   alpha > 1:  -(1-1/p)/alpha - j/alpha - (2/alpha - 1)
RemainderSeries first_order_remainder(const Trajectory& traj, Lp p, int j);

// I(t) = integral_0^t ||u(s)||_{L^2}^2 ds on the frame times (composite
// Simpson), plus I(inf) by fitting c (1+s)^{-1/alpha} to the last decade of
// frames and integrating the tail in closed form (finite only for alpha < 1).
struct CumulativeEnergy {
  std::vector<double> times;
  std::vector<double> values;      // I(t_i)
  double total;                    // I(inf), NaN when the tail diverges
  double tail;                     // extrapolated part of total
  double tail_coefficient;         // fitted c
};
CumulativeEnergy cumulative_energy(const Trajectory& traj);

// Monotonicity call via the Spearman rank correlation of values against
// times: decreasing when rho <= -0.5, increasing when rho >= 0.5.
enum class Trend { Decreasing, Flat, Increasing };
double spearman(const std::vector<double>& x, const std::vector<double>& y);
Trend trend_of(const std::vector<double>& times,
               const std::vector<double>& values);

// Scaled second-order profile deviation for 0 < alpha < 1:
//   t^{(1-1/p)/alpha + j/alpha + 1/alpha} ||u(t) - S(t)*u0 +
//     1/2 I(inf) d/dx G_alpha(t)||
// over the frames inside the window. The theory sends this to zero.
struct ProfileCheck {
  std::vector<double> times;
  std::vector<double> scaled_values;
  double scaling_exponent;
  Trend trend;
  double spearman_rho;
  std::vector<std::string> warnings;
};
ProfileCheck second_order_profile_sub1(const Trajectory& traj, double window_lo,
                                       double window_hi, Lp p = Lp::L2,
                                       int j = 0);

// Scaled profile deviation for alpha = 1, where the second-order term carries
// the log:   (t^{(1-1/p) + j + 1} / log t) ||u(t) - S_1(t)*u0 +
//              (M^2 / 4 pi) log t * d/dx G_1(t)||.
ProfileCheck log_profile_alpha1(const Trajectory& traj, double window_lo,
                                double window_hi, Lp p = Lp::L2, int j = 0);

// (1 / log t) I(t), which approaches M^2 / (2 pi) for alpha = 1.
double log_energy_ratio(const CumulativeEnergy& energy, double t);

}  // namespace kdvlab
