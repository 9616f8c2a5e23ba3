#pragma once

#include "kdvlab/grid.hpp"
#include "kdvlab/kernels.hpp"

namespace kdvlab {

// Moments M_0..M_N of the data, the ingredients of the kernel expansions.
// Construction runs the moment decay guard; failures land in warnings.
struct ExpansionSpec {
  double alpha;
  int order;                    // N
  std::vector<double> moments;  // M_0..M_N
  std::vector<std::string> warnings;
};
ExpansionSpec make_expansion_spec(const RealField& u0, double alpha, int order);

// exp((i xi^3 - |xi|^alpha) t) applied to u0; t = 0 returns u0 unchanged.
RealField linear_solution(const RealField& u0, double alpha, double t);

// exp(-t |xi|^alpha) applied to u0.
RealField heat_solution(const RealField& u0, double alpha, double t);

// Heat-kernel expansion: sum_{n=0}^N (-1)^n/n! M_n d^n/dx^n G_alpha(t).
RealField heat_expansion(const ExpansionSpec& spec, const Grid& g, double t);

// The expansion of the full (dispersive) semigroup: the heat expansion plus
// the dispersive corrections
//   sum_{k=1}^N t^k/k! sum_{l=0}^{N-1} (-1)^l/l! M_l d^l/dx^l (-d/dx)^{3k}
//   G_alpha(t).
// For N = 1 this is M0 G - M1 G' - t M0 G'''.
RealField full_expansion(const ExpansionSpec& spec, const Grid& g, double t);

// || g*h - sum_{n=0}^N (-1)^n/n! M_n(h) d^n g ||_{L^p}: the Taylor remainder
// of a convolution against the moment expansion.
double convolution_taylor_remainder(const RealField& g, const RealField& h,
                                    int order, Lp p);

// Norms of linear_solution(t) - full_expansion(t) over a time ladder,
// with the predicted decay exponent
//   -(1 - 1/p)/alpha - j/alpha - (N+1)/alpha.
struct RemainderSeries {
  std::vector<double> times;
  std::vector<NormPoint> norms;
  double predicted_exponent;
  Lp p;
  int j;
  int order;            // N
  bool log_correction;  // fit values against log-corrected power law
  std::vector<std::string> warnings;
};
RemainderSeries remainder_series(const RealField& u0, double alpha,
                                 const std::vector<double>& times, int order,
                                 Lp p, int j);

// Log-spaced sample times in [a, b].
std::vector<double> log_spaced_times(double a, double b, int count);

}  // namespace kdvlab
