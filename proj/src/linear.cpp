#include "kdvlab/linear.hpp"

#include <cmath>
#include <string>

#include "kdvlab/spectral.hpp"

namespace kdvlab {

namespace {

using cd = std::complex<double>;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

SpectralField propagated(const RealField& u0, double alpha, double t,
                         bool dispersive) {
  const Grid& g = u0.grid;
  const std::vector<double> diss = dissipation_symbol(g, alpha);
  SpectralField U = to_spectral(u0);
  if (dispersive) {
    const std::vector<cd> disp = dispersion_symbol(g);
    for (int i = 0; i < g.n(); ++i) {
      U.coeffs[i] *= std::exp(t * (disp[i] - diss[i]));
    }
  } else {
    for (int i = 0; i < g.n(); ++i) U.coeffs[i] *= std::exp(-t * diss[i]);
  }
  return U;
}

SpectralField heat_symbol_field(const Grid& g, double alpha, double t) {
  const std::vector<double> diss = dissipation_symbol(g, alpha);
  SpectralField F(g);
  for (int i = 0; i < g.n(); ++i) F.coeffs[i] = std::exp(-t * diss[i]);
  return F;
}

void check_time(double t) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw std::invalid_argument("linear flow: t must be >= 0 and finite");
  }
}

}  // namespace

ExpansionSpec make_expansion_spec(const RealField& u0, double alpha,
                                  int order) {
  if (order < 0) {
    throw std::invalid_argument("make_expansion_spec: order must be >= 0");
  }
  ExpansionSpec spec;
  spec.alpha = alpha;
  spec.order = order;
  for (int n = 0; n <= order; ++n) {
    const MomentResult m = moment(u0, n);
    spec.moments.push_back(m.value);
    if (!m.decay_ok) {
      spec.warnings.push_back("moment M_" + std::to_string(n) +
                              ": boundary decay guard failed");
    }
  }
  return spec;
}

RealField linear_solution(const RealField& u0, double alpha, double t) {
  check_time(t);
  if (t == 0.0) return u0;
  return to_physical(propagated(u0, alpha, t, true));
}

RealField heat_solution(const RealField& u0, double alpha, double t) {
  check_time(t);
  if (t == 0.0) return u0;
  return to_physical(propagated(u0, alpha, t, false));
}

RealField heat_expansion(const ExpansionSpec& spec, const Grid& g, double t) {
  const SpectralField G = heat_symbol_field(g, spec.alpha, t);
  SpectralField acc(g);
  for (int n = 0; n <= spec.order; ++n) {
    const double coeff =
        (n % 2 == 0 ? 1.0 : -1.0) / factorial(n) * spec.moments[n];
    add_scaled(acc, coeff, derivative(G, n));
  }
  return to_physical(acc);
}

RealField full_expansion(const ExpansionSpec& spec, const Grid& g, double t) {
  const SpectralField G = heat_symbol_field(g, spec.alpha, t);
  SpectralField acc(g);
  for (int n = 0; n <= spec.order; ++n) {
    const double coeff =
        (n % 2 == 0 ? 1.0 : -1.0) / factorial(n) * spec.moments[n];
    add_scaled(acc, coeff, derivative(G, n));
  }
  // Dispersive corrections: t^k/k! (-d/dx)^{3k} against the truncated moment
  // sum; (-1)^{3k} = (-1)^k.
  for (int k = 1; k <= spec.order; ++k) {
    const double tk = std::pow(t, k) / factorial(k) * (k % 2 == 0 ? 1.0 : -1.0);
    for (int l = 0; l < spec.order; ++l) {
      const double coeff =
          tk * (l % 2 == 0 ? 1.0 : -1.0) / factorial(l) * spec.moments[l];
      add_scaled(acc, coeff, derivative(G, l + 3 * k));
    }
  }
  return to_physical(acc);
}

double convolution_taylor_remainder(const RealField& g, const RealField& h,
                                    int order, Lp p) {
  check_same_grid(g.grid, h.grid, "convolution_taylor_remainder");
  RealField rem = convolve(g, h);
  const SpectralField G = to_spectral(g);
  for (int n = 0; n <= order; ++n) {
    const double mn = moment(h, n).value;
    const double coeff = (n % 2 == 0 ? 1.0 : -1.0) / factorial(n) * mn;
    add_scaled(rem, -coeff, to_physical(derivative(G, n)));
  }
  return lp_norm(rem, p);
}

RemainderSeries remainder_series(const RealField& u0, double alpha,
                                 const std::vector<double>& times, int order,
                                 Lp p, int j) {
  const ExpansionSpec spec = make_expansion_spec(u0, alpha, order);
  RemainderSeries series;
  series.times = times;
  series.p = p;
  series.j = j;
  series.order = order;
  series.log_correction = false;
  series.predicted_exponent =
      -(one_minus_inv_p(p) + j + (order + 1)) / alpha;
  series.warnings = spec.warnings;
  for (double t : times) {
    RealField r = linear_solution(u0, alpha, t);
    add_scaled(r, -1.0, full_expansion(spec, u0.grid, t));
    series.norms.push_back(NormPoint{t, p, j, sobolev_norm(r, p, j)});
  }
  return series;
}

std::vector<double> log_spaced_times(double a, double b, int count) {
  if (!(a > 0.0) || !(b > a) || count < 2) {
    throw std::invalid_argument("log_spaced_times: need 0 < a < b, count >= 2");
  }
  std::vector<double> ts(count);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < count; ++i) {
    ts[i] = std::exp(la + (lb - la) * i / (count - 1));
  }
  return ts;
}

}  // namespace kdvlab
