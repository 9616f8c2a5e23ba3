#include "kdvlab/oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "kdvlab/spectral.hpp"

namespace kdvlab::oracle {

namespace {

using cd = std::complex<double>;

// Fresh composite Simpson weights for the oracle integrals (non-uniform
// pairwise rule, quadratic tail on an odd final interval).
std::vector<double> oracle_simpson_weights(const std::vector<double>& ts) {
  const int n = static_cast<int>(ts.size());
  if (n < 3) throw std::invalid_argument("oracle: need at least three frames");
  std::vector<double> w(n, 0.0);
  int i = 0;
  while (i + 2 < n) {
    const double h0 = ts[i + 1] - ts[i];
    const double h1 = ts[i + 2] - ts[i + 1];
    const double H = h0 + h1;
    w[i] += H / 6.0 * (2.0 - h1 / h0);
    w[i + 1] += H / 6.0 * (H * H / (h0 * h1));
    w[i + 2] += H / 6.0 * (2.0 - h0 / h1);
    i += 2;
  }
  if (i + 1 < n) {
    // One interval left: integrate the quadratic through the last three
    // nodes over [ts[n-2], ts[n-1]].
    const double t0 = ts[n - 3], t1 = ts[n - 2], t2 = ts[n - 1];
    const double a = t1, b = t2;
    auto basis_integral = [&](double c, double d, double e) {
      // integral over [a,b] of (s-d)(s-e) / ((c-d)(c-e)) ds
      auto antider = [&](double s) {
        return s * s * s / 3.0 - (d + e) * s * s / 2.0 + d * e * s;
      };
      return (antider(b) - antider(a)) / ((c - d) * (c - e));
    };
    w[n - 3] += basis_integral(t0, t1, t2);
    w[n - 2] += basis_integral(t1, t0, t2);
    w[n - 1] += basis_integral(t2, t0, t1);
  }
  return w;
}

}  // namespace

SpectralField direct_transform(const RealField& f) {
  const Grid& g = f.grid;
  if (g.n() > 512) {
    throw std::invalid_argument("direct_transform: oracle grids cap at n=512");
  }
  SpectralField F(g);
  for (int i = 0; i < g.n(); ++i) {
    cd acc = 0.0;
    for (int m = 0; m < g.n(); ++m) {
      acc += f.values[m] * std::polar(1.0, -g.x(m) * g.xi(i));
    }
    F.coeffs[i] = g.dx() * acc;
  }
  return F;
}

RealField direct_convolution(const RealField& f, const RealField& g) {
  check_same_grid(f.grid, g.grid, "direct_convolution");
  const Grid& gr = f.grid;
  const int n = gr.n();
  if (n > 512) {
    throw std::invalid_argument(
        "direct_convolution: oracle grids cap at n=512");
  }
  RealField out(gr);
  // x_m - x_l = (m - l) dx = x_{m - l + n/2 mod n}: the +n/2 accounts for
  // the -L/2 grid origin.
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      const int j = ((m - l + n / 2) % n + n) % n;
      acc += f.values[l] * g.values[j];
    }
    out.values[m] = gr.dx() * acc;
  }
  return out;
}

RealField reference_solve(const RealField& u0, double alpha, double T) {
  const Grid& g = u0.grid;
  if (g.n() > 1024) {
    throw std::invalid_argument("reference_solve: oracle grids cap at n=1024");
  }
  if (!(T > 0.0) || T > 20.0) {
    throw std::invalid_argument("reference_solve: need 0 < T <= 20");
  }

  const double dt_prod = cfl_step(u0, 0.5);
  const long steps = static_cast<long>(std::ceil(T / (dt_prod / 16.0)));
  const double dt = T / static_cast<double>(steps);

  const std::vector<double> diss = dissipation_symbol(g, alpha);
  const std::vector<cd> disp = dispersion_symbol(g);
  const int n = g.n();
  std::vector<cd> ehalf(n);
  for (int i = 0; i < n; ++i) {
    ehalf[i] = std::exp(0.5 * dt * (disp[i] - diss[i]));
  }

  auto nonlin = [&](const SpectralField& F) {
    RealField u = to_physical(F);
    for (int m = 0; m < n; ++m) u.values[m] *= u.values[m];
    SpectralField U2 = to_spectral(u);
    for (int i = 0; i < n; ++i) U2.coeffs[i] *= cd(0.0, -0.5 * g.xi(i));
    U2.coeffs[g.nyquist_index()] = 0.0;
    return U2;
  };

  SpectralField U = to_spectral(u0);
  for (long s = 0; s < steps; ++s) {
    const SpectralField a = nonlin(U);
    SpectralField tmp(g);
    for (int i = 0; i < n; ++i) {
      tmp.coeffs[i] = ehalf[i] * (U.coeffs[i] + 0.5 * dt * a.coeffs[i]);
    }
    const SpectralField b = nonlin(tmp);
    for (int i = 0; i < n; ++i) {
      tmp.coeffs[i] = ehalf[i] * U.coeffs[i] + 0.5 * dt * b.coeffs[i];
    }
    const SpectralField c = nonlin(tmp);
    for (int i = 0; i < n; ++i) {
      tmp.coeffs[i] =
          ehalf[i] * (ehalf[i] * U.coeffs[i] + dt * c.coeffs[i]);
    }
    const SpectralField d = nonlin(tmp);
    for (int i = 0; i < n; ++i) {
      const cd e1 = ehalf[i];
      const cd e2 = e1 * e1;
      U.coeffs[i] = e2 * U.coeffs[i] +
                    dt / 6.0 *
                        (e2 * a.coeffs[i] +
                         2.0 * e1 * (b.coeffs[i] + c.coeffs[i]) + d.coeffs[i]);
    }
  }
  return to_physical(U);
}

RealField duhamel_direct(const Trajectory& traj, double t) {
  const Grid& g = traj.u0.grid;
  const int n = g.n();

  std::vector<double> ts;
  for (const Frame& f : traj.frames) {
    if (f.t <= t + 1e-12) ts.push_back(f.t);
  }
  if (ts.empty() || std::abs(ts.front()) > 1e-12 ||
      std::abs(ts.back() - t) > 1e-9) {
    throw std::invalid_argument(
        "duhamel_direct: frames must span [0, t] with a frame at each end");
  }
  const std::vector<double> w = oracle_simpson_weights(ts);

  const std::vector<double> diss = dissipation_symbol(g, traj.config.alpha);
  const std::vector<cd> disp = dispersion_symbol(g);

  SpectralField acc(g);
  for (std::size_t idx = 0; idx < ts.size(); ++idx) {
    RealField usq = traj.frames[idx].u;
    for (int m = 0; m < n; ++m) usq.values[m] *= usq.values[m];
    SpectralField U2 = to_spectral(usq);
    const double s = ts[idx];
    for (int i = 0; i < n; ++i) {
      const cd propagate = std::exp((t - s) * (disp[i] - diss[i]));
      const cd ddx_half(0.0, 0.5 * g.xi(i));
      acc.coeffs[i] += w[idx] * propagate * ddx_half * U2.coeffs[i];
    }
    acc.coeffs[g.nyquist_index()] = 0.0;
  }

  SpectralField out = to_spectral(traj.u0);
  for (int i = 0; i < n; ++i) {
    out.coeffs[i] =
        std::exp(t * (disp[i] - diss[i])) * out.coeffs[i] - acc.coeffs[i];
  }
  return to_physical(out);
}

Grid canonical_grid() { return make_grid(128, 64.0); }

}  // namespace kdvlab::oracle
