#include "kdvlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kdvlab/fft.hpp"

namespace kdvlab {

namespace {

constexpr double kDecayGuard = 1e-10;

// Number of samples per box edge inspected by the decay guards. A band is
// used instead of the single edge sample because oscillatory tails can pass
// through zero right at the edge.
int edge_band(const Grid& g) { return std::max(4, g.n() / 256); }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

SpectralField to_spectral(const RealField& f) {
  const Grid& g = f.grid;
  const int n = g.n();
  std::vector<std::complex<double>> in(n);
  for (int m = 0; m < n; ++m) in[m] = f.values[m];
  std::vector<std::complex<double>> out = fft::forward(in);
  // dx puts the Riemann weight in; (-1)^i is exp(-i x_0 xi_i) for the
  // -L/2 origin ((-1)^(i-n) = (-1)^i since n is even).
  const double dx = g.dx();
  for (int i = 0; i < n; ++i) {
    const double sign = (i & 1) ? -1.0 : 1.0;
    out[i] *= sign * dx;
  }
  return SpectralField(g, std::move(out));
}

RealField to_physical(const SpectralField& F) {
  const Grid& g = F.grid;
  const int n = g.n();
  std::vector<std::complex<double>> in(n);
  for (int i = 0; i < n; ++i) {
    const double sign = (i & 1) ? -1.0 : 1.0;
    in[i] = sign * F.coeffs[i];
  }
  std::vector<std::complex<double>> out = fft::backward(in);
  RealField f(g);
  const double inv_L = 1.0 / g.L();
  for (int m = 0; m < n; ++m) f.values[m] = out[m].real() * inv_L;
  return f;
}

SpectralField derivative(const SpectralField& F, int j) {
  if (j < 0) throw std::invalid_argument("derivative: order must be >= 0");
  SpectralField out = F;
  if (j == 0) return out;
  const Grid& g = F.grid;
  for (int i = 0; i < g.n(); ++i) {
    const std::complex<double> ixi(0.0, g.xi(i));
    std::complex<double> mult = 1.0;
    for (int r = 0; r < j; ++r) mult *= ixi;
    out.coeffs[i] *= mult;
  }
  if (j % 2 == 1) out.coeffs[g.nyquist_index()] = 0.0;
  return out;
}

std::vector<double> dissipation_symbol(const Grid& g, double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw std::invalid_argument(
        "dissipation_symbol: alpha must be in (0, 2], got " +
        std::to_string(alpha));
  }
  std::vector<double> sym(g.n());
  for (int i = 0; i < g.n(); ++i) sym[i] = std::pow(std::abs(g.xi(i)), alpha);
  sym[0] = 0.0;
  return sym;
}

std::vector<std::complex<double>> dispersion_symbol(const Grid& g) {
  std::vector<std::complex<double>> sym(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const double xi = g.xi(i);
    sym[i] = {0.0, xi * xi * xi};
  }
  sym[g.nyquist_index()] = 0.0;
  return sym;
}

double lp_norm(const RealField& f, Lp p) {
  const double dx = f.grid.dx();
  switch (p) {
    case Lp::L1: {
      double s = 0.0;
      for (double v : f.values) s += std::abs(v);
      return dx * s;
    }
    case Lp::L2: {
      double s = 0.0;
      for (double v : f.values) s += v * v;
      return std::sqrt(dx * s);
    }
    case Lp::Linf:
      return max_abs(f.values);
  }
  throw std::invalid_argument("lp_norm: bad Lp");
}

double sobolev_norm(const RealField& f, Lp p, int j) {
  if (j == 0) return lp_norm(f, p);
  return lp_norm(to_physical(derivative(to_spectral(f), j)), p);
}

double boundary_amplitude(const RealField& f) {
  const int n = f.grid.n();
  const int band = edge_band(f.grid);
  double m = 0.0;
  for (int i = 0; i < band; ++i) {
    m = std::max(m, std::abs(f.values[i]));
    m = std::max(m, std::abs(f.values[n - 1 - i]));
  }
  return m;
}

MomentResult moment(const RealField& f, int j) {
  if (j < 0) throw std::invalid_argument("moment: order must be >= 0");
  const Grid& g = f.grid;
  double s = 0.0;
  for (int m = 0; m < g.n(); ++m) {
    double xp = 1.0;
    for (int r = 0; r < j; ++r) xp *= g.x(m);
    s += f.values[m] * xp;
  }
  const bool ok = boundary_amplitude(f) <= kDecayGuard * max_abs(f.values);
  return {g.dx() * s, ok};
}

RealField rescale(const RealField& f, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("rescale: lambda must be positive and finite");
  }
  const Grid& g = f.grid;
  const int n = g.n();
  const double peak = max_abs(f.values);
  if (peak == 0.0) return f;

  if (lambda > 1.0) {
    // Evaluation points lambda*x wrap around the box; the wrapped values are
    // only correct if f has decayed at the boundary.
    if (boundary_amplitude(f) > kDecayGuard * peak) {
      throw std::domain_error(
          "rescale: lambda*x leaves the box but f has not decayed at the "
          "boundary");
    }
  }

  SpectralField F = to_spectral(f);

  if (lambda < 1.0) {
    // The dilated spectrum occupies |xi|/lambda; modes of f beyond
    // lambda * xi_max would alias.
    const double xi_max = std::abs(g.xi(g.nyquist_index()));
    double cpeak = 0.0, tail = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(F.coeffs[i]);
      cpeak = std::max(cpeak, a);
      if (std::abs(g.xi(i)) > lambda * xi_max) tail = std::max(tail, a);
    }
    if (tail > kDecayGuard * cpeak) {
      throw std::domain_error(
          "rescale: field is not resolvable after dilation (spectral tail "
          "beyond lambda * Nyquist)");
    }
    // The true dilation is supported where f(lambda x) came from inside the
    // box; f must be negligible outside |x| <= lambda*L/2.
    const double cutoff = lambda * g.L() / 2.0;
    for (int m = 0; m < n; ++m) {
      if (std::abs(g.x(m)) > cutoff &&
          std::abs(f.values[m]) > kDecayGuard * peak) {
        throw std::domain_error(
            "rescale: f has non-negligible samples outside |x| <= "
            "lambda*L/2; the dilation leaves the box");
      }
    }
  }

  // Direct trigonometric interpolation of the band-limited interpolant at
  // lambda*x. The unpaired Nyquist mode is evaluated as a cosine so the real
  // part is the symmetric interpolant.
  RealField out(g);
  const int nyq = g.nyquist_index();
  const double inv_L = 1.0 / g.L();
  for (int m = 0; m < n; ++m) {
    const double y = lambda * g.x(m);
    if (std::abs(y) > g.L() / 2.0) {
      // The evaluation point left the box. The decay guard above ensures the
      // continuum field is negligible there; the periodic interpolant would
      // instead wrap around and duplicate the support.
      out.values[m] = 0.0;
      continue;
    }
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == nyq) continue;
      acc += F.coeffs[i] * std::polar(1.0, g.xi(i) * y);
    }
    acc += F.coeffs[nyq] * std::cos(g.xi(nyq) * y);
    out.values[m] = lambda * acc.real() * inv_L;
  }
  return out;
}

RealField convolve(const RealField& f, const RealField& g) {
  check_same_grid(f.grid, g.grid, "convolve");
  SpectralField F = to_spectral(f);
  const SpectralField G = to_spectral(g);
  for (int i = 0; i < f.grid.n(); ++i) F.coeffs[i] *= G.coeffs[i];
  return to_physical(F);
}

double plancherel_l2_squared(const SpectralField& F) {
  double s = 0.0;
  for (const auto& c : F.coeffs) s += std::norm(c);
  return s / F.grid.L();
}

void add_scaled(RealField& out, double s, const RealField& f) {
  check_same_grid(out.grid, f.grid, "add_scaled");
  for (int m = 0; m < out.grid.n(); ++m) out.values[m] += s * f.values[m];
}

void add_scaled(SpectralField& out, std::complex<double> s,
                const SpectralField& F) {
  check_same_grid(out.grid, F.grid, "add_scaled");
  for (int i = 0; i < out.grid.n(); ++i) out.coeffs[i] += s * F.coeffs[i];
}

}  // namespace kdvlab
