#include "kdvlab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kdvlab/spectral.hpp"

namespace kdvlab {

namespace {

void check_kernel_args(double alpha, double t) {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw std::invalid_argument("kernel: alpha must be in (0, 2], got " +
                                std::to_string(alpha));
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("kernel: t must be positive and finite");
  }
}

SpectralField kernel_symbol(const Grid& g, KernelKind kind, double alpha,
                            double t) {
  check_kernel_args(alpha, t);
  const std::vector<double> diss = dissipation_symbol(g, alpha);
  SpectralField F(g);
  if (kind == KernelKind::Heat) {
    for (int i = 0; i < g.n(); ++i) F.coeffs[i] = std::exp(-t * diss[i]);
  } else {
    const std::vector<std::complex<double>> disp = dispersion_symbol(g);
    for (int i = 0; i < g.n(); ++i) {
      F.coeffs[i] = std::exp(t * (disp[i] - diss[i]));
    }
  }
  return F;
}

struct PanelIntegrator {
  const KernelKind kind;
  const double alpha, t, x;
  long evaluations = 0;

  double f(double xi) {
    ++evaluations;
    const double phase =
        x * xi + (kind == KernelKind::Full ? t * xi * xi * xi : 0.0);
    return std::exp(-t * std::pow(xi, alpha)) * std::cos(phase);
  }

  // Adaptive Simpson with Richardson acceptance. Returns the refined value;
  // accumulates the error estimate and a convergence flag.
  double adapt(double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth, double& err, bool& ok) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= 48) {
      if (depth >= 48 && std::abs(delta) > 15.0 * tol) ok = false;
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return adapt(a, m, fa, flm, fm, left, tol / 2.0, depth + 1, err, ok) +
           adapt(m, b, fm, frm, fb, right, tol / 2.0, depth + 1, err, ok);
  }

  double panel(double a, double b, double tol, double& err, bool& ok) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adapt(a, b, fa, fm, fb, whole, tol, 0, err, ok);
  }
};

}  // namespace

RealField sample_G(const Grid& g, double alpha, double t) {
  return to_physical(kernel_symbol(g, KernelKind::Heat, alpha, t));
}

RealField sample_S(const Grid& g, double alpha, double t) {
  return to_physical(kernel_symbol(g, KernelKind::Full, alpha, t));
}

RealField kernel_derivative(const Grid& g, KernelKind kind, double alpha,
                            double t, int j) {
  return to_physical(derivative(kernel_symbol(g, kind, alpha, t), j));
}

QuadratureResult kernel_quadrature(KernelKind kind, double alpha, double t,
                                   double x, double abs_tol) {
  check_kernel_args(alpha, t);
  if (!(abs_tol > 0.0)) {
    throw std::invalid_argument("kernel_quadrature: tolerance must be > 0");
  }

  // Tail cutoff where the damping factor drops below 1e-16.
  const double xi_cut = std::pow(-std::log(1e-16) / t, 1.0 / alpha);

  PanelIntegrator integ{kind, alpha, t, x};
  const double pi = std::numbers::pi;
  // Budget for the raw integral; the result carries a 1/pi factor.
  const double budget = abs_tol * pi;

  double total = 0.0, err = 0.0;
  bool ok = true;
  const double max_width = xi_cut / 8.0;
  double a = 0.0;
  while (a < xi_cut) {
    // Keep the phase change across a panel near pi/2, measured at the far
    // end of the panel so fast oscillation cannot be overstepped.
    double width = max_width;
    for (int pass = 0; pass < 2; ++pass) {
      const double xi_end = std::min(a + width, xi_cut);
      double dphase = std::abs(x);
      if (kind == KernelKind::Full) dphase += 3.0 * t * xi_end * xi_end;
      if (dphase > 1e-12) width = std::min(max_width, 0.5 * pi / dphase);
    }
    const double b = std::min(a + width, xi_cut);
    total += integ.panel(a, b, budget * (b - a) / xi_cut * 0.5, err, ok);
    a = b;
  }

  QuadratureResult res;
  res.value = total / pi;
  res.error_estimate = err / pi;
  res.converged = ok && res.error_estimate <= abs_tol;
  res.evaluations = integ.evaluations;
  return res;
}

double eval_quadrature(KernelKind kind, double alpha, double t, double x,
                       double abs_tol) {
  const QuadratureResult res = kernel_quadrature(kind, alpha, t, x, abs_tol);
  if (!res.converged) {
    throw NumericalError(
        "eval_quadrature: did not converge (estimated error " +
        std::to_string(res.error_estimate) + " > tolerance " +
        std::to_string(abs_tol) + ")");
  }
  return res.value;
}

double gaussian_kernel(double t, double x) {
  return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

double poisson_kernel(double t, double x) {
  return t / (std::numbers::pi * (x * x + t * t));
}

}  // namespace kdvlab
