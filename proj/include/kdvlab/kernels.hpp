#pragma once

#include "kdvlab/grid.hpp"

namespace kdvlab {

// Heat: the purely dissipative kernel G_alpha(t), symbol exp(-t|xi|^alpha).
// Full: the dispersive-dissipative kernel S_alpha(t), symbol
//       exp((i xi^3 - |xi|^alpha) t).
enum class KernelKind { Heat, Full };

// Sample the kernel on a grid by inverse transform of its symbol. The result
// is the L-periodization of the continuum kernel, so it matches pointwise
// once the kernel has decayed inside the box. Requires alpha in (0, 2], t > 0.
RealField sample_G(const Grid& g, double alpha, double t);
RealField sample_S(const Grid& g, double alpha, double t);

// d^j/dx^j of the sampled kernel, via (i xi)^j times the symbol.
RealField kernel_derivative(const Grid& g, KernelKind kind, double alpha,
                            double t, int j);

// Grid-free evaluation of the kernel at one point,
//   (1/pi) * integral_0^inf cos(x xi + t xi^3 [Full]) exp(-t xi^alpha) dxi,
// by adaptive panel quadrature. Panels track the local phase derivative
// |x + 3 t xi^2|; the tail is cut off where exp(-t xi^alpha) < 1e-16.
struct QuadratureResult {
  double value;
  double error_estimate;
  bool converged;
  long evaluations;
};
QuadratureResult kernel_quadrature(KernelKind kind, double alpha, double t,
                                   double x, double abs_tol = 1e-8);

// As kernel_quadrature, but throws NumericalError when the estimated error
// exceeds the requested tolerance.
double eval_quadrature(KernelKind kind, double alpha, double t, double x,
                       double abs_tol = 1e-8);

// Closed forms: alpha = 2 Gaussian (4 pi t)^{-1/2} exp(-x^2/(4t)) and
// alpha = 1 Poisson t / (pi (x^2 + t^2)).
double gaussian_kernel(double t, double x);
double poisson_kernel(double t, double x);

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kdvlab
