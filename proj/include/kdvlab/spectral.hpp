#pragma once

#include "kdvlab/grid.hpp"

namespace kdvlab {

// Transform conventions, matching f_hat(xi) = integral exp(-i x xi) f(x) dx
// and f(x) = (1/2pi) integral exp(i x xi) f_hat(xi) dxi. Discrete
// coefficients carry the dx scale and the -L/2 origin phase so that
// coeffs[i] approximates f_hat at xi_i.
SpectralField to_spectral(const RealField& f);
RealField to_physical(const SpectralField& F);

// Multiply by (i xi)^j. The unpaired Nyquist mode is zeroed for odd j so the
// result of a real field stays real.
SpectralField derivative(const SpectralField& F, int j);

// |xi|^alpha, the Fourier symbol of |D|^alpha. Requires 0 < alpha <= 2.
std::vector<double> dissipation_symbol(const Grid& g, double alpha);

// i xi^3, the symbol of -dispersion in u_t = -u_xxx - ...; entries are the
// multiplier of exp(sigma t) linear flow together with -|xi|^alpha. The
// unpaired Nyquist mode is zeroed (odd symbol convention, as for odd-order
// derivatives) so real fields stay real under the flow.
std::vector<std::complex<double>> dispersion_symbol(const Grid& g);

// dx-weighted L^p norms, p in {1, 2, inf}.
double lp_norm(const RealField& f, Lp p);

// || d^j/dx^j f ||_{L^p} via the spectral derivative.
double sobolev_norm(const RealField& f, Lp p, int j);

// j-th moment integral x^j f(x) dx as a dx-weighted sum. decay_ok is false
// when the samples near the box edge exceed 1e-10 * max|f|, in which case the
// moment is polluted by truncation.
struct MomentResult {
  double value;
  bool decay_ok;
};
MomentResult moment(const RealField& f, int j);

// Largest |f| over a small band of samples at each box edge.
double boundary_amplitude(const RealField& f);

// lambda * f(lambda x) by trigonometric interpolation. Errors when the
// dilated field is not representable: for lambda > 1 the evaluation points
// leave the box, which is only harmless if f has decayed at the boundary;
// for lambda < 1 the spectrum stretches by 1/lambda and must not spill past
// the Nyquist frequency, and f must be negligible outside |x| <= lambda*L/2.
RealField rescale(const RealField& f, double lambda);

// Convolution via the multiplier product; exact for band-limited fields.
RealField convolve(const RealField& f, const RealField& g);

// ||f||_{L^2}^2 evaluated from the spectral side, (1/2pi) sum |c|^2 * dxi.
double plancherel_l2_squared(const SpectralField& F);

// out += s * f, elementwise.
void add_scaled(RealField& out, double s, const RealField& f);
void add_scaled(SpectralField& out, std::complex<double> s,
                const SpectralField& F);

}  // namespace kdvlab
