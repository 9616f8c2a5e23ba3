#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace kdvlab {

// Uniform periodic grid on [-L/2, L/2) with n samples, x_m = -L/2 + m*dx.
// Frequencies xi_k = 2*pi*k/L for k in [-n/2, n/2), stored in FFT order:
// index i holds mode k = i for i < n/2 and k = i - n otherwise, so the
// Nyquist mode k = -n/2 sits at index n/2.
class Grid {
 public:
  Grid(int n, double L);

  int n() const { return impl_->n; }
  double L() const { return impl_->L; }
  double dx() const { return impl_->dx; }

  const std::vector<double>& xs() const { return impl_->xs; }
  const std::vector<double>& xis() const { return impl_->xis; }

  double x(int m) const { return impl_->xs[m]; }
  double xi(int i) const { return impl_->xis[i]; }

  // Signed integer mode k for storage index i.
  int mode(int i) const { return i < impl_->n / 2 ? i : i - impl_->n; }
  int nyquist_index() const { return impl_->n / 2; }

  bool operator==(const Grid& other) const {
    return impl_ == other.impl_ ||
           (impl_->n == other.impl_->n && impl_->L == other.impl_->L);
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  struct Impl {
    int n;
    double L;
    double dx;
    std::vector<double> xs;
    std::vector<double> xis;
  };
  std::shared_ptr<const Impl> impl_;
};

Grid make_grid(int n, double L);

// Real-valued samples on a grid.
struct RealField {
  Grid grid;
  std::vector<double> values;

  RealField(Grid g, std::vector<double> v);
  explicit RealField(Grid g);

  static RealField sample(const Grid& g, const std::function<double(double)>& f);

  double& operator[](int m) { return values[m]; }
  double operator[](int m) const { return values[m]; }
};

// Fourier coefficients scaled to approximate the continuum transform:
// coeffs[i] ~ f_hat(xi_i) = integral of exp(-i x xi_i) f(x) dx.
// Real fields satisfy coeffs[-k] = conj(coeffs[k]); coeffs[0] is the mass.
struct SpectralField {
  Grid grid;
  std::vector<std::complex<double>> coeffs;

  SpectralField(Grid g, std::vector<std::complex<double>> c);
  explicit SpectralField(Grid g);

  std::complex<double>& operator[](int i) { return coeffs[i]; }
  const std::complex<double>& operator[](int i) const { return coeffs[i]; }
};

enum class Lp { L1, L2, Linf };

// 1 - 1/p for the decay exponents; p = infinity gives 1.
double one_minus_inv_p(Lp p);
const char* lp_name(Lp p);

// A norm sample ||d^j/dx^j f||_{L^p} taken at time t.
struct NormPoint {
  double t;
  Lp p;
  int j;
  double value;
};

void check_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace kdvlab
