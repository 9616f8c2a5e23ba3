#include "kdvlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kdvlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int n, double L) {
  if (n < 8 || !is_power_of_two(n)) {
    throw std::invalid_argument("Grid: n must be a power of two, n >= 8 (got " +
                                std::to_string(n) + ")");
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("Grid: L must be positive and finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->L = L;
  impl->dx = L / n;
  impl->xs.resize(n);
  impl->xis.resize(n);
  const double two_pi_over_L = 2.0 * std::numbers::pi / L;
  for (int m = 0; m < n; ++m) {
    impl->xs[m] = -L / 2.0 + m * impl->dx;
  }
  for (int i = 0; i < n; ++i) {
    const int k = i < n / 2 ? i : i - n;
    impl->xis[i] = two_pi_over_L * k;
  }
  impl_ = std::move(impl);
}

Grid make_grid(int n, double L) { return Grid(n, L); }

RealField::RealField(Grid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.n()) {
    throw std::invalid_argument("RealField: sample count does not match grid");
  }
}

RealField::RealField(Grid g) : grid(std::move(g)), values(grid.n(), 0.0) {}

RealField RealField::sample(const Grid& g,
                            const std::function<double(double)>& f) {
  RealField out(g);
  for (int m = 0; m < g.n(); ++m) out.values[m] = f(g.x(m));
  return out;
}

SpectralField::SpectralField(Grid g, std::vector<std::complex<double>> c)
    : grid(std::move(g)), coeffs(std::move(c)) {
  if (static_cast<int>(coeffs.size()) != grid.n()) {
    throw std::invalid_argument(
        "SpectralField: coefficient count does not match grid");
  }
}

SpectralField::SpectralField(Grid g)
    : grid(std::move(g)), coeffs(grid.n(), {0.0, 0.0}) {}

double one_minus_inv_p(Lp p) {
  switch (p) {
    case Lp::L1:
      return 0.0;
    case Lp::L2:
      return 0.5;
    case Lp::Linf:
      return 1.0;
  }
  throw std::invalid_argument("one_minus_inv_p: bad Lp");
}

const char* lp_name(Lp p) {
  switch (p) {
    case Lp::L1:
      return "1";
    case Lp::L2:
      return "2";
    case Lp::Linf:
      return "inf";
  }
  return "?";
}

void check_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (a != b) {
    throw std::invalid_argument(std::string(where) +
                                ": fields live on different grids");
  }
}

}  // namespace kdvlab
