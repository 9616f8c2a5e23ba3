#include "kdvlab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "kdvlab/spectral.hpp"

namespace kdvlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> ranks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (i + j) / 2.0 + 1.0;
    for (int k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Sum of per-frame warnings worth surfacing on derived series.
void collect_warnings(const Trajectory& traj, std::vector<std::string>& out) {
  for (const std::string& w : traj.warnings) out.push_back(w);
}

}  // namespace

DecayFit fit_power_law(const std::vector<double>& times,
                       const std::vector<double>& values, double window_lo,
                       double window_hi, bool log_correction) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("fit_power_law: times/values size mismatch");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < window_lo || t > window_hi) continue;
    if (!(values[i] > 0.0)) {
      throw std::invalid_argument(
          "fit_power_law: nonpositive value at t = " + std::to_string(t));
    }
    if (log_correction && !(t > 1.0)) {
      throw std::invalid_argument(
          "fit_power_law: log correction needs t > 1 inside the window");
    }
    lx.push_back(std::log(t));
    ly.push_back(log_correction ? std::log(values[i] / std::log(t))
                                : std::log(values[i]));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 5) {
    throw std::invalid_argument(
        "fit_power_law: fewer than 5 points in the window");
  }

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.log_correction = log_correction;
  fit.points_used = n;
  return fit;
}

RemainderSeries first_order_remainder(const Trajectory& traj, Lp p, int j) {
  const double alpha = traj.config.alpha;
  RemainderSeries series;
  series.p = p;
  series.j = j;
  series.order = 0;
  series.log_correction = false;
  const double base = one_minus_inv_p(p) + j;
  if (std::abs(alpha - 1.0) <= 1e-12) {
    series.predicted_exponent = -(base + 1.0);
    series.log_correction = true;
  } else if (alpha < 1.0) {
    series.predicted_exponent = -(base + 1.0) / alpha;
  } else {
    series.predicted_exponent = -base / alpha - (2.0 / alpha - 1.0);
  }
  for (const Frame& f : traj.frames) {
    RealField diff = f.u;
    add_scaled(diff, -1.0, linear_solution(traj.u0, alpha, f.t));
    series.times.push_back(f.t);
    series.norms.push_back(NormPoint{f.t, p, j, sobolev_norm(diff, p, j)});
  }
  collect_warnings(traj, series.warnings);
  return series;
}

CumulativeEnergy cumulative_energy(const Trajectory& traj) {
  CumulativeEnergy ce;
  if (traj.frames.size() < 3) {
    throw std::invalid_argument("cumulative_energy: need at least 3 frames");
  }
  std::vector<double> ts, e;
  for (const Frame& f : traj.frames) {
    ts.push_back(f.t);
    e.push_back(f.diag.l2 * f.diag.l2);
  }
  if (std::abs(ts.front()) > 1e-12) {
    throw std::invalid_argument("cumulative_energy: first frame must be t=0");
  }
  ce.times = ts;
  ce.values.assign(ts.size(), 0.0);
  // I at the second node: quadratic through the first three frames.
  for (std::size_t i = 1; i < ts.size(); ++i) {
    std::vector<double> prefix_t(ts.begin(), ts.begin() + i + 1);
    if (i == 1) {
      // Quadratic through the first three frames, integrated over [t0, t1].
      const double t0 = ts[0], t1 = ts[1], t2 = ts[2];
      auto quad_w = [&](double c, double d, double ee) {
        auto anti = [&](double s) {
          return s * s * s / 3.0 - (d + ee) * s * s / 2.0 + d * ee * s;
        };
        return (anti(t1) - anti(t0)) / ((c - d) * (c - ee));
      };
      ce.values[1] =
          quad_w(t0, t1, t2) * e[0] + quad_w(t1, t0, t2) * e[1] +
          quad_w(t2, t0, t1) * e[2];
    } else {
      const std::vector<double> w = simpson_weights(prefix_t);
      double acc = 0.0;
      for (std::size_t k = 0; k <= i; ++k) acc += w[k] * e[k];
      ce.values[i] = acc;
    }
  }

  // Tail: fit c (1+s)^{-1/alpha} over the last decade of frames and close the
  // integral analytically; finite only when 1/alpha > 1.
  const double alpha = traj.config.alpha;
  const double t_last = ts.back();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] >= t_last / 10.0) {
      const double phi = std::pow(1.0 + ts[i], -1.0 / alpha);
      num += e[i] * phi;
      den += phi * phi;
    }
  }
  ce.tail_coefficient = den > 0.0 ? num / den : kNaN;
  if (alpha < 1.0 && den > 0.0) {
    const double q = 1.0 / alpha - 1.0;
    ce.tail = ce.tail_coefficient * std::pow(1.0 + t_last, -q) / q;
    ce.total = ce.values.back() + ce.tail;
  } else {
    ce.tail = kNaN;
    ce.total = kNaN;
  }
  return ce;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("spearman: need matched series, >= 3 points");
  }
  return pearson(ranks(x), ranks(y));
}

Trend trend_of(const std::vector<double>& times,
               const std::vector<double>& values) {
  const double rho = spearman(times, values);
  if (rho <= -0.5) return Trend::Decreasing;
  if (rho >= 0.5) return Trend::Increasing;
  return Trend::Flat;
}

namespace {

ProfileCheck profile_from(const Trajectory& traj, double window_lo,
                          double window_hi, Lp p, int j,
                          const std::function<RealField(const Frame&)>& w_term,
                          double scaling_exponent, bool divide_by_log) {
  ProfileCheck pc;
  pc.scaling_exponent = scaling_exponent;
  const double alpha = traj.config.alpha;
  for (const Frame& f : traj.frames) {
    if (f.t < window_lo || f.t > window_hi) continue;
    RealField diff = f.u;
    add_scaled(diff, -1.0, linear_solution(traj.u0, alpha, f.t));
    add_scaled(diff, 1.0, w_term(f));
    double scaled =
        std::pow(f.t, scaling_exponent) * sobolev_norm(diff, p, j);
    if (divide_by_log) scaled /= std::log(f.t);
    pc.times.push_back(f.t);
    pc.scaled_values.push_back(scaled);
  }
  if (pc.times.size() < 3) {
    throw std::invalid_argument("profile check: fewer than 3 frames in window");
  }
  pc.spearman_rho = spearman(pc.times, pc.scaled_values);
  pc.trend = trend_of(pc.times, pc.scaled_values);
  collect_warnings(traj, pc.warnings);
  return pc;
}

}  // namespace

ProfileCheck second_order_profile_sub1(const Trajectory& traj,
                                       double window_lo, double window_hi,
                                       Lp p, int j) {
  const double alpha = traj.config.alpha;
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument(
        "second_order_profile_sub1: needs 0 < alpha < 1");
  }
  const CumulativeEnergy ce = cumulative_energy(traj);
  if (!std::isfinite(ce.total)) {
    throw NumericalError("second_order_profile_sub1: I(inf) not finite");
  }
  ProfileCheck pc = profile_from(
      traj, window_lo, window_hi, p, j,
      [&](const Frame& f) {
        RealField w = kernel_derivative(f.u.grid, KernelKind::Heat, alpha,
                                        f.t, 1);
        for (double& v : w.values) v *= 0.5 * ce.total;
        return w;
      },
      (one_minus_inv_p(p) + j + 1.0) / alpha, false);
  if (ce.tail > 0.1 * ce.total) {
    pc.warnings.push_back(
        "I(inf): extrapolated tail exceeds 10% of the total");
  }
  return pc;
}

ProfileCheck log_profile_alpha1(const Trajectory& traj, double window_lo,
                                double window_hi, Lp p, int j) {
  const double alpha = traj.config.alpha;
  if (std::abs(alpha - 1.0) > 1e-12) {
    throw std::invalid_argument("log_profile_alpha1: needs alpha = 1");
  }
  if (!(window_lo > 1.0)) {
    throw std::invalid_argument("log_profile_alpha1: window must sit in t > 1");
  }
  const double mass = moment(traj.u0, 0).value;
  const double coeff = mass * mass / (4.0 * std::numbers::pi);
  return profile_from(
      traj, window_lo, window_hi, p, j,
      [&](const Frame& f) {
        RealField w =
            kernel_derivative(f.u.grid, KernelKind::Heat, 1.0, f.t, 1);
        for (double& v : w.values) v *= coeff * std::log(f.t);
        return w;
      },
      one_minus_inv_p(p) + j + 1.0, true);
}

double log_energy_ratio(const CumulativeEnergy& energy, double t) {
  if (!(t > 1.0)) {
    throw std::invalid_argument("log_energy_ratio: needs t > 1");
  }
  const auto& ts = energy.times;
  if (t < ts.front() || t > ts.back() + 1e-9) {
    throw std::invalid_argument("log_energy_ratio: t outside the frame range");
  }
  // Linear interpolation of I between the bracketing frames.
  std::size_t hi = 1;
  while (hi < ts.size() && ts[hi] < t) ++hi;
  if (hi == ts.size()) hi = ts.size() - 1;
  const std::size_t lo = hi - 1;
  const double frac =
      ts[hi] > ts[lo] ? (t - ts[lo]) / (ts[hi] - ts[lo]) : 0.0;
  const double I =
      energy.values[lo] + frac * (energy.values[hi] - energy.values[lo]);
  return I / std::log(t);
}

}  // namespace kdvlab
