#include "kdvlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "kdvlab/linear.hpp"
#include "kdvlab/spectral.hpp"

namespace kdvlab {

namespace {

using nlohmann::json;

const std::set<std::string> kKinds = {
    "kernel-check", "linear-expansion", "decay",  "first-order",
    "profile-sub1", "profile-log",      "picard", "invariants"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config " + path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + it.key(), "unknown key");
  }
}

double num_field(const json& j, const std::string& path, const char* key,
                 bool required, double def = 0.0) {
  if (!j.contains(key)) {
    if (required) fail(path + "." + key, "missing required field");
    return def;
  }
  const json& v = j.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

long long int_field(const json& j, const std::string& path, const char* key,
                    bool required, long long def = 0) {
  if (!j.contains(key)) {
    if (required) fail(path + "." + key, "missing required field");
    return def;
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long long>();
}

bool bool_field(const json& j, const std::string& path, const char* key,
                bool required, bool def = false) {
  if (!j.contains(key)) {
    if (required) fail(path + "." + key, "missing required field");
    return def;
  }
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string str_field(const json& j, const std::string& path, const char* key,
                      bool required, const std::string& def = "") {
  if (!j.contains(key)) {
    if (required) fail(path + "." + key, "missing required field");
    return def;
  }
  const json& v = j.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Lp parse_p(const json& v, const std::string& path) {
  if (v.is_number_integer()) {
    const long long p = v.get<long long>();
    if (p == 1) return Lp::L1;
    if (p == 2) return Lp::L2;
    fail(path, "p must be 1, 2, or \"inf\"");
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return Lp::Linf;
    fail(path, "p must be 1, 2, or \"inf\"");
  }
  fail(path, "p must be 1, 2, or \"inf\"");
}

const char* p_csv(Lp p) {
  switch (p) {
    case Lp::L1:
      return "1";
    case Lp::L2:
      return "2";
    default:
      return "inf";
  }
}

std::vector<double> parse_times(const json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const json& e = j.at(i);
      if (!e.is_number()) {
        fail(path + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back(e.get<double>());
      if (i > 0 && !(out[i] > out[i - 1])) {
        fail(path, "needs strictly increasing entries");
      }
    }
    return out;
  }
  expect_object(j, path);
  expect_keys(j, path, {"from", "to", "count", "spacing", "include_zero"});
  const double from = num_field(j, path, "from", true);
  const double to = num_field(j, path, "to", true);
  const long long count = int_field(j, path, "count", true);
  const std::string spacing = str_field(j, path, "spacing", false, "log");
  const bool include_zero = bool_field(j, path, "include_zero", false, false);
  if (!(from < to)) fail(path, "needs from < to");
  if (count < 2) fail(path + ".count", "needs at least 2 samples");
  if (spacing != "log" && spacing != "linear") {
    fail(path + ".spacing", "expected \"log\" or \"linear\"");
  }
  if (spacing == "log" && !(from > 0.0)) {
    fail(path + ".from", "log spacing needs from > 0");
  }
  std::vector<double> out;
  if (include_zero) out.push_back(0.0);
  if (spacing == "log") {
    for (double t : log_spaced_times(from, to, static_cast<int>(count))) {
      out.push_back(t);
    }
  } else {
    for (long long k = 0; k < count; ++k) {
      out.push_back(from + (to - from) * double(k) / double(count - 1));
    }
  }
  return out;
}

bool is_solver_kind(const std::string& kind) {
  return kind == "decay" || kind == "first-order" || kind == "profile-sub1" ||
         kind == "profile-log" || kind == "picard" || kind == "invariants";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string slugify(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "series" : out;
}

std::string series_label(Lp p, int j) {
  std::string s = "p=";
  s += p_csv(p);
  s += " j=" + std::to_string(j);
  return s;
}

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::Decreasing:
      return "decreasing";
    case Trend::Increasing:
      return "increasing";
    default:
      return "flat";
  }
}

std::vector<double> reference_curve(const std::vector<double>& ts,
                                    const std::vector<double>& vs,
                                    double window_lo, double exponent,
                                    bool log_correction) {
  std::size_t anchor = 0;
  while (anchor < ts.size() && ts[anchor] < window_lo) ++anchor;
  if (anchor == ts.size()) anchor = 0;
  const double ta = ts[anchor];
  const double va = vs[anchor];
  std::vector<double> out;
  for (double t : ts) {
    double v = va * std::pow(t / ta, exponent);
    if (log_correction && t > 1.0 && ta > 1.0) {
      v *= std::log(t) / std::log(ta);
    }
    out.push_back(v);
  }
  return out;
}

std::string fit_detail(const DecayFit& fit, double predicted, double tol) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "slope %.4f vs predicted %.4f (tolerance %.3f, r^2 %.4f, %d "
                "points)",
                fit.slope, predicted, tol, fit.r_squared, fit.points_used);
  return buf;
}

void merge_warnings(std::vector<std::string>& into,
                    const std::vector<std::string>& from) {
  for (const std::string& w : from) {
    bool seen = false;
    for (const std::string& have : into) {
      if (have == w) {
        seen = true;
        break;
      }
    }
    if (!seen) into.push_back(w);
  }
}

void validate(const ExperimentConfig& cfg) {
  const std::string& kind = cfg.kind;
  if (!kKinds.count(kind)) fail(".kind", "unknown experiment kind " + kind);

  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 2.0)) {
    if (!(kind == "kernel-check" && cfg.alpha == 2.0)) {
      fail(".alpha", "needs 0 < alpha < 2 (kernel-check also allows 2)");
    }
  }
  if (kind == "profile-sub1" && !(cfg.alpha < 1.0)) {
    fail(".alpha", "profile-sub1 needs alpha < 1");
  }
  if (kind == "profile-log" && std::abs(cfg.alpha - 1.0) > 1e-12) {
    fail(".alpha", "profile-log needs alpha = 1");
  }
  if (kind == "picard" && !(cfg.alpha > 1.0)) {
    fail(".alpha", "picard needs 1 < alpha < 2");
  }

  Grid grid = [&] {
    try {
      return make_grid(cfg.n, cfg.L);
    } catch (const std::exception& e) {
      fail(".grid", e.what());
    }
  }();

  const bool needs_initial = kind != "kernel-check";
  RealField u0(grid);
  if (needs_initial) {
    u0 = make_initial_data(grid, cfg.initial);
  }

  if (is_solver_kind(kind)) {
    const SolverConfig& s = cfg.solver;
    if (!(s.T > 0.0)) fail(".solver.T", "needs T > 0");
    if (s.dt < 0.0) fail(".solver.dt", "needs dt >= 0");
    if (s.dt > s.T) fail(".solver.dt", "needs dt <= T");
    if (s.output_times.empty()) {
      fail(".solver.output_times", "no output times requested");
    }
    for (double t : s.output_times) {
      if (t < 0.0 || t > s.T + 1e-9) {
        fail(".solver.output_times", "times must lie in [0, T]");
      }
    }
    if (s.dt > 0.0) {
      const double bound = cfl_step(u0, s.cfl_safety);
      if (s.dt > bound * (1.0 + 1e-12)) {
        char buf[120];
        std::snprintf(buf, sizeof(buf),
                      "cfl bound violated: dt = %g exceeds %g", s.dt, bound);
        fail(".solver.dt", buf);
      }
    }
  } else {
    if (cfg.times.size() < 2) fail(".times", "needs at least 2 sample times");
    for (double t : cfg.times) {
      if (!(t > 0.0)) fail(".times", "sample times must be positive");
    }
  }

  const bool needs_window = kind == "linear-expansion" || kind == "decay" ||
                            kind == "first-order" || kind == "picard" ||
                            kind == "profile-sub1" || kind == "profile-log";
  if (needs_window) {
    if (!(cfg.window_lo < cfg.window_hi))
      fail(".window", "needs lo < hi");
    if (kind == "profile-log" && !(cfg.window_lo > 1.0)) {
      fail(".window.lo", "profile-log needs the window inside t > 1");
    }
  }

  const bool needs_series = needs_window;
  if (needs_series && cfg.series.empty()) {
    fail(".series", "at least one (p, j) series is required");
  }
  for (const SeriesSpec& s : cfg.series) {
    if (s.j < 0 || s.j > 8) fail(".series.j", "needs 0 <= j <= 8");
  }

  const bool needs_slope_tol = kind == "linear-expansion" || kind == "decay" ||
                               kind == "first-order" || kind == "picard";
  if (needs_slope_tol && !(cfg.checks.slope_tolerance > 0.0)) {
    fail(".checks.slope_tolerance", "required and must be positive");
  }
  if (kind == "kernel-check" && !(cfg.checks.max_abs_error > 0.0)) {
    fail(".checks.max_abs_error", "required and must be positive");
  }
  if (kind == "profile-log") {
    if (!(cfg.checks.ratio_t > 1.0)) {
      fail(".checks.ratio_t", "required and must exceed 1");
    }
    if (!(cfg.checks.ratio_rel_tolerance > 0.0)) {
      fail(".checks.ratio_rel_tolerance", "required and must be positive");
    }
  }
  if (kind == "profile-sub1" || kind == "profile-log") {
    if (cfg.solver.output_times.empty() ||
        std::abs(cfg.solver.output_times.front()) > 1e-12) {
      fail(".solver.output_times",
           "profile kinds integrate the energy from t = 0; the first output "
           "time must be 0");
    }
    if (cfg.solver.output_times.size() < 8) {
      fail(".solver.output_times",
           "profile kinds need at least 8 frames for the energy integral");
    }
  }
  if (kind == "linear-expansion" && cfg.order < 0) {
    fail(".order", "linear-expansion needs an expansion order N >= 0");
  }
}

}  // namespace

RealField make_initial_data(const Grid& g, const InitialDataSpec& spec) {
  const double w = spec.width;
  const double c = spec.center;
  if (!(w > 0.0)) throw ConfigError("initial.width: needs width > 0");
  const double root_2pi = std::sqrt(2.0 * std::numbers::pi);
  if (spec.shape == "gaussian") {
    const double amp = std::isfinite(spec.mass) ? spec.mass / (w * root_2pi)
                                                : spec.amplitude;
    return RealField::sample(g, [&](double x) {
      const double z = (x - c) / w;
      return amp * std::exp(-0.5 * z * z);
    });
  }
  if (spec.shape == "dgaussian") {
    if (std::isfinite(spec.mass) && spec.mass != 0.0) {
      throw ConfigError("initial.mass: dgaussian carries zero mass");
    }
    const double amp = spec.amplitude;
    return RealField::sample(g, [&](double x) {
      const double z = (x - c) / w;
      return -amp * z * std::exp(-0.5 * z * z);
    });
  }
  if (spec.shape == "double-bump") {
    const double amp = std::isfinite(spec.mass)
                           ? spec.mass / (2.0 * w * root_2pi)
                           : spec.amplitude;
    return RealField::sample(g, [&](double x) {
      const double zl = (x - c + 3.0 * w) / w;
      const double zr = (x - c - 3.0 * w) / w;
      return amp * (std::exp(-0.5 * zl * zl) + std::exp(-0.5 * zr * zr));
    });
  }
  throw ConfigError("initial.shape: unknown shape " + spec.shape);
}

ExperimentConfig parse_config(const json& j) {
  expect_object(j, "");
  expect_keys(j, "", {"schema_version", "kind", "alpha", "grid", "initial",
                      "solver", "times", "window", "series", "order", "checks",
                      "seed", "output_dir"});

  ExperimentConfig cfg;
  const long long version = int_field(j, "", "schema_version", true);
  if (version != 1) fail(".schema_version", "this build reads version 1");
  cfg.schema_version = 1;
  cfg.kind = str_field(j, "", "kind", true);
  if (!kKinds.count(cfg.kind)) fail(".kind", "unknown experiment kind");
  cfg.alpha = num_field(j, "", "alpha", true);

  if (!j.contains("grid")) fail(".grid", "missing required field");
  const json& jg = j.at("grid");
  expect_object(jg, ".grid");
  expect_keys(jg, ".grid", {"n", "L"});
  cfg.n = static_cast<int>(int_field(jg, ".grid", "n", true));
  cfg.L = num_field(jg, ".grid", "L", true);

  const bool solver_kind = is_solver_kind(cfg.kind);
  const bool needs_initial = cfg.kind != "kernel-check";
  if (j.contains("initial")) {
    if (!needs_initial) fail(".initial", "not used by kind " + cfg.kind);
    const json& ji = j.at("initial");
    expect_object(ji, ".initial");
    expect_keys(ji, ".initial",
                {"shape", "amplitude", "center", "width", "mass"});
    cfg.initial.shape = str_field(ji, ".initial", "shape", false, "gaussian");
    cfg.initial.amplitude = num_field(ji, ".initial", "amplitude", false, 1.0);
    cfg.initial.center = num_field(ji, ".initial", "center", false, 0.0);
    cfg.initial.width = num_field(ji, ".initial", "width", false, 1.0);
    cfg.initial.mass =
        num_field(ji, ".initial", "mass", false,
                  std::numeric_limits<double>::quiet_NaN());
  } else if (needs_initial) {
    fail(".initial", "missing required field");
  }

  if (j.contains("solver")) {
    if (!solver_kind) fail(".solver", "not used by kind " + cfg.kind);
    const json& js = j.at("solver");
    expect_object(js, ".solver");
    expect_keys(js, ".solver",
                {"dt", "T", "output_times", "dealias", "cfl_safety"});
    cfg.solver.dt = num_field(js, ".solver", "dt", false, 0.0);
    cfg.solver.T = num_field(js, ".solver", "T", true);
    cfg.solver.dealias = bool_field(js, ".solver", "dealias", false, true);
    cfg.solver.cfl_safety =
        num_field(js, ".solver", "cfl_safety", false, 0.5);
    if (js.contains("output_times")) {
      const json& jt = js.at("output_times");
      if (!jt.is_array()) fail(".solver.output_times", "expected an array");
      for (const json& v : jt) {
        if (!v.is_number()) fail(".solver.output_times", "expected numbers");
        cfg.solver.output_times.push_back(v.get<double>());
      }
    }
  } else if (solver_kind) {
    fail(".solver", "missing required field");
  }

  if (j.contains("times")) {
    std::vector<double> ts = parse_times(j.at("times"), ".times");
    if (solver_kind) {
      if (!cfg.solver.output_times.empty()) {
        fail(".times", "give either solver.output_times or times, not both");
      }
      cfg.solver.output_times = ts;
    } else {
      cfg.times = ts;
    }
  } else if (!solver_kind) {
    fail(".times", "missing required field");
  }
  cfg.solver.alpha = cfg.alpha;

  if (j.contains("window")) {
    const json& jw = j.at("window");
    expect_object(jw, ".window");
    expect_keys(jw, ".window", {"lo", "hi"});
    cfg.window_lo = num_field(jw, ".window", "lo", true);
    cfg.window_hi = num_field(jw, ".window", "hi", true);
  }

  if (j.contains("series")) {
    const json& jl = j.at("series");
    if (!jl.is_array()) fail(".series", "expected an array");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      const std::string path = ".series[" + std::to_string(i) + "]";
      const json& je = jl.at(i);
      expect_object(je, path);
      expect_keys(je, path, {"p", "j"});
      if (!je.contains("p")) fail(path + ".p", "missing required field");
      SeriesSpec s;
      s.p = parse_p(je.at("p"), path + ".p");
      s.j = static_cast<int>(int_field(je, path, "j", false, 0));
      cfg.series.push_back(s);
    }
  }
  if (cfg.series.empty() &&
      (cfg.kind == "profile-sub1" || cfg.kind == "profile-log")) {
    cfg.series.push_back(SeriesSpec{Lp::L2, 0});
  }

  cfg.order = static_cast<int>(int_field(j, "", "order", false, -1));

  if (j.contains("checks")) {
    const json& jc = j.at("checks");
    expect_object(jc, ".checks");
    expect_keys(jc, ".checks",
                {"slope_tolerance", "max_abs_error", "rho_max", "ratio_t",
                 "ratio_rel_tolerance"});
    cfg.checks.slope_tolerance =
        num_field(jc, ".checks", "slope_tolerance", false,
                  std::numeric_limits<double>::quiet_NaN());
    cfg.checks.max_abs_error =
        num_field(jc, ".checks", "max_abs_error", false,
                  std::numeric_limits<double>::quiet_NaN());
    cfg.checks.rho_max = num_field(jc, ".checks", "rho_max", false, -0.5);
    cfg.checks.ratio_t =
        num_field(jc, ".checks", "ratio_t", false,
                  std::numeric_limits<double>::quiet_NaN());
    cfg.checks.ratio_rel_tolerance =
        num_field(jc, ".checks", "ratio_rel_tolerance", false,
                  std::numeric_limits<double>::quiet_NaN());
  }

  if (j.contains("seed")) {
    const json& js = j.at("seed");
    if (!js.is_number_integer() || js.get<long long>() < 0) {
      fail(".seed", "expected a nonnegative integer");
    }
    cfg.seed = js.get<unsigned long long>();
  }
  cfg.output_dir = str_field(j, "", "output_dir", false, "out");

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config " + path + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["kind"] = cfg.kind;
  j["alpha"] = cfg.alpha;
  j["grid"] = {{"n", cfg.n}, {"L", cfg.L}};
  if (cfg.kind != "kernel-check") {
    json ji;
    ji["shape"] = cfg.initial.shape;
    ji["amplitude"] = cfg.initial.amplitude;
    ji["center"] = cfg.initial.center;
    ji["width"] = cfg.initial.width;
    if (std::isfinite(cfg.initial.mass)) ji["mass"] = cfg.initial.mass;
    j["initial"] = ji;
  }
  if (is_solver_kind(cfg.kind)) {
    j["solver"] = {{"dt", cfg.solver.dt},
                   {"T", cfg.solver.T},
                   {"dealias", cfg.solver.dealias},
                   {"cfl_safety", cfg.solver.cfl_safety},
                   {"output_times", cfg.solver.output_times}};
  } else {
    j["sample_times"] = cfg.times;
  }
  if (cfg.window_lo < cfg.window_hi) {
    j["window"] = {{"lo", cfg.window_lo}, {"hi", cfg.window_hi}};
  }
  if (!cfg.series.empty()) {
    json arr = json::array();
    for (const SeriesSpec& s : cfg.series) {
      json je;
      if (s.p == Lp::Linf) {
        je["p"] = "inf";
      } else {
        je["p"] = s.p == Lp::L1 ? 1 : 2;
      }
      je["j"] = s.j;
      arr.push_back(je);
    }
    j["series"] = arr;
  }
  if (cfg.order >= 0) j["order"] = cfg.order;
  json jc;
  if (std::isfinite(cfg.checks.slope_tolerance)) {
    jc["slope_tolerance"] = cfg.checks.slope_tolerance;
  }
  if (std::isfinite(cfg.checks.max_abs_error)) {
    jc["max_abs_error"] = cfg.checks.max_abs_error;
  }
  jc["rho_max"] = cfg.checks.rho_max;
  if (std::isfinite(cfg.checks.ratio_t)) jc["ratio_t"] = cfg.checks.ratio_t;
  if (std::isfinite(cfg.checks.ratio_rel_tolerance)) {
    jc["ratio_rel_tolerance"] = cfg.checks.ratio_rel_tolerance;
  }
  j["checks"] = jc;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j;
}

void run_kernel_check(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Grid g = make_grid(cfg.n, cfg.L);
  SeriesOutcome out;
  out.p = Lp::Linf;
  out.j = 0;
  const bool gaussian_case = std::abs(cfg.alpha - 2.0) <= 1e-12;
  const bool poisson_case = std::abs(cfg.alpha - 1.0) <= 1e-12;
  out.label = gaussian_case || poisson_case ? "closed-form error"
                                            : "self-similarity error";
  double worst = 0.0;
  for (double t : cfg.times) {
    double value = 0.0;
    if (gaussian_case || poisson_case) {
      RealField sampled = sample_G(g, cfg.alpha, t);
      for (int m = 0; m < g.n(); ++m) {
        const double x = g.x(m);
        const double closed =
            gaussian_case
                ? std::exp(-x * x / (4.0 * t)) /
                      std::sqrt(4.0 * std::numbers::pi * t)
                : t / (std::numbers::pi * (t * t + x * x));
        if (std::abs(x) <= g.L() / 4.0) {
          value = std::max(value, std::abs(sampled.values[m] - closed));
        }
      }
    } else {
      const double t2 = 4.0 * t;
      const double lambda = std::pow(t / t2, 1.0 / cfg.alpha);
      RealField scaled = rescale(sample_G(g, cfg.alpha, t), lambda);
      RealField target = sample_G(g, cfg.alpha, t2);
      RealField diff = scaled;
      add_scaled(diff, -1.0, target);
      value = lp_norm(diff, Lp::Linf) / lp_norm(target, Lp::Linf);
    }
    out.ts.push_back(t);
    out.values.push_back(value);
    worst = std::max(worst, value);
  }
  out.passed = worst <= cfg.checks.max_abs_error;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst error %.3e vs tolerance %.3e", worst,
                cfg.checks.max_abs_error);
  out.detail = buf;
  rep.series.push_back(std::move(out));
}

void run_linear_expansion(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Grid g = make_grid(cfg.n, cfg.L);
  RealField u0 = make_initial_data(g, cfg.initial);
  for (const SeriesSpec& s : cfg.series) {
    RemainderSeries rs =
        remainder_series(u0, cfg.alpha, cfg.times, cfg.order, s.p, s.j);
    std::vector<double> vs;
    for (const NormPoint& np : rs.norms) vs.push_back(np.value);
    SeriesOutcome out;
    out.label = series_label(s.p, s.j);
    out.p = s.p;
    out.j = s.j;
    out.ts = rs.times;
    out.values = vs;
    out.has_fit = true;
    out.fit = fit_power_law(rs.times, vs, cfg.window_lo, cfg.window_hi,
                            rs.log_correction);
    out.predicted_exponent = rs.predicted_exponent;
    out.predicted = reference_curve(rs.times, vs, cfg.window_lo,
                                    rs.predicted_exponent, rs.log_correction);
    out.passed = std::abs(out.fit.slope - rs.predicted_exponent) <=
                 cfg.checks.slope_tolerance;
    out.detail = fit_detail(out.fit, rs.predicted_exponent,
                            cfg.checks.slope_tolerance);
    merge_warnings(rep.warnings, rs.warnings);
    rep.series.push_back(std::move(out));
  }
}

Trajectory run_solver(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Grid g = make_grid(cfg.n, cfg.L);
  RealField u0 = make_initial_data(g, cfg.initial);
  Trajectory traj = simulate(u0, cfg.solver);
  merge_warnings(rep.warnings, traj.warnings);
  return traj;
}

void run_decay(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Trajectory traj = run_solver(cfg, rep);
  for (const SeriesSpec& s : cfg.series) {
    std::vector<double> ts, vs;
    for (const Frame& f : traj.frames) {
      if (f.t <= 0.0) continue;
      ts.push_back(f.t);
      vs.push_back(sobolev_norm(f.u, s.p, s.j));
    }
    const double predicted =
        -(one_minus_inv_p(s.p) + s.j) / cfg.alpha;
    SeriesOutcome out;
    out.label = series_label(s.p, s.j);
    out.p = s.p;
    out.j = s.j;
    out.ts = ts;
    out.values = vs;
    out.has_fit = true;
    out.fit = fit_power_law(ts, vs, cfg.window_lo, cfg.window_hi, false);
    out.predicted_exponent = predicted;
    out.predicted = reference_curve(ts, vs, cfg.window_lo, predicted, false);
    out.passed =
        std::abs(out.fit.slope - predicted) <= cfg.checks.slope_tolerance;
    out.detail = fit_detail(out.fit, predicted, cfg.checks.slope_tolerance);
    rep.series.push_back(std::move(out));
  }
}

void run_first_order(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Trajectory traj = run_solver(cfg, rep);
  for (const SeriesSpec& s : cfg.series) {
    RemainderSeries rs = first_order_remainder(traj, s.p, s.j);
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < rs.times.size(); ++i) {
      if (rs.times[i] <= 0.0) continue;
      ts.push_back(rs.times[i]);
      vs.push_back(rs.norms[i].value);
    }
    SeriesOutcome out;
    out.label = series_label(s.p, s.j);
    out.p = s.p;
    out.j = s.j;
    out.ts = ts;
    out.values = vs;
    out.has_fit = true;
    out.fit = fit_power_law(ts, vs, cfg.window_lo, cfg.window_hi,
                            rs.log_correction);
    out.predicted_exponent = rs.predicted_exponent;
    out.predicted = reference_curve(ts, vs, cfg.window_lo,
                                    rs.predicted_exponent, rs.log_correction);
    out.passed = std::abs(out.fit.slope - rs.predicted_exponent) <=
                 cfg.checks.slope_tolerance;
    out.detail = fit_detail(out.fit, rs.predicted_exponent,
                            cfg.checks.slope_tolerance);
    rep.series.push_back(std::move(out));
  }
}

void run_profile(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Trajectory traj = run_solver(cfg, rep);
  for (const SeriesSpec& s : cfg.series) {
    ProfileCheck pc =
        cfg.kind == "profile-sub1"
            ? second_order_profile_sub1(traj, cfg.window_lo, cfg.window_hi,
                                        s.p, s.j)
            : log_profile_alpha1(traj, cfg.window_lo, cfg.window_hi, s.p,
                                 s.j);
    SeriesOutcome out;
    out.label = "profile " + series_label(s.p, s.j);
    out.p = s.p;
    out.j = s.j;
    out.ts = pc.times;
    out.values = pc.scaled_values;
    out.spearman_rho = pc.spearman_rho;
    out.trend = trend_name(pc.trend);
    out.passed = pc.trend == Trend::Decreasing &&
                 pc.spearman_rho <= cfg.checks.rho_max;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "scaled remainder trend %s (spearman %.3f vs bound %.3f, "
                  "scaling exponent %.4f)",
                  out.trend.c_str(), pc.spearman_rho, cfg.checks.rho_max,
                  pc.scaling_exponent);
    out.detail = buf;
    merge_warnings(rep.warnings, pc.warnings);
    rep.series.push_back(std::move(out));
  }

  if (cfg.kind == "profile-log") {
    CumulativeEnergy ce = cumulative_energy(traj);
    const double mass = moment(traj.u0, 0).value;
    const double target = mass * mass / (2.0 * std::numbers::pi);
    const double ratio = log_energy_ratio(ce, cfg.checks.ratio_t);
    SeriesOutcome out;
    out.label = "energy-ratio";
    out.p = Lp::L2;
    out.j = 0;
    out.ts = {cfg.checks.ratio_t};
    out.values = {ratio};
    out.predicted = {target};
    out.passed =
        std::abs(ratio - target) <= cfg.checks.ratio_rel_tolerance * target;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "I(t)/log t = %.5f vs M^2/(2 pi) = %.5f (rel tolerance "
                  "%.2f)",
                  ratio, target, cfg.checks.ratio_rel_tolerance);
    out.detail = buf;
    rep.series.push_back(std::move(out));
  }
}

void run_picard(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Trajectory traj = run_solver(cfg, rep);
  const int level =
      cfg.order >= 0 ? cfg.order : picard_order(cfg.alpha).order + 1;
  Trajectory ladder =
      picard_iterate(traj.u0, cfg.alpha, level, cfg.solver);
  for (const SeriesSpec& s : cfg.series) {
    RemainderSeries rs = picard_remainder(traj, ladder, s.p, s.j);
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < rs.times.size(); ++i) {
      if (rs.times[i] <= 0.0) continue;
      ts.push_back(rs.times[i]);
      vs.push_back(rs.norms[i].value);
    }
    SeriesOutcome out;
    out.label = "iterate-" + std::to_string(level) + " " +
                series_label(s.p, s.j);
    out.p = s.p;
    out.j = s.j;
    out.ts = ts;
    out.values = vs;
    out.has_fit = true;
    out.fit = fit_power_law(ts, vs, cfg.window_lo, cfg.window_hi,
                            rs.log_correction);
    out.predicted_exponent = rs.predicted_exponent;
    out.predicted = reference_curve(ts, vs, cfg.window_lo,
                                    rs.predicted_exponent, rs.log_correction);
    out.passed = std::abs(out.fit.slope - rs.predicted_exponent) <=
                 cfg.checks.slope_tolerance;
    out.detail = fit_detail(out.fit, rs.predicted_exponent,
                            cfg.checks.slope_tolerance);
    merge_warnings(rep.warnings, rs.warnings);
    rep.series.push_back(std::move(out));
  }
}

void run_invariants(const ExperimentConfig& cfg, ExperimentReport& rep) {
  Trajectory traj = run_solver(cfg, rep);
  InvariantReport ir = invariant_report(traj);
  merge_warnings(rep.warnings, ir.notes);

  std::vector<double> ts;
  for (const Frame& f : traj.frames) ts.push_back(f.t);

  auto push = [&](const std::string& label, Lp p,
                  const std::vector<double>& vs, bool passed,
                  const std::string& detail) {
    SeriesOutcome out;
    out.label = label;
    out.p = p;
    out.j = 0;
    out.ts = ts;
    out.values = vs;
    out.passed = passed;
    out.detail = detail;
    rep.series.push_back(std::move(out));
  };

  std::vector<double> mass, l1, l2, sup;
  for (const Frame& f : traj.frames) {
    mass.push_back(f.diag.mass);
    l1.push_back(f.diag.l1);
    l2.push_back(f.diag.l2);
    sup.push_back(f.diag.max);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "relative drift %.3e vs 1e-10",
                ir.mass_drift);
  push("mass", Lp::L1, mass, ir.mass_conserved, buf);
  std::snprintf(buf, sizeof(buf), "worst relative increase %.3e vs 1e-8",
                ir.worst_l1_increase);
  push("l1-norm", Lp::L1, l1, ir.l1_nonincreasing, buf);
  std::snprintf(buf, sizeof(buf), "worst relative increase %.3e",
                ir.worst_l2_increase);
  push("l2-norm", Lp::L2, l2, ir.l2_nonincreasing, buf);
  if (ir.max_principle_applicable) {
    std::snprintf(buf, sizeof(buf),
                  "overshoot %.3e, undershoot %.3e vs 1e-8",
                  ir.worst_overshoot, ir.worst_undershoot);
    push("max-principle", Lp::Linf, sup, ir.max_principle_ok, buf);
  } else {
    push("max-principle", Lp::Linf, sup, true,
         "recorded, not asserted: alpha < 1");
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.kind = cfg.kind;
  rep.seed = cfg.seed;
  rep.config_echo = config_to_json(cfg);

  if (cfg.kind == "kernel-check") {
    run_kernel_check(cfg, rep);
  } else if (cfg.kind == "linear-expansion") {
    run_linear_expansion(cfg, rep);
  } else if (cfg.kind == "decay") {
    run_decay(cfg, rep);
  } else if (cfg.kind == "first-order") {
    run_first_order(cfg, rep);
  } else if (cfg.kind == "profile-sub1" || cfg.kind == "profile-log") {
    run_profile(cfg, rep);
  } else if (cfg.kind == "picard") {
    run_picard(cfg, rep);
  } else {
    run_invariants(cfg, rep);
  }

  rep.passed = true;
  for (const SeriesOutcome& out : rep.series) rep.passed &= out.passed;
  rep.with_warnings = !rep.warnings.empty();
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rep;
}

namespace {

json outcome_to_json(const SeriesOutcome& out) {
  json j;
  j["label"] = out.label;
  j["p"] = p_csv(out.p);
  j["j"] = out.j;
  j["passed"] = out.passed;
  j["detail"] = out.detail;
  if (out.has_fit) {
    j["fit"] = {{"slope", out.fit.slope},
                {"intercept", out.fit.intercept},
                {"r_squared", out.fit.r_squared},
                {"window_lo", out.fit.window_lo},
                {"window_hi", out.fit.window_hi},
                {"log_correction", out.fit.log_correction},
                {"points_used", out.fit.points_used}};
    j["predicted_exponent"] = out.predicted_exponent;
  }
  if (std::isfinite(out.spearman_rho)) j["spearman_rho"] = out.spearman_rho;
  if (!out.trend.empty()) j["trend"] = out.trend;
  return j;
}

}  // namespace

void write_artifacts(const ExperimentConfig& cfg, ExperimentReport& report) {
  namespace fs = std::filesystem;
  fs::path dir(cfg.output_dir);
  if (const char* root = std::getenv("KDVLAB_OUTPUT_ROOT");
      root != nullptr && dir.is_relative()) {
    dir = fs::path(root) / dir;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("output_dir " + dir.string() + ": " + ec.message());
  }

  for (const SeriesOutcome& out : report.series) {
    const std::string name = "series_" + slugify(out.label) + ".csv";
    std::ofstream csv(dir / name);
    const bool with_predicted = !out.predicted.empty();
    csv << (with_predicted ? "t,p,j,value,predicted" : "t,p,j,value") << "\n";
    for (std::size_t i = 0; i < out.ts.size(); ++i) {
      csv << fmt17(out.ts[i]) << "," << p_csv(out.p) << "," << out.j << ","
          << fmt17(out.values[i]);
      if (with_predicted) csv << "," << fmt17(out.predicted[i]);
      csv << "\n";
    }
    report.artifacts[out.label] = name;
  }

  const bool loglog = cfg.kind == "kernel-check" ||
                      cfg.kind == "linear-expansion" || cfg.kind == "decay" ||
                      cfg.kind == "first-order" || cfg.kind == "picard";
  {
    std::ofstream gp(dir / "plot.gp");
    gp << "set terminal pngcairo size 960,640\n";
    gp << "set output '" << cfg.kind << ".png'\n";
    gp << "set datafile separator ','\n";
    gp << "set key left bottom\n";
    if (loglog) gp << "set logscale xy\n";
    gp << "set xlabel 't'\n";
    gp << "set ylabel 'value'\n";
    gp << "plot \\\n";
    bool first = true;
    for (const SeriesOutcome& out : report.series) {
      const std::string name = report.artifacts[out.label];
      if (!first) gp << ", \\\n";
      first = false;
      gp << "  '" << name << "' skip 1 using 1:4 with linespoints title '"
         << out.label << "'";
      if (!out.predicted.empty()) {
        gp << ", \\\n  '" << name
           << "' skip 1 using 1:5 with lines dashtype 2 title '" << out.label
           << " reference'";
      }
    }
    gp << "\n";
    report.artifacts["plot"] = "plot.gp";
  }

  {
    json j;
    j["kind"] = report.kind;
    j["config"] = report.config_echo;
    j["seed"] = report.seed;
    j["passed"] = report.passed;
    j["with_warnings"] = report.with_warnings;
    j["wall_seconds"] = report.wall_seconds;
    json arr = json::array();
    for (const SeriesOutcome& out : report.series) {
      arr.push_back(outcome_to_json(out));
    }
    j["series"] = arr;
    j["warnings"] = report.warnings;
    json files;
    for (const auto& [k, v] : report.artifacts) files[k] = v;
    j["artifacts"] = files;
    std::ofstream rp(dir / "report.json");
    rp << j.dump(2) << "\n";
    report.artifacts["report"] = "report.json";
  }
}

int exit_code(const ExperimentReport& report) {
  return report.passed ? 0 : 1;
}

}  // namespace kdvlab
