#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdvlab/experiment.hpp"
#include "kdvlab/fit.hpp"
#include "kdvlab/spectral.hpp"
#include "kdvlab/verify.hpp"

using namespace kdvlab;
using nlohmann::json;

namespace {

json kernel_check_config() {
  return json{{"schema_version", 1},
              {"kind", "kernel-check"},
              {"alpha", 1.0},
              {"grid", {{"n", 65536}, {"L", 4096.0}}},
              {"times", {1.0, 4.0}},
              {"checks", {{"max_abs_error", 1e-6}}}};
}

json decay_config() {
  return json{{"schema_version", 1},
              {"kind", "decay"},
              {"alpha", 1.5},
              {"grid", {{"n", 256}, {"L", 200.0}}},
              {"initial", {{"shape", "gaussian"}, {"amplitude", 0.5}}},
              {"solver",
               {{"T", 30.0},
                {"output_times",
                 {5.0, 7.0, 10.0, 13.0, 17.0, 21.0, 25.0, 30.0}}}},
              {"window", {{"lo", 5.0}, {"hi", 30.0}}},
              {"series", {{{"p", 2}, {"j", 0}}}},
              {"checks", {{"slope_tolerance", 1.5}}}};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("kdvlab_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_NOTHROW(parse_config(kernel_check_config()));

  json bad = kernel_check_config();
  bad["extra"] = 1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = kernel_check_config();
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = kernel_check_config();
  bad["grid"]["spacing"] = 0.1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = kernel_check_config();
  bad["kind"] = "frequency-sweep";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = kernel_check_config();
  bad["initial"] = {{"shape", "gaussian"}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = kernel_check_config();
  bad["seed"] = -3;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = decay_config();
  bad["times"] = {5.0, 10.0, 20.0};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  bad = decay_config();
  bad["solver"]["dt"] = 10.0;
  try {
    parse_config(bad);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfl") != std::string::npos);
  }

  bad = decay_config();
  bad["solver"]["output_times"] = {5.0, 40.0};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("config parsing enforces kind-specific constraints") {
  json cfg = decay_config();
  cfg["kind"] = "profile-log";
  cfg["window"] = {{"lo", 5.0}, {"hi", 30.0}};
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // alpha must be 1

  cfg["alpha"] = 1.0;
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // first frame must be t=0

  cfg = decay_config();
  cfg["kind"] = "profile-sub1";
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // alpha must be below 1

  cfg = decay_config();
  cfg["kind"] = "picard";
  cfg["alpha"] = 0.9;
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // alpha must exceed 1

  cfg = json{{"schema_version", 1},
             {"kind", "linear-expansion"},
             {"alpha", 1.5},
             {"grid", {{"n", 256}, {"L", 200.0}}},
             {"initial", {{"shape", "gaussian"}}},
             {"times",
              {{"from", 4.0}, {"to", 64.0}, {"count", 8}, {"spacing", "log"}}},
             {"window", {{"lo", 4.0}, {"hi", 64.0}}},
             {"series", {{{"p", 2}, {"j", 0}}}},
             {"order", 0},
             {"checks", {{"slope_tolerance", 0.5}}}};
  ExperimentConfig parsed = parse_config(cfg);
  CHECK(parsed.times.size() == 8);
  CHECK(parsed.times.front() == doctest::Approx(4.0));
  CHECK(parsed.times.back() == doctest::Approx(64.0));

  cfg["times"]["from"] = 0.0;
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // log spacing needs t > 0

  cfg["times"] = {{"from", 4.0}, {"to", 64.0}, {"count", 1}};
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);

  cfg["times"] = {{"from", 4.0}, {"to", 64.0}, {"count", 8}};
  cfg.erase("order");
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // expansion needs order

  cfg["order"] = 1;
  cfg["series"] = {{{"p", 3}, {"j", 0}}};
  CHECK_THROWS_AS(parse_config(cfg), ConfigError);  // p must be 1, 2, or inf

  cfg["series"] = {{{"p", "inf"}, {"j", 0}}};
  CHECK(parse_config(cfg).series[0].p == Lp::Linf);
}

TEST_CASE("initial data shapes honour mass and amplitude requests") {
  Grid g = make_grid(1024, 256.0);

  InitialDataSpec spec;
  spec.shape = "gaussian";
  spec.mass = 2.0;
  spec.width = 1.5;
  RealField u = make_initial_data(g, spec);
  CHECK(moment(u, 0).value == doctest::Approx(2.0).epsilon(1e-12));

  InitialDataSpec amp;
  amp.shape = "gaussian";
  amp.amplitude = 0.7;
  RealField v = make_initial_data(g, amp);
  CHECK(lp_norm(v, Lp::Linf) == doctest::Approx(0.7).epsilon(1e-12));

  InitialDataSpec dg;
  dg.shape = "dgaussian";
  dg.amplitude = 1.0;
  RealField w = make_initial_data(g, dg);
  CHECK(std::abs(moment(w, 0).value) < 1e-12);
  dg.mass = 1.0;
  CHECK_THROWS_AS(make_initial_data(g, dg), ConfigError);

  InitialDataSpec db;
  db.shape = "double-bump";
  db.mass = 2.0;
  db.width = 1.0;
  RealField b = make_initial_data(g, db);
  CHECK(moment(b, 0).value == doctest::Approx(2.0).epsilon(1e-12));

  InitialDataSpec odd;
  odd.shape = "sawtooth";
  CHECK_THROWS_AS(make_initial_data(g, odd), ConfigError);
}

TEST_CASE("kernel-check experiment verifies the Poisson closed form") {
  ExperimentConfig cfg = parse_config(kernel_check_config());
  ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.passed);
  CHECK(exit_code(rep) == 0);
  REQUIRE(rep.series.size() == 1);
  CHECK(rep.series[0].label == "closed-form error");
  CHECK(rep.series[0].values.size() == 2);
  CHECK(rep.series[0].values[0] < 1e-6);

  ExperimentConfig strict = cfg;
  strict.checks.max_abs_error = 1e-18;
  ExperimentReport failing = run_experiment(strict);
  CHECK_FALSE(failing.passed);
  CHECK(exit_code(failing) == 1);
}

TEST_CASE("artifacts round-trip through csv with full precision") {
  TempDir tmp;
  setenv("KDVLAB_OUTPUT_ROOT", tmp.path.c_str(), 1);
  ExperimentConfig cfg = parse_config(decay_config());
  cfg.output_dir = "decay_run";
  ExperimentReport rep = run_experiment(cfg);
  write_artifacts(cfg, rep);
  unsetenv("KDVLAB_OUTPUT_ROOT");

  const std::filesystem::path dir = tmp.path / "decay_run";
  REQUIRE(std::filesystem::exists(dir / "report.json"));
  REQUIRE(std::filesystem::exists(dir / "plot.gp"));
  REQUIRE(rep.artifacts.count("p=2 j=0") == 1);
  const std::filesystem::path csv_path = dir / rep.artifacts.at("p=2 j=0");
  REQUIRE(std::filesystem::exists(csv_path));

  auto rows = read_csv(csv_path);
  REQUIRE(rows.size() >= 6);
  REQUIRE(rows[0] ==
          std::vector<std::string>{"t", "p", "j", "value", "predicted"});
  std::vector<double> ts, vs;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    CHECK(rows[i][1] == "2");
    CHECK(rows[i][2] == "0");
    ts.push_back(std::stod(rows[i][0]));
    vs.push_back(std::stod(rows[i][3]));
  }

  REQUIRE(rep.series[0].has_fit);
  DecayFit refit = fit_power_law(ts, vs, cfg.window_lo, cfg.window_hi,
                                 rep.series[0].fit.log_correction);
  CHECK(refit.slope == rep.series[0].fit.slope);
  CHECK(refit.intercept == rep.series[0].fit.intercept);

  std::ifstream in(dir / "report.json");
  json j = json::parse(in);
  CHECK(j.at("kind") == "decay");
  CHECK(j.at("seed") == 0);
  CHECK(j.at("passed").is_boolean());
  REQUIRE(j.at("series").is_array());
  CHECK(j.at("series")[0].at("fit").at("slope").get<double>() ==
        rep.series[0].fit.slope);

  std::ifstream gp(dir / "plot.gp");
  std::string gp_text((std::istreambuf_iterator<char>(gp)),
                      std::istreambuf_iterator<char>());
  CHECK(gp_text.find("series_p_2_j_0.csv") != std::string::npos);
  CHECK(gp_text.find('/') == std::string::npos);
}

TEST_CASE("verification registry exposes twelve criteria and filters") {
  std::vector<std::string> names = verification_names();
  CHECK(names.size() == 12);
  CHECK(std::count(names.begin(), names.end(), "alpha1-log-law") == 1);
  CHECK_THROWS_AS(run_verification({"no-such-criterion"}, nullptr),
                  ConfigError);
}

TEST_CASE("oracle-equivalence criterion detects a corrupted dealias flag") {
  VerifySummary clean = run_verification({"oracle-equivalence"}, nullptr);
  REQUIRE(clean.criteria.size() == 1);
  CHECK(clean.all_passed);

  setenv("KDVLAB_FAULT", "dealias", 1);
  VerifySummary faulty = run_verification({"oracle-equivalence"}, nullptr);
  unsetenv("KDVLAB_FAULT");
  CHECK_FALSE(faulty.all_passed);
}
