#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "herdgibbs/diagnostics.hpp"
#include "herdgibbs/experiments.hpp"
#include "herdgibbs/gibbs.hpp"
#include "herdgibbs/io.hpp"
#include "herdgibbs/rng.hpp"

using namespace herdgibbs;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("experiments");

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("herdgibbs_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config files parse key-value lines") {
  const fs::path dir = temp_dir("config");
  {
    std::ofstream out(dir / "a.cfg");
    out << "# comment\n"
        << "sweeps = 128\n"
        << "epsilons 0.1,0.01   # inline comment\n"
        << "\n"
        << "seed=42\n";
  }
  const auto cfg = parse_config_file(dir / "a.cfg");
  CHECK(cfg.at("sweeps") == "128");
  CHECK(cfg.at("epsilons") == "0.1,0.01");
  CHECK(cfg.at("seed") == "42");

  {
    std::ofstream out(dir / "bad.cfg");
    out << "loneword\n";
  }
  CHECK_THROWS_AS(parse_config_file(dir / "bad.cfg"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_file(dir / "missing.cfg"), std::invalid_argument);
}

TEST_CASE("atomic_write replaces content") {
  const fs::path dir = temp_dir("atomic");
  atomic_write(dir / "f.txt", "one");
  atomic_write(dir / "f.txt", "two");
  CHECK(slurp(dir / "f.txt") == "two");
  CHECK_FALSE(fs::exists(dir / "f.txt.tmp"));
}

TEST_CASE("csv writers round-trip through the reader") {
  const Model m = make_two_var_model(0.1);
  HerdedSampler s(m, {1, 1}, {0, 1});
  const SampleRecord rec = s.run(16);

  const CsvTable t = parse_csv(sample_record_csv(rec));
  CHECK(t.header == std::vector<std::string>{"sweep", "x0", "x1"});
  CHECK(t.rows.size() == 16);
  CHECK(t.rows.front()[0] == 1.0);

  const ExactDistribution d = enumerate_joint(m);
  const CsvTable td = parse_csv(distribution_csv(d));
  CHECK(td.header == std::vector<std::string>{"state_index", "probability"});
  REQUIRE(td.rows.size() == 4);
  CHECK(td.rows[3][1] == 0.65);  // %.17g round-trips exactly

  std::vector<std::uint64_t> grid = {2, 4, 8};
  const ErrorSeries es =
      error_series(rec, d, ErrorMetric::kTvJoint, 0, grid);
  const CsvTable te = parse_csv(error_series_csv(es));
  CHECK(te.header == std::vector<std::string>{"T", "error"});
  CHECK(te.rows.size() == 3);

  SamplerOptions traced;
  traced.record_trace = true;
  HerdedSampler ts(m, {1, 1}, {0, 1}, traced);
  ts.run(4);
  const CsvTable tt = parse_csv(step_trace_csv(ts.trace()));
  CHECK(tt.header ==
        std::vector<std::string>{"t", "var", "blanket_code", "w_before", "p",
                                 "x_emitted"});
  CHECK(tt.rows.size() == 8);

  const CsvTable tm = parse_csv(mean_field_csv({{0.5, 0.25}, {0.4, 0.3}}));
  CHECK(tm.header == std::vector<std::string>{"sweep", "q0", "q1"});
  CHECK(tm.rows[1][2] == 0.3);
}

TEST_CASE("slope report exposes the fit fields") {
  SlopeFit fit;
  fit.slope = -1.0;
  fit.intercept = 0.5;
  fit.n_points = 9;
  fit.n_excluded = 2;
  const std::string report = slope_report(fit);
  CHECK(report.find("slope=-1") != std::string::npos);
  CHECK(report.find("n_points=9") != std::string::npos);
  CHECK(report.find("n_excluded=2") != std::string::npos);
}

TEST_CASE("csv reader rejects malformed tables") {
  CHECK_THROWS(parse_csv(""));
  CHECK_THROWS(parse_csv("a,b\n1,2,3\n"));
  CHECK_THROWS(parse_csv("a,b\n1,x\n"));
}

TEST_CASE("toy2 run emits parseable artifacts") {
  const fs::path dir = temp_dir("toy2");
  Toy2Config cfg;
  cfg.global.out_dir = dir;
  cfg.epsilons = {0.1};
  cfg.t_max_pow = 9;
  cfg.gibbs_replicates = 3;
  run_toy2(cfg);

  const CsvTable herded =
      parse_csv(slurp(dir / "toy2_eps0.1_herded_marginal.csv"));
  CHECK(herded.header == std::vector<std::string>{"T", "error"});
  CHECK(herded.rows.size() == 6);  // 2^4..2^9

  const CsvTable gibbs = parse_csv(slurp(dir / "toy2_eps0.1_gibbs_marginal.csv"));
  CHECK(gibbs.header ==
        std::vector<std::string>{"T", "mean_error", "std_error", "median_error"});

  const std::string report = slurp(dir / "toy2_report.txt");
  CHECK(report.find("herded_marginal_slope") != std::string::npos);
  CHECK(report.find("theorem2") != std::string::npos);
}

TEST_CASE("toy2 rejects out-of-range epsilon") {
  Toy2Config cfg;
  cfg.epsilons = {0.5};
  CHECK_THROWS_AS(run_toy2(cfg), std::invalid_argument);
}

TEST_CASE("small-epsilon herding reaches 1e-3 before the Gibbs median") {
  // the eps = 1e-4 dynamics have cycles of ~1/eps sweeps, so the grid must
  // extend well past 2^16 for either method to have a chance
  const double eps = 1e-4;
  const Model m = make_two_var_model(eps);
  const ExactDistribution oracle = enumerate_joint(m);
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 16; t <= (std::uint64_t{1} << 20); t *= 2)
    grid.push_back(t);

  auto first_below = [&](const ErrorSeries& s) {
    // envelope: suffix max, then the first grid T that dips under 1e-3
    std::vector<double> env(s.points.size());
    double run = 0.0;
    for (std::size_t k = s.points.size(); k-- > 0;) {
      run = std::max(run, s.points[k].second);
      env[k] = run;
    }
    for (std::size_t k = 0; k < env.size(); ++k)
      if (env[k] < 1e-3) return s.points[k].first;
    return std::uint64_t{0};  // never
  };

  HerdedSampler hs(m, {1, 1}, {0, 1});
  const SampleRecord hrec = hs.run(grid.back());
  const std::uint64_t herded_t = first_below(
      error_series(hrec, oracle, ErrorMetric::kMarginalAbsError, 0, grid, 0));
  REQUIRE(herded_t > 0);

  std::vector<std::uint64_t> gibbs_ts;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    GibbsConfig gc;
    gc.seed = replicate_seed(4, rep);
    gc.sweeps = grid.back();
    const std::uint64_t t = first_below(error_series(
        gibbs_run(m, {1, 1}, gc), oracle, ErrorMetric::kMarginalAbsError, 0,
        grid, 0));
    gibbs_ts.push_back(t == 0 ? std::uint64_t{1} << 62 : t);  // never = huge
  }
  std::sort(gibbs_ts.begin(), gibbs_ts.end());
  const std::uint64_t gibbs_median = gibbs_ts[5];
  CHECK(herded_t < gibbs_median);
}

TEST_CASE("empty run reports discrepancy and the rational control plateaus") {
  const fs::path dir = temp_dir("empty");
  EmptyConfig cfg;
  cfg.global.out_dir = dir;
  cfg.sweeps = 20000;
  cfg.discrepancy_points = 2048;
  run_empty(cfg);

  const CsvTable tv = parse_csv(slurp(dir / "empty_tv.csv"));
  CHECK(tv.rows.back()[1] < 0.01);

  const CsvTable control = parse_csv(slurp(dir / "empty_rational_tv.csv"));
  for (const auto& row : control.rows) CHECK(row[1] >= 0.1);

  const std::string report = slurp(dir / "empty_report.txt");
  CHECK(report.find("discrepancy_1d_var0") != std::string::npos);
  CHECK(report.find("rational_control_final_tv") != std::string::npos);

  EmptyConfig bad;
  bad.marginals = {1.5};
  CHECK_THROWS_AS(run_empty(bad), std::invalid_argument);
}

TEST_CASE("single-variable empty model satisfies the scalar bound end to end") {
  const Model m = make_independent_model({0.75});
  HerdedSampler s(m, {1}, {0});
  const SampleRecord rec = s.run(4096);
  const ExactDistribution oracle = enumerate_joint(m);
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 1; t <= 4096; t *= 2) grid.push_back(t);
  const ErrorSeries series =
      error_series(rec, oracle, ErrorMetric::kMarginalAbsError, 0, grid, 0);
  for (const auto& [T, err] : series.points)
    CHECK(static_cast<double>(T) * err <= 1.0 + 1e-9);
}

TEST_CASE("denoise run emits summary, series, and images") {
  const fs::path dir = temp_dir("denoise");
  DenoiseExpConfig cfg;
  cfg.global.out_dir = dir;
  cfg.image = "synthetic";
  cfg.synthetic_size = 8;
  cfg.sigmas = {2.0};
  cfg.seeds_count = 2;
  cfg.sweeps = 5;
  cfg.methods = {"herded-shared", "mf1"};
  run_denoise(cfg);

  const std::string summary = slurp(dir / "denoise_summary.csv");
  std::istringstream lines(summary);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "method,sigma,mean_mse,std_mse");
  std::size_t rows = 0;
  while (std::getline(lines, line)) rows += !line.empty();
  CHECK(rows == 2);  // one per (method, sigma)
  CHECK(summary.find("herded-shared,2,") != std::string::npos);
  CHECK(summary.find("mean-field-D1,2,") != std::string::npos);
}

TEST_CASE("denoise artifacts") {
  const fs::path dir = temp_dir("denoise2");
  DenoiseExpConfig cfg;
  cfg.global.out_dir = dir;
  cfg.image = "synthetic";
  cfg.synthetic_size = 8;
  cfg.sigmas = {2.0};
  cfg.seeds_count = 2;
  cfg.sweeps = 5;
  cfg.methods = {"herded-shared"};
  run_denoise(cfg);

  CHECK(fs::exists(dir / "truth.pgm"));
  const GrayImage truth = read_pgm((dir / "truth.pgm").string());
  CHECK(truth.width == 8);
  const GrayImage den =
      read_pgm((dir / "denoise_herded-shared_sigma2.pgm").string());
  CHECK(den.width == 8);
  const CsvTable series =
      parse_csv(slurp(dir / "denoise_herded-shared_sigma2_series.csv"));
  CHECK(series.header ==
        std::vector<std::string>{"sweep", "mse", "mislabel_frac"});
  CHECK(series.rows.size() == 5);

  DenoiseExpConfig missing;
  missing.image = "/nonexistent/image.pgm";
  CHECK_THROWS(run_denoise(missing));
  DenoiseExpConfig none;
  none.image = "";
  CHECK_THROWS_AS(run_denoise(none), std::invalid_argument);
}

TEST_CASE("seed derivations are documented splitmix outputs") {
  SplitMix64 sm(9);
  std::vector<std::uint64_t> outs;
  for (int k = 0; k < 6; ++k) outs.push_back(sm.next());
  CHECK(noise_seed(9, 0) == outs[0]);
  CHECK(sampler_seed(9, 0) == outs[1]);
  CHECK(noise_seed(9, 1) == outs[2]);
  CHECK(sampler_seed(9, 2) == outs[5]);
}

TEST_SUITE_END();
