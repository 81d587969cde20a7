#include "herdgibbs/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "herdgibbs/diagnostics.hpp"
#include "herdgibbs/gibbs.hpp"
#include "herdgibbs/io.hpp"
#include "herdgibbs/oracle.hpp"
#include "herdgibbs/rng.hpp"

namespace herdgibbs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Pinned on the first instrumented run of the tau = 0 two-variable series
// (max of T d_v / ln T measured 0.1924 over T in 2^6..2^14) with ~2.5x
// headroom; the log-factor envelope must stay below this.
constexpr double kCorollary1Bound = 0.5;

// FP guard for integer-count bounds; genuine violations are >= 1 apart.
constexpr double kCountSlack = 1e-9;

// The statistical checks run on this fixed, documented seed base so their
// reported values never depend on the CLI seed; determinism checks still use
// the configured seed since they only compare a run against its rerun.
constexpr std::uint64_t kSuiteSeedBase = 1;

struct Ctx {
  VerifyConfig cfg;
  std::vector<CheckResult> results;
  std::uint64_t herded_violations = 0;

  void add(CheckResult r) { results.push_back(std::move(r)); }
};

std::vector<std::uint64_t> pow2_grid(std::uint32_t lo, std::uint32_t hi) {
  std::vector<std::uint64_t> g;
  for (std::uint32_t p = lo; p <= hi; ++p) g.push_back(std::uint64_t{1} << p);
  return g;
}

// ---------------------------------------------------------------------------
// Scalar moment matching: |ones(T) - T pi| <= 1 for all T in [1, 1e4] over
// 1000 random (pi, w0) pairs with w0 in (pi-1, pi].
void check_scalar_moment_matching(Ctx& ctx) {
  const auto start = Clock::now();
  Xoshiro256StarStar rng(0x5EED5EEDULL);
  constexpr std::uint64_t kPairs = 1000;
  constexpr std::uint64_t kSteps = 10000;

  double worst = 0.0;
  for (std::uint64_t pair = 0; pair < kPairs; ++pair) {
    const double pi = rng.uniform01();
    const double w0 = pi - rng.uniform01();  // (pi-1, pi]
    double w = w0;
    std::uint64_t ones = 0;
    for (std::uint64_t t = 1; t <= kSteps; ++t) {
      const int x = w > 0.0 ? 1 : 0;
      ones += x;
      w += pi - x;
      const double dev =
          std::abs(static_cast<double>(ones) - static_cast<double>(t) * pi);
      if (dev > worst) worst = dev;
    }
  }
  const double secs = seconds_since(start);
  CheckResult r;
  r.name = "scalar_moment_matching";
  r.value = worst;
  r.bound = 1.0;
  r.seconds = secs;
  r.pass = worst <= 1.0 && secs < 5.0;
  r.detail = "1000 pairs, T<=1e4, runtime limit 5s";
  ctx.add(std::move(r));
}

// ---------------------------------------------------------------------------
// Per-key counting bounds on instrumented runs: every window of M updates of
// one key holds ones in [Mp-1, Mp+1], M in {10, 100, 1000}.
double worst_window_deviation(const StepTrace& trace) {
  double worst = 0.0;
  for (const KeySequence& seq : key_sequences(trace)) {
    for (std::uint64_t m : {std::uint64_t{10}, std::uint64_t{100}, std::uint64_t{1000}})
      worst = std::max(worst, max_window_deviation(seq, m));
  }
  return worst;
}

void check_counting_bounds_two_var(Ctx& ctx) {
  const auto start = Clock::now();
  const Model model = make_two_var_model(0.1);
  SamplerOptions opts;
  opts.record_trace = true;
  HerdedSampler sampler(model, {1, 1}, {0, 1}, opts);
  sampler.run(10000);
  ctx.herded_violations += sampler.invariant_violations();

  CheckResult r;
  r.name = "counting_bounds_two_var";
  r.value = worst_window_deviation(sampler.trace());
  r.bound = 1.0;
  r.seconds = seconds_since(start);
  r.pass = r.value <= 1.0 + kCountSlack;
  r.detail = "two-var eps=0.1, 1e4 sweeps, M in {10,100,1000}";
  ctx.add(std::move(r));
}

GridProblem verify_grid_problem(std::uint32_t side, double sigma,
                                std::uint64_t seed_base, std::uint64_t replicate) {
  const GrayImage image = make_synthetic_shape(side, side);
  GridProblem p;
  p.height = image.height;
  p.width = image.width;
  p.truth = binarize(image);
  p.coupling = 1.0;
  p.sigma = sigma;
  p.y = corrupt(p.truth, sigma, noise_seed(seed_base, replicate));
  return p;
}

void check_counting_bounds_grid(Ctx& ctx) {
  const auto start = Clock::now();
  GridProblem small;
  small.height = small.width = 3;
  small.coupling = 1.0;
  small.sigma = 4.0;
  small.truth = {1, 1, -1, 1, 1, -1, -1, -1, -1};  // corner block
  small.y = corrupt(small.truth, small.sigma, noise_seed(kSuiteSeedBase, 0));

  const Model model = build_grid_model(small);
  Assignment x0(9);
  for (std::size_t k = 0; k < 9; ++k) x0[k] = small.y[k] >= 0.0 ? 1 : 0;
  std::vector<VariableId> order(9);
  std::iota(order.begin(), order.end(), 0);

  double worst = 0.0;
  for (WeightMode mode : {WeightMode::kFull, WeightMode::kShared}) {
    SamplerOptions opts;
    opts.mode = mode;
    opts.record_trace = true;
    HerdedSampler sampler(model, x0, order, opts);
    sampler.run(10000);
    ctx.herded_violations += sampler.invariant_violations();
    worst = std::max(worst, worst_window_deviation(sampler.trace()));
  }

  CheckResult r;
  r.name = "counting_bounds_grid3x3";
  r.value = worst;
  r.bound = 1.0;
  r.seconds = seconds_since(start);
  r.pass = worst <= 1.0 + kCountSlack;
  r.detail = "3x3 grid, full+shared keys, 1e4 sweeps, M in {10,100,1000}";
  ctx.add(std::move(r));
}

// ---------------------------------------------------------------------------
// Oracle equivalence on random strictly positive pairwise+unary models.
Model random_positive_model(Xoshiro256StarStar& rng) {
  const auto n = static_cast<std::uint32_t>(2 + rng.next() % 9);  // 2..10
  std::vector<Factor> factors;
  auto entry = [&]() { return std::exp(2.0 * rng.uniform01() - 1.0); };
  for (std::uint32_t i = 0; i < n; ++i)
    factors.push_back(Factor{{i}, {entry(), entry()}});
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (rng.uniform01() < 0.4)
        factors.push_back(Factor{{i, j}, {entry(), entry(), entry(), entry()}});
    }
  }
  return build_model(n, std::move(factors));
}

void check_oracle_equivalence(Ctx& ctx) {
  const auto start = Clock::now();
  Xoshiro256StarStar rng(0x0AC1EULL);
  double worst_cond = 0.0;
  double worst_stationarity = 0.0;

  for (int m = 0; m < 50; ++m) {
    const Model model = random_positive_model(rng);
    const std::uint32_t n = model.num_vars();
    const ExactDistribution joint = enumerate_joint(model);

    Assignment x(n, 0);
    for (std::uint64_t s = 0; s < joint.probs.size(); ++s) {
      for (std::uint32_t i = 0; i < n; ++i) x[i] = (s >> i) & 1;
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        const double p1 = joint.probs[s | bit];
        const double p0 = joint.probs[s & ~bit];
        const double from_joint = p1 / (p0 + p1);
        worst_cond = std::max(
            worst_cond, std::abs(from_joint - full_conditional(model, i, x)));
      }
    }

    std::vector<VariableId> order(n);
    std::iota(order.begin(), order.end(), 0);
    const SweepKernel kernel = sweep_kernel(model, order);
    const ExactDistribution advanced = apply_kernel(joint, kernel);
    for (std::uint64_t s = 0; s < joint.probs.size(); ++s) {
      worst_stationarity =
          std::max(worst_stationarity, std::abs(advanced.probs[s] - joint.probs[s]));
    }
  }

  const double secs = seconds_since(start);
  {
    CheckResult r;
    r.name = "oracle_equivalence_conditionals";
    r.value = worst_cond;
    r.bound = 1e-12;
    r.seconds = secs;
    r.pass = worst_cond <= 1e-12;
    r.detail = "50 random models, N<=10, all (i, state) pairs";
    ctx.add(std::move(r));
  }
  {
    CheckResult r;
    r.name = "oracle_sweep_stationarity";
    r.value = worst_stationarity;
    r.bound = 1e-10;
    r.seconds = secs;
    r.pass = worst_stationarity <= 1e-10;
    r.detail = "pi T = pi, max component error over 50 models";
    ctx.add(std::move(r));
  }
}

// ---------------------------------------------------------------------------
// Fully-connected bound, rate separation, and the tau = 0 log bound share one
// herded record on the two-variable eps = 0.1 model.
struct Toy2Runs {
  Model model = make_two_var_model(0.1);
  ExactDistribution oracle;
  SampleRecord herded;
  Theorem2Constants consts;
};

Toy2Runs make_toy2_runs(Ctx& ctx) {
  Toy2Runs runs;
  runs.oracle = enumerate_joint(runs.model);
  HerdedSampler sampler(runs.model, {1, 1}, {0, 1});
  runs.herded = sampler.run((std::uint64_t{1} << 14) + 32);
  ctx.herded_violations += sampler.invariant_violations();
  runs.consts = theorem2_constants(runs.model, {0, 1});
  return runs;
}

void check_theorem2_bound(Ctx& ctx, const Toy2Runs& runs) {
  const auto start = Clock::now();
  double worst_ratio = 0.0;  // d_v * T / lambda must stay <= 1
  for (std::uint64_t T : pow2_grid(6, 12)) {
    const double tau_real = runs.consts.tau_star_of(static_cast<double>(T));
    const auto tau = static_cast<std::uint64_t>(
        std::max(0.0, std::ceil(tau_real)));
    const double dv =
        tv_distance(empirical_distribution(runs.herded, tau, T), runs.oracle);
    worst_ratio = std::max(worst_ratio, dv * static_cast<double>(T) / runs.consts.lambda);
  }
  const double secs = seconds_since(start);
  CheckResult r;
  r.name = "theorem2_bound";
  r.value = worst_ratio;
  r.bound = 1.0;
  r.seconds = secs;
  r.pass = worst_ratio <= 1.0 && secs < 30.0;
  r.detail = "two-var eps=0.1, d_v(P_T^(ceil tau*), pi) <= lambda/T, T in 2^6..2^12";
  ctx.add(std::move(r));
}

void check_rate_separation(Ctx& ctx, const Toy2Runs& runs) {
  const auto start = Clock::now();
  const std::vector<std::uint64_t> grid = pow2_grid(4, 14);

  const ErrorSeries herded_series = error_series(
      runs.herded, runs.oracle, ErrorMetric::kMarginalAbsError, 0, grid, 0);
  const double herded_slope = convergence_slope(herded_series).slope;

  std::vector<double> gibbs_slopes;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    GibbsConfig gc;
    gc.seed = replicate_seed(kSuiteSeedBase, rep);
    gc.sweeps = grid.back();
    const SampleRecord rec = gibbs_run(runs.model, {1, 1}, gc);
    const ErrorSeries s =
        error_series(rec, runs.oracle, ErrorMetric::kMarginalAbsError, 0, grid, 0);
    gibbs_slopes.push_back(convergence_slope(s).slope);
  }
  std::sort(gibbs_slopes.begin(), gibbs_slopes.end());
  const double gibbs_median =
      0.5 * (gibbs_slopes[4] + gibbs_slopes[5]);

  const double secs = seconds_since(start);
  {
    CheckResult r;
    r.name = "rate_separation_herded_slope";
    r.value = herded_slope;
    r.bound = -0.8;
    r.seconds = secs;
    r.pass = herded_slope <= -0.8 && secs < 60.0;
    r.detail = "envelope slope over T in 2^4..2^14, runtime limit 60s";
    ctx.add(std::move(r));
  }
  {
    CheckResult r;
    r.name = "rate_separation_gibbs_slope";
    r.value = gibbs_median;
    r.bound = -0.3;
    r.seconds = secs;
    r.pass = gibbs_median >= -0.7 && gibbs_median <= -0.3;
    r.detail = "median envelope slope over 10 seeds, must lie in [-0.7, -0.3]";
    ctx.add(std::move(r));
  }
}

void check_corollary1(Ctx& ctx, const Toy2Runs& runs) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t T : pow2_grid(6, 14)) {
    const double dv =
        tv_distance(empirical_distribution(runs.herded, 0, T), runs.oracle);
    worst = std::max(
        worst, static_cast<double>(T) * dv / std::log(static_cast<double>(T)));
  }
  CheckResult r;
  r.name = "corollary1_log_bound";
  r.value = worst;
  r.bound = kCorollary1Bound;
  r.seconds = seconds_since(start);
  r.pass = worst <= kCorollary1Bound;
  r.detail = "max over T in 2^6..2^14 of T d_v(P_T^(0), pi) / ln T";
  ctx.add(std::move(r));
}

// ---------------------------------------------------------------------------
// Empty-graph convergence (Kronecker-Weyl) and weight equidistribution.
void check_theorem1(Ctx& ctx) {
  const auto start = Clock::now();
  const std::vector<double> marginals = {std::sqrt(2.0) - 1.0,
                                         std::sqrt(3.0) - 1.0};
  const Model model = make_independent_model(marginals);
  const ExactDistribution oracle = enumerate_joint(model);
  HerdedSampler sampler(model, {1, 1}, {0, 1});
  const SampleRecord rec = sampler.run(100000);
  ctx.herded_violations += sampler.invariant_violations();
  const double tv =
      tv_distance(empirical_distribution(rec, 0, 100000), oracle);
  {
    CheckResult r;
    r.name = "theorem1_tv";
    r.value = tv;
    r.bound = 0.01;
    r.seconds = seconds_since(start);
    r.pass = tv < 0.01;
    r.detail = "independent (sqrt2-1, sqrt3-1), T=1e5 sweeps, product oracle";
    ctx.add(std::move(r));
  }

  const auto start2 = Clock::now();
  const Model single = make_independent_model({std::sqrt(2.0) - 1.0});
  HerdedSampler tracker(single, {1}, {0});
  DiscrepancySample points;
  for (int k = 0; k < 4096; ++k) {
    tracker.step();
    const double w = torus_coordinate(tracker.weight(0, 0));
    points.add(std::span<const double>(&w, 1));
  }
  ctx.herded_violations += tracker.invariant_violations();
  const double disc = weight_discrepancy(points);
  {
    CheckResult r;
    r.name = "theorem1_weight_discrepancy";
    r.value = disc;
    r.bound = 0.02;
    r.seconds = seconds_since(start2);
    r.pass = disc < 0.02;
    r.detail = "1D weight orbit, pi=sqrt2-1, 4096 points, grid 64";
    ctx.add(std::move(r));
  }
}

// ---------------------------------------------------------------------------
// Denoising trend at desk scale: shared herding vs the stochastic baselines.
void check_denoise_trend(Ctx& ctx) {
  const auto start = Clock::now();
  constexpr std::uint32_t kSide = 32;
  constexpr std::uint64_t kSweeps = 30;
  constexpr std::uint32_t kSeeds = 10;

  auto mean_error = [&](double sigma, DenoiseMethod method, double damping) {
    double total = 0.0;
    for (std::uint32_t rep = 0; rep < kSeeds; ++rep) {
      GridProblem p = verify_grid_problem(kSide, sigma, kSuiteSeedBase, rep);
      DenoiseConfig dc;
      dc.method = method;
      dc.sweeps = kSweeps;
      dc.damping = damping;
      dc.seed = sampler_seed(kSuiteSeedBase, rep);
      const DenoiseResult result = denoise(p, dc);
      ctx.herded_violations += result.invariant_violations;
      total += result.error_series.back().mse;
    }
    return total / kSeeds;
  };

  const double shared4 = mean_error(4.0, DenoiseMethod::kHerdedShared, 0.0);
  const double gibbs4 = mean_error(4.0, DenoiseMethod::kGibbs, 0.0);
  const double shared8 = mean_error(8.0, DenoiseMethod::kHerdedShared, 0.0);
  const double mf8 = mean_error(8.0, DenoiseMethod::kMeanField, 0.5);
  const double secs = seconds_since(start);

  {
    CheckResult r;
    r.name = "denoise_sigma4_shared_vs_gibbs";
    r.value = shared4;
    r.bound = gibbs4;
    r.seconds = secs;
    r.pass = shared4 <= gibbs4 && secs < 120.0;
    r.detail = "32x32 synthetic, J=1, 30 sweeps, 10 noise seeds, runtime limit 120s";
    ctx.add(std::move(r));
  }
  {
    CheckResult r;
    r.name = "denoise_sigma8_shared_vs_meanfield";
    r.value = shared8;
    r.bound = mf8;
    r.seconds = secs;
    r.pass = shared8 <= mf8;
    r.detail = "mean MSE herded-shared vs mean field D=0.5 at sigma=8";
    ctx.add(std::move(r));
  }
}

// ---------------------------------------------------------------------------
// Byte determinism of the experiment commands across reruns and thread counts.
std::uint64_t count_tree_differences(const std::filesystem::path& a,
                                     const std::filesystem::path& b) {
  namespace fs = std::filesystem;
  auto listing = [](const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  auto read_all = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  const auto fa = listing(a);
  const auto fb = listing(b);
  std::uint64_t diffs = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < fa.size() || ib < fb.size()) {
    if (ia < fa.size() && ib < fb.size() && fa[ia] == fb[ib]) {
      if (read_all(a / fa[ia]) != read_all(b / fb[ib])) ++diffs;
      ++ia;
      ++ib;
    } else if (ib >= fb.size() || (ia < fa.size() && fa[ia] < fb[ib])) {
      ++diffs;
      ++ia;
    } else {
      ++diffs;
      ++ib;
    }
  }
  return diffs;
}

void check_determinism(Ctx& ctx) {
  namespace fs = std::filesystem;
  const fs::path base = ctx.cfg.global.out_dir / "determinism";

  {
    const auto start = Clock::now();
    auto run_into = [&](const fs::path& dir, unsigned threads) {
      Toy2Config t2;
      t2.global.out_dir = dir;
      t2.global.threads = threads;
      t2.global.seed = ctx.cfg.global.seed;
      run_toy2(t2);
    };
    run_into(base / "toy2_a", 1);
    run_into(base / "toy2_b", 1);
    run_into(base / "toy2_c", 8);
    const std::uint64_t diffs = count_tree_differences(base / "toy2_a", base / "toy2_b") +
                                count_tree_differences(base / "toy2_a", base / "toy2_c");
    CheckResult r;
    r.name = "determinism_toy2";
    r.value = static_cast<double>(diffs);
    r.bound = 0.0;
    r.seconds = seconds_since(start);
    r.pass = diffs == 0;
    r.detail = "byte-identical outputs: rerun and threads 1 vs 8";
    ctx.add(std::move(r));
  }
  {
    const auto start = Clock::now();
    auto run_into = [&](const fs::path& dir, unsigned threads) {
      DenoiseExpConfig dn;
      dn.global.out_dir = dir;
      dn.global.threads = threads;
      dn.global.seed = ctx.cfg.global.seed;
      dn.image = "synthetic";
      dn.sigmas = {4.0};
      dn.methods = {"herded", "herded-shared"};
      run_denoise(dn);
    };
    run_into(base / "denoise_a", 1);
    run_into(base / "denoise_b", 1);
    run_into(base / "denoise_c", 8);
    const std::uint64_t diffs =
        count_tree_differences(base / "denoise_a", base / "denoise_b") +
        count_tree_differences(base / "denoise_a", base / "denoise_c");
    CheckResult r;
    r.name = "determinism_denoise";
    r.value = static_cast<double>(diffs);
    r.bound = 0.0;
    r.seconds = seconds_since(start);
    r.pass = diffs == 0;
    r.detail = "herded denoise outputs: rerun and threads 1 vs 8";
    ctx.add(std::move(r));
  }
}

void check_invariant_interval(Ctx& ctx) {
  CheckResult r;
  r.name = "invariant_interval";
  r.value = static_cast<double>(ctx.herded_violations);
  r.bound = 0.0;
  r.pass = ctx.herded_violations == 0;
  r.detail = "weight in (p-1, p] after every update, all herded runs in suite";
  ctx.add(std::move(r));
}

}  // namespace

std::vector<CheckResult> run_acceptance_checks(const VerifyConfig& cfg) {
  Ctx ctx;
  ctx.cfg = cfg;

  check_scalar_moment_matching(ctx);
  check_counting_bounds_two_var(ctx);
  check_counting_bounds_grid(ctx);
  check_oracle_equivalence(ctx);

  const Toy2Runs runs = make_toy2_runs(ctx);
  check_theorem2_bound(ctx, runs);
  check_rate_separation(ctx, runs);
  check_corollary1(ctx, runs);

  check_theorem1(ctx);
  check_denoise_trend(ctx);
  check_determinism(ctx);
  check_invariant_interval(ctx);
  return ctx.results;
}

std::string check_results_csv(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  out << "check,status,value,bound\n";
  for (const CheckResult& r : results) {
    out << r.name << ',' << (r.pass ? "pass" : "fail") << ','
        << format_double(r.value) << ',' << format_double(r.bound) << "\n";
  }
  return out.str();
}

int run_verify_and_report(const VerifyConfig& cfg, std::ostream& out) {
  const std::vector<CheckResult> results = run_acceptance_checks(cfg);
  bool all_pass = true;
  for (const CheckResult& r : results) {
    all_pass = all_pass && r.pass;
    char line[256];
    std::snprintf(line, sizeof(line), "[%s] %-36s value=%-12.6g bound=%-12.6g (%.2fs)",
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value, r.bound,
                  r.seconds);
    out << line << "  " << r.detail << "\n";
  }
  out << (all_pass ? "all checks passed" : "CHECK FAILURES PRESENT") << " ("
      << results.size() << " checks)\n";
  atomic_write(cfg.global.out_dir / "verify_results.csv",
               check_results_csv(results));
  return all_pass ? 0 : 1;
}

}  // namespace herdgibbs
