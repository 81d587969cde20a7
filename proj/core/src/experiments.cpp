#include "herdgibbs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "herdgibbs/diagnostics.hpp"
#include "herdgibbs/gibbs.hpp"
#include "herdgibbs/io.hpp"
#include "herdgibbs/oracle.hpp"
#include "herdgibbs/rng.hpp"

namespace herdgibbs {

void parallel_for(unsigned threads, std::size_t count,
                  const std::function<void(std::size_t)>& worker) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) worker(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto body = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        worker(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::map<std::string, std::string> parse_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path.string() + "'");

  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };

  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    std::string key, value;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else {
      const auto sp = line.find_first_of(" \t");
      if (sp == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected 'key = value'");
      key = trim(line.substr(0, sp));
      value = trim(line.substr(sp + 1));
    }
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    out[key] = value;
  }
  return out;
}

std::uint64_t noise_seed(std::uint64_t base, std::uint64_t replicate) {
  return replicate_seed(base, 2 * replicate);
}

std::uint64_t sampler_seed(std::uint64_t base, std::uint64_t replicate) {
  return replicate_seed(base, 2 * replicate + 1);
}

namespace {

std::vector<std::uint64_t> power_grid(std::uint32_t min_pow, std::uint32_t max_pow) {
  if (min_pow >= max_pow || max_pow > 30)
    throw std::invalid_argument("bad T grid powers");
  std::vector<std::uint64_t> grid;
  for (std::uint32_t p = min_pow; p <= max_pow; ++p)
    grid.push_back(std::uint64_t{1} << p);
  return grid;
}

std::string format_eps(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  return buf;
}

struct SeriesStats {
  std::vector<double> mean, stdev, median;
};

// Column statistics over replicate error series sharing one T grid.
SeriesStats aggregate_series(const std::vector<ErrorSeries>& series) {
  SeriesStats stats;
  if (series.empty()) return stats;
  const std::size_t cols = series.front().points.size();
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> vals;
    vals.reserve(series.size());
    for (const ErrorSeries& s : series) vals.push_back(s.points[c].second);
    const double mean =
        std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / (vals.size() - 1) : 0.0;
    std::sort(vals.begin(), vals.end());
    const std::size_t mid = vals.size() / 2;
    const double median = vals.size() % 2 ? vals[mid]
                                          : 0.5 * (vals[mid - 1] + vals[mid]);
    stats.mean.push_back(mean);
    stats.stdev.push_back(std::sqrt(var));
    stats.median.push_back(median);
  }
  return stats;
}

std::string aggregate_csv(const std::vector<std::uint64_t>& grid,
                          const SeriesStats& stats) {
  std::ostringstream out;
  out << "T,mean_error,std_error,median_error\n";
  for (std::size_t c = 0; c < grid.size(); ++c) {
    out << grid[c] << ',' << format_double(stats.mean[c]) << ','
        << format_double(stats.stdev[c]) << ',' << format_double(stats.median[c])
        << "\n";
  }
  return out.str();
}

double median_of(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  const std::size_t mid = vals.size() / 2;
  return vals.size() % 2 ? vals[mid] : 0.5 * (vals[mid - 1] + vals[mid]);
}

// Slope line for the report; short grids can be unfittable.
std::string slope_or_reason(const ErrorSeries& series) {
  try {
    const SlopeFit fit = convergence_slope(series);
    std::ostringstream out;
    out << format_double(fit.slope) << " (points " << fit.n_points
        << ", excluded " << fit.n_excluded << ")";
    return out.str();
  } catch (const std::invalid_argument& e) {
    return std::string("n/a (") + e.what() + ")";
  }
}

}  // namespace

void run_toy2(const Toy2Config& cfg) {
  for (double eps : cfg.epsilons) {
    if (!(eps > 0.0 && eps < 0.25))
      throw std::invalid_argument("toy2: epsilon must lie in (0, 1/4)");
  }
  if (cfg.gibbs_replicates == 0)
    throw std::invalid_argument("toy2: need >= 1 Gibbs replicate");
  if (cfg.marginal_var > 1)
    throw std::invalid_argument("toy2: marginal variable must be 0 or 1");

  const std::vector<std::uint64_t> grid = power_grid(cfg.t_min_pow, cfg.t_max_pow);
  const std::uint64_t sweeps = grid.back() + cfg.tau;
  const std::filesystem::path out = cfg.global.out_dir;

  std::ostringstream report;
  report << "# toy2 report\n"
         << "t_grid powers of two, 2^" << cfg.t_min_pow << " .. 2^" << cfg.t_max_pow
         << "\n"
         << "tau " << cfg.tau << "\n"
         << "gibbs_replicates " << cfg.gibbs_replicates << "\n"
         << "marginal_var " << cfg.marginal_var << "\n";

  for (double eps : cfg.epsilons) {
    const std::string tag = "toy2_eps" + format_eps(eps);
    const Model model = make_two_var_model(eps);
    const ExactDistribution oracle = enumerate_joint(model);
    const Assignment x0 = {1, 1};
    const std::vector<VariableId> order = {0, 1};

    HerdedSampler herded(model, x0, order);
    const SampleRecord herded_rec = herded.run(sweeps);
    const ErrorSeries herded_marginal =
        error_series(herded_rec, oracle, ErrorMetric::kMarginalAbsError, cfg.tau,
                     grid, cfg.marginal_var);
    const ErrorSeries herded_tv = error_series(
        herded_rec, oracle, ErrorMetric::kTvJoint, cfg.tau, grid, cfg.marginal_var);
    atomic_write(out / (tag + "_herded_marginal.csv"),
                 error_series_csv(herded_marginal));
    atomic_write(out / (tag + "_herded_tv.csv"), error_series_csv(herded_tv));

    std::vector<ErrorSeries> gibbs_marginals(cfg.gibbs_replicates);
    std::vector<ErrorSeries> gibbs_tvs(cfg.gibbs_replicates);
    parallel_for(cfg.global.threads, cfg.gibbs_replicates, [&](std::size_t r) {
      GibbsConfig gc;
      gc.seed = replicate_seed(cfg.global.seed, r);
      gc.sweeps = sweeps;
      const SampleRecord rec = gibbs_run(model, x0, gc);
      gibbs_marginals[r] = error_series(rec, oracle, ErrorMetric::kMarginalAbsError,
                                        cfg.tau, grid, cfg.marginal_var);
      gibbs_tvs[r] =
          error_series(rec, oracle, ErrorMetric::kTvJoint, cfg.tau, grid);
    });
    atomic_write(out / (tag + "_gibbs_marginal.csv"),
                 aggregate_csv(grid, aggregate_series(gibbs_marginals)));
    atomic_write(out / (tag + "_gibbs_tv.csv"),
                 aggregate_csv(grid, aggregate_series(gibbs_tvs)));

    std::vector<double> gibbs_slopes;
    for (const ErrorSeries& s : gibbs_marginals) {
      try {
        gibbs_slopes.push_back(convergence_slope(s).slope);
      } catch (const std::invalid_argument&) {
      }
    }
    const std::string gibbs_median_slope =
        gibbs_slopes.empty() ? "n/a (no fittable replicate)"
                             : format_double(median_of(gibbs_slopes));

    const Theorem2Constants consts = theorem2_constants(model, order);

    report << "epsilon " << format_eps(eps) << "\n"
           << "  herded_marginal_slope " << slope_or_reason(herded_marginal)
           << "\n"
           << "  herded_tv_slope " << slope_or_reason(herded_tv) << "\n"
           << "  gibbs_marginal_slope_median " << gibbs_median_slope << "\n"
           << "  theorem2 pi_min=" << format_double(consts.pi_min)
           << " l=" << format_double(consts.l) << " B=" << format_double(consts.B)
           << " eta=" << format_double(consts.eta)
           << " lambda=" << format_double(consts.lambda)
           << " T_star=" << format_double(consts.T_star) << "\n";
  }
  atomic_write(out / "toy2_report.txt", report.str());
}

void run_empty(const EmptyConfig& cfg) {
  std::vector<double> marginals = cfg.marginals;
  if (marginals.empty())
    marginals = {std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0};
  for (double p : marginals) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("empty: marginals must lie strictly in (0, 1)");
  }
  if (cfg.sweeps < 2) throw std::invalid_argument("empty: need >= 2 sweeps");
  const std::filesystem::path out = cfg.global.out_dir;
  const auto n = static_cast<std::uint32_t>(marginals.size());

  const Model model = make_independent_model(marginals);
  const ExactDistribution oracle = enumerate_joint(model);
  std::vector<VariableId> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Assignment x0(n, 1);

  // TV series against the product oracle on a power-of-two grid up to sweeps.
  HerdedSampler herded(model, x0, order);
  const SampleRecord rec = herded.run(cfg.sweeps);
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = std::uint64_t{1} << cfg.t_min_pow; t < cfg.sweeps; t *= 2)
    grid.push_back(t);
  grid.push_back(cfg.sweeps);
  const ErrorSeries tv =
      error_series(rec, oracle, ErrorMetric::kTvJoint, 0, grid);
  atomic_write(out / "empty_tv.csv", error_series_csv(tv));

  // Weight-orbit discrepancy, per coordinate and (when dim <= 3) joint.
  std::ostringstream report;
  report << "# empty-graph report\n";
  report << "marginals";
  for (double p : marginals) report << ' ' << format_double(p);
  report << "\nsweeps " << cfg.sweeps << "\n";
  report << "final_tv " << format_double(tv.points.back().second) << "\n";

  {
    std::vector<DiscrepancySample> per_coord(n);
    DiscrepancySample joint;
    HerdedSampler tracker(model, x0, order);
    for (std::uint64_t k = 0; k < cfg.discrepancy_points; ++k) {
      for (std::uint32_t s = 0; s < n; ++s) tracker.step();
      std::vector<double> point(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        point[i] = torus_coordinate(tracker.weight(i, 0));
        per_coord[i].add(std::span<const double>(&point[i], 1));
      }
      if (n <= 3) joint.add(point);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      report << "discrepancy_1d_var" << i << " "
             << format_double(weight_discrepancy(per_coord[i])) << "\n";
    }
    if (n <= 3)
      report << "discrepancy_joint " << format_double(weight_discrepancy(joint))
             << "\n";
  }

  // Rational-marginals control: pi = (1/2, 1/2) with both weights started at
  // the same value gives a degenerate torus orbit; TV stalls well above 0.
  {
    const Model control = make_independent_model({0.5, 0.5});
    const ExactDistribution control_oracle = enumerate_joint(control);
    SamplerOptions opts;
    opts.init = explicit_init(0.25);
    HerdedSampler aligned(control, {1, 1}, {0, 1}, opts);
    const SampleRecord crec = aligned.run(cfg.sweeps);
    const ErrorSeries ctv =
        error_series(crec, control_oracle, ErrorMetric::kTvJoint, 0, grid);
    atomic_write(out / "empty_rational_tv.csv", error_series_csv(ctv));
    report << "rational_control_final_tv "
           << format_double(ctv.points.back().second) << "\n";
  }

  atomic_write(out / "empty_report.txt", report.str());
}

std::pair<DenoiseMethod, double> parse_method_tag(const std::string& tag) {
  if (tag == "herded") return {DenoiseMethod::kHerdedFull, 0.0};
  if (tag == "herded-shared") return {DenoiseMethod::kHerdedShared, 0.0};
  if (tag == "gibbs") return {DenoiseMethod::kGibbs, 0.0};
  if (tag == "annealed-gibbs") return {DenoiseMethod::kAnnealedGibbs, 0.0};
  if (tag.rfind("mf", 0) == 0) {
    std::size_t pos = 0;
    double d = 0.0;
    const std::string num = tag.substr(2);
    try {
      d = std::stod(num, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown method tag '" + tag + "'");
    }
    if (pos != num.size() || !(d > 0.0 && d <= 1.0))
      throw std::invalid_argument("bad mean-field damping in tag '" + tag + "'");
    return {DenoiseMethod::kMeanField, d};
  }
  throw std::invalid_argument("unknown method tag '" + tag + "'");
}

GrayImage load_experiment_image(const DenoiseExpConfig& cfg) {
  if (cfg.image.empty())
    throw std::invalid_argument("denoise: missing image (path or 'synthetic')");
  if (cfg.image == "synthetic")
    return make_synthetic_shape(cfg.synthetic_size, cfg.synthetic_size);
  return read_pgm(cfg.image);
}

void run_denoise(const DenoiseExpConfig& cfg) {
  if (cfg.sigmas.empty()) throw std::invalid_argument("denoise: no sigmas given");
  for (double s : cfg.sigmas) {
    if (!(s > 0.0)) throw std::invalid_argument("denoise: sigma must be > 0");
  }
  if (cfg.seeds_count == 0) throw std::invalid_argument("denoise: seeds_count >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("denoise: no methods given");

  const GrayImage image = load_experiment_image(cfg);
  const std::vector<std::int8_t> truth = binarize(image, cfg.threshold);
  const std::filesystem::path out = cfg.global.out_dir;
  atomic_write(out / "truth.pgm", [&] {
    std::ostringstream os;
    write_pgm(spins_to_image(truth, image.height, image.width), os);
    return os.str();
  }());

  struct Task {
    std::size_t sigma_idx, method_idx, replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si)
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
      for (std::uint32_t r = 0; r < cfg.seeds_count; ++r)
        tasks.push_back(Task{si, mi, r});

  // results[sigma][method][replicate]
  std::vector<std::vector<std::vector<DenoiseResult>>> results(
      cfg.sigmas.size(),
      std::vector<std::vector<DenoiseResult>>(
          cfg.methods.size(), std::vector<DenoiseResult>(cfg.seeds_count)));

  parallel_for(cfg.global.threads, tasks.size(), [&](std::size_t k) {
    const Task& task = tasks[k];
    const double sigma = cfg.sigmas[task.sigma_idx];
    const auto [method, damping] = parse_method_tag(cfg.methods[task.method_idx]);

    GridProblem problem;
    problem.height = image.height;
    problem.width = image.width;
    problem.truth = truth;
    problem.coupling = cfg.coupling;
    problem.mu_plus = cfg.mu_plus;
    problem.mu_minus = cfg.mu_minus;
    problem.sigma = sigma;
    problem.y = corrupt(truth, sigma, noise_seed(cfg.global.seed, task.replicate),
                        cfg.mu_minus, cfg.mu_plus);

    DenoiseConfig dc;
    dc.method = method;
    dc.sweeps = cfg.sweeps;
    dc.damping = damping;
    dc.seed = sampler_seed(cfg.global.seed, task.replicate);
    dc.burn_in = cfg.burn_in;
    results[task.sigma_idx][task.method_idx][task.replicate] =
        denoise(problem, dc);
  });

  std::ostringstream summary;
  summary << "method,sigma,mean_mse,std_mse\n";
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
      const auto& reps = results[si][mi];
      double mean = 0.0;
      for (const DenoiseResult& r : reps) mean += r.error_series.back().mse;
      mean /= reps.size();
      double var = 0.0;
      for (const DenoiseResult& r : reps) {
        const double d = r.error_series.back().mse - mean;
        var += d * d;
      }
      var = reps.size() > 1 ? var / (reps.size() - 1) : 0.0;
      summary << reps.front().method_tag << ',' << format_eps(cfg.sigmas[si])
              << ',' << format_double(mean) << ',' << format_double(std::sqrt(var))
              << "\n";

      // replicate-0 artifacts: error series and the denoised image
      const std::string stem =
          "denoise_" + reps.front().method_tag + "_sigma" + format_eps(cfg.sigmas[si]);
      std::ostringstream series;
      series << "sweep,mse,mislabel_frac\n";
      for (std::size_t k = 0; k < reps.front().error_series.size(); ++k) {
        series << (k + 1) << ',' << format_double(reps.front().error_series[k].mse)
               << ',' << format_double(reps.front().error_series[k].mislabel_frac)
               << "\n";
      }
      atomic_write(out / (stem + "_series.csv"), series.str());
      std::ostringstream img;
      write_pgm(spins_to_image(reps.front().estimate, image.height, image.width),
                img);
      atomic_write(out / (stem + ".pgm"), img.str());
    }
  }
  atomic_write(out / "denoise_summary.csv", summary.str());
}

}  // namespace herdgibbs
