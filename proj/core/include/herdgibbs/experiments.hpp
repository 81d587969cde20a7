#ifndef HERDGIBBS_EXPERIMENTS_HPP
#define HERDGIBBS_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "herdgibbs/ising.hpp"

namespace herdgibbs {

// Shared experiment settings. Replicates run in parallel over `threads`
// workers; outputs are aggregated in replicate order and written atomically,
// so results do not depend on the thread count.
struct GlobalConfig {
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

// Runs worker(i) for i in [0, count) across the given number of threads
// (0 means hardware concurrency). Rethrows the first worker exception.
void parallel_for(unsigned threads, std::size_t count,
                  const std::function<void(std::size_t)>& worker);

// Flat key-value config file: one "key = value" (or "key value") per line,
// '#' comments. Returned map feeds the per-subcommand configs; command-line
// flags override file values which override defaults.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Herded Gibbs and replicated stochastic Gibbs on the two-variable model for
// each epsilon; emits marginal/TV error series, envelope slopes, and the
// convergence-bound constants.
struct Toy2Config {
  GlobalConfig global;
  std::vector<double> epsilons = {0.1, 0.01, 0.001, 0.0001};
  std::uint32_t t_min_pow = 4;   // T grid: powers of two
  std::uint32_t t_max_pow = 14;
  std::uint32_t gibbs_replicates = 10;
  std::uint32_t marginal_var = 0;
  std::uint64_t tau = 0;
};
void run_toy2(const Toy2Config& cfg);

// Herded Gibbs on a model of independent variables: joint TV series against
// the product oracle, weight-orbit star discrepancy, and the
// rational-marginals control with aligned weights.
struct EmptyConfig {
  GlobalConfig global;
  std::vector<double> marginals;  // empty means (sqrt(2)-1, sqrt(3)-1)
  std::uint64_t sweeps = 100000;
  std::uint64_t discrepancy_points = 4096;
  std::uint32_t t_min_pow = 4;
};
void run_empty(const EmptyConfig& cfg);

// Denoising sweep over noise levels and methods with replicated corruptions;
// emits the per-method summary, error series, and denoised images.
struct DenoiseExpConfig {
  GlobalConfig global;
  std::string image;  // PGM path, or "synthetic" for the built-in 32x32 shape
  std::uint32_t synthetic_size = 32;
  double coupling = 1.0;
  std::vector<double> sigmas = {2.0, 4.0, 6.0, 8.0};
  double mu_plus = 3.0;
  double mu_minus = -3.0;
  std::uint64_t sweeps = 30;
  std::uint32_t seeds_count = 10;
  std::uint16_t threshold = 128;
  std::uint64_t burn_in = 0;
  // method tags: herded, herded-shared, gibbs, annealed-gibbs, mf<D>
  std::vector<std::string> methods = {"herded", "herded-shared", "gibbs",
                                      "mf0.5", "mf1"};
};
void run_denoise(const DenoiseExpConfig& cfg);

// Parses a method tag into backend + damping. Throws on unknown tags.
std::pair<DenoiseMethod, double> parse_method_tag(const std::string& tag);

// Noise / sampler seeds for replicate r, both derived from the base seed:
// corruption uses SplitMix64 output 2r+1, the sampler output 2r+2.
std::uint64_t noise_seed(std::uint64_t base, std::uint64_t replicate);
std::uint64_t sampler_seed(std::uint64_t base, std::uint64_t replicate);

// Loads the experiment image: a PGM path or the built-in synthetic shape.
GrayImage load_experiment_image(const DenoiseExpConfig& cfg);

}  // namespace herdgibbs

#endif  // HERDGIBBS_EXPERIMENTS_HPP
