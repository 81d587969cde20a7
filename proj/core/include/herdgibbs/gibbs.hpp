#ifndef HERDGIBBS_GIBBS_HPP
#define HERDGIBBS_GIBBS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "herdgibbs/herded.hpp"
#include "herdgibbs/model.hpp"

namespace herdgibbs {

struct AnnealSchedule {
  double temp_start = 10.0;
  double temp_end = 1.0;
};

struct GibbsConfig {
  std::uint64_t seed = 0;
  std::vector<VariableId> scan_order;  // empty means ascending
  std::uint64_t sweeps = 1;
  std::optional<AnnealSchedule> anneal;
};

// Linear interpolation between temp_start and temp_end over sweeps k in
// [0, K); endpoints exact. Requires K >= 2.
double anneal_schedule(std::uint64_t k, std::uint64_t K, double temp_start,
                       double temp_end);

// Systematic-scan stochastic Gibbs. Each step draws X_i ~ Bernoulli(p_beta)
// with p_beta = p^beta / (p^beta + (1-p)^beta), beta the inverse temperature
// of the current sweep (1 without annealing). Uniform deviates come from
// the documented xoshiro256** stream seeded with cfg.seed; x = 1 iff u < p.
// Identical seeds give bit-identical records.
SampleRecord gibbs_run(const Model& model, Assignment x0, const GibbsConfig& cfg);

}  // namespace herdgibbs

#endif  // HERDGIBBS_GIBBS_HPP
