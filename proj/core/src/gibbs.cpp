#include "herdgibbs/gibbs.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "herdgibbs/rng.hpp"

namespace herdgibbs {

double anneal_schedule(std::uint64_t k, std::uint64_t K, double temp_start,
                       double temp_end) {
  if (K < 2) throw std::invalid_argument("anneal_schedule: need K >= 2");
  if (k >= K) throw std::invalid_argument("anneal_schedule: k out of range");
  if (!(temp_start > 0.0) || !(temp_end > 0.0))
    throw std::invalid_argument("anneal_schedule: temperatures must be positive");
  return temp_start + (temp_end - temp_start) *
                          (static_cast<double>(k) / static_cast<double>(K - 1));
}

SampleRecord gibbs_run(const Model& model, Assignment x0, const GibbsConfig& cfg) {
  const std::uint32_t n = model.num_vars();
  if (cfg.sweeps == 0) throw std::invalid_argument("gibbs_run: need >= 1 sweep");
  if (x0.size() != n) throw std::invalid_argument("gibbs_run: x0 length mismatch");
  if (!in_support(model, x0))
    throw std::invalid_argument("gibbs_run: x0 lies outside the support");

  std::vector<VariableId> order = cfg.scan_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  if (order.size() != n)
    throw std::invalid_argument("gibbs_run: scan order length mismatch");

  Xoshiro256StarStar rng(cfg.seed);
  Assignment x = std::move(x0);

  SampleRecord rec;
  rec.num_vars = n;
  rec.scan_order = order;
  rec.sweeps.reserve(cfg.sweeps);

  for (std::uint64_t k = 0; k < cfg.sweeps; ++k) {
    double beta = 1.0;
    if (cfg.anneal) {
      const double temp = anneal_schedule(k, cfg.sweeps, cfg.anneal->temp_start,
                                          cfg.anneal->temp_end);
      beta = 1.0 / temp;
    }
    for (VariableId i : order) {
      double p = full_conditional(model, i, x);
      if (beta != 1.0) {
        const double a = std::pow(p, beta);
        const double b = std::pow(1.0 - p, beta);
        p = a / (a + b);
      }
      x[i] = rng.uniform01() < p ? 1 : 0;
    }
    rec.sweeps.push_back(x);
  }
  return rec;
}

}  // namespace herdgibbs
