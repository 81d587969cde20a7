#ifndef HERDGIBBS_MEAN_FIELD_HPP
#define HERDGIBBS_MEAN_FIELD_HPP

#include <cstdint>
#include <vector>

#include "herdgibbs/model.hpp"

namespace herdgibbs {

struct MeanFieldConfig {
  double damping = 1.0;  // D in (0, 1]; 1 is undamped coordinate ascent
  std::uint64_t iterations = 1;
  std::vector<double> init;            // per-variable q_i; empty means 0.5
  std::vector<VariableId> scan_order;  // empty means ascending
};

struct MeanFieldResult {
  std::vector<double> marginals;                // q after the last sweep
  std::vector<std::vector<double>> trajectory;  // q after each sweep
};

// Damped coordinate-ascent mean field under the fully factorized family.
// Full update: q_i* = sigmoid(E_Q[log u1(x) - log u0(x)]) where u_v
// multiplies the entries of factors touching i with X_i = v and the
// expectation is over Q on the other scope variables. Damped write:
// q_i <- (1 - D) q_i + D q_i*. Requires strictly positive factor tables.
MeanFieldResult mean_field_run(const Model& model, const MeanFieldConfig& cfg);

// Variational objective the coordinate ascent climbs: sum of per-variable
// entropies plus E_Q[log of the unnormalized joint]. Non-decreasing across
// sweeps when D = 1.
double mean_field_free_energy(const Model& model, const std::vector<double>& q);

}  // namespace herdgibbs

#endif  // HERDGIBBS_MEAN_FIELD_HPP
