#ifndef HERDGIBBS_HERDED_HPP
#define HERDGIBBS_HERDED_HPP

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "herdgibbs/model.hpp"

namespace herdgibbs {

// Scalar herding for a single Bernoulli probability: emit x = 1 iff w > 0,
// then w += pi - x. Returns the emitted sequence; the final weight lands in
// *w_final when given. w0 outside (pi-1, pi] is allowed (transient phase).
std::vector<std::uint8_t> herd_scalar(double pi, double w0, std::uint64_t steps,
                                      double* w_final = nullptr);

// How herding weights are keyed: by the full bit pattern of the blanket, or
// by the sum of blanket bits (valid only for models declaring that the sum
// is a sufficient statistic of the conditional).
enum class WeightMode { kFull, kShared };

// Produces the initial weight for a key on first touch, given the key's
// conditional p. The result must lie strictly inside (p-1, p); the sampler
// rejects rules that step outside.
using WeightInitRule = std::function<double(double p)>;

// Midpoint of the mandated interval: w0 = p - 0.5.
WeightInitRule midpoint_init();

// The same constant for every key; the sampler validates it lies in (p-1, p)
// for the conditional of each key it touches.
WeightInitRule explicit_init(double value);

// One record per sampler step, emitted when tracing is on.
struct StepRecord {
  std::uint64_t t;
  VariableId var;
  std::uint64_t blanket_code;
  double w_before;
  double p;
  std::uint8_t x;
};

// Full step trace: the initial assignment plus every step in order. Enough
// to reconstruct the complete state trajectory.
struct StepTrace {
  Assignment x0;
  std::vector<StepRecord> steps;
};

// End-of-sweep assignments X^(kN); sweeps[k] is the state after sweep k+1.
struct SampleRecord {
  std::uint32_t num_vars = 0;
  std::vector<VariableId> scan_order;
  std::vector<Assignment> sweeps;
};

struct SamplerOptions {
  WeightMode mode = WeightMode::kFull;
  WeightInitRule init = midpoint_init();
  // Kahan-compensated weight accumulation for very long runs (> 1e7 updates
  // of a single key). Plain summation is the documented default.
  bool compensated_sum = false;
  bool record_trace = false;
};

// The deterministic herded Gibbs state machine: state (X, W), one weight per
// (variable, blanket key), materialized lazily on first touch. Strictly
// single-threaded; may be moved between threads, never shared.
class HerdedSampler {
 public:
  // x0 must lie in the support; scan_order must be a permutation of [0, N).
  // Shared mode requires model.sum_sufficient().
  HerdedSampler(const Model& model, Assignment x0,
                std::vector<VariableId> scan_order, SamplerOptions options = {});

  // One variable update (Algorithm steps 2-5). Returns the emitted value.
  std::uint8_t step();

  // Runs sweeps * N steps, recording the assignment at the end of each sweep.
  // Fully deterministic: identical inputs give bit-identical records.
  SampleRecord run(std::uint64_t sweeps);

  // Blanket key code for variable i under the current assignment: the bit
  // pattern of the blanket in ascending neighbor order (full mode) or the
  // sum of blanket bits (shared mode).
  std::uint64_t weight_key(VariableId i) const;

  const Assignment& x() const { return x_; }
  std::uint64_t t() const { return t_; }
  const std::vector<VariableId>& scan_order() const { return scan_order_; }

  // Number of weights materialized so far, in total or for one variable.
  std::size_t weight_count() const;
  std::size_t weight_count(VariableId i) const { return weights_.at(i).size(); }

  // Post-update weights outside (p - 1, p] within a 1e-12 floating-point
  // guard; stays zero for a correct update rule.
  std::uint64_t invariant_violations() const { return invariant_violations_; }

  // Current weight for a key, or the init rule's value if untouched.
  bool has_weight(VariableId i, std::uint64_t code) const;
  double weight(VariableId i, std::uint64_t code) const;

  const StepTrace& trace() const { return trace_; }

 private:
  struct WeightCell {
    double w = 0.0;
    double comp = 0.0;  // Kahan compensation term
  };

  const Model* model_;
  Assignment x_;
  std::vector<VariableId> scan_order_;
  SamplerOptions options_;
  std::uint64_t t_ = 0;
  std::vector<std::unordered_map<std::uint64_t, WeightCell>> weights_;  // per var
  std::uint64_t invariant_violations_ = 0;
  StepTrace trace_;
};

}  // namespace herdgibbs

#endif  // HERDGIBBS_HERDED_HPP
