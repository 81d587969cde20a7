#include "herdgibbs/herded.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace herdgibbs {

// Floating-point guard for the invariant-interval test (p-1, p]. The update
// w += p - x keeps the exact value inside the interval; two roundings per
// step can graze the boundary by a few ulp, never by 1e-12.
static constexpr double kInvariantSlack = 1e-12;

#ifdef HERDGIBBS_TAMPER_WEIGHT_UPDATE
// Mutation-control build: bias every weight update so the Lemma-1 interval
// check must trip. Never defined in normal builds.
static constexpr double kTamperBias = 5e-3;
#endif

std::vector<std::uint8_t> herd_scalar(double pi, double w0, std::uint64_t steps,
                                      double* w_final) {
  if (!(pi >= 0.0 && pi <= 1.0))
    throw std::invalid_argument("herd_scalar: probability outside [0, 1]");
  if (steps == 0) throw std::invalid_argument("herd_scalar: need at least one step");

  std::vector<std::uint8_t> out(steps);
  double w = w0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const std::uint8_t x = w > 0.0 ? 1 : 0;
    out[t] = x;
    w += pi - x;
  }
  if (w_final) *w_final = w;
  return out;
}

WeightInitRule midpoint_init() {
  return [](double p) { return p - 0.5; };
}

WeightInitRule explicit_init(double value) {
  return [value](double) { return value; };
}

HerdedSampler::HerdedSampler(const Model& model, Assignment x0,
                             std::vector<VariableId> scan_order,
                             SamplerOptions options)
    : model_(&model),
      x_(std::move(x0)),
      scan_order_(std::move(scan_order)),
      options_(std::move(options)) {
  const std::uint32_t n = model.num_vars();
  if (x_.size() != n) throw std::invalid_argument("x0 length mismatch");
  if (!in_support(model, x_))
    throw std::invalid_argument("x0 lies outside the support of the model");

  std::vector<VariableId> sorted(scan_order_);
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < n; ++i) {
    if (sorted.size() != n || sorted[i] != i)
      throw std::invalid_argument("scan order is not a permutation of [0, N)");
  }

  if (options_.mode == WeightMode::kShared && !model.sum_sufficient())
    throw std::invalid_argument(
        "shared weight mode requires a model declaring blanket-sum sufficiency");
  if (!options_.init) throw std::invalid_argument("missing weight init rule");

  weights_.resize(n);
  if (options_.record_trace) trace_.x0 = x_;
}

std::uint64_t HerdedSampler::weight_key(VariableId i) const {
  const std::vector<VariableId>& blanket = model_->blanket(i);
  if (options_.mode == WeightMode::kShared) {
    std::uint64_t sum = 0;
    for (VariableId j : blanket) sum += x_[j];
    return sum;
  }
  if (blanket.size() > 60)
    throw std::invalid_argument("blanket too large for full weight keys");
  std::uint64_t code = 0;
  for (std::size_t k = 0; k < blanket.size(); ++k)
    code |= static_cast<std::uint64_t>(x_[blanket[k]] != 0) << k;
  return code;
}

std::uint8_t HerdedSampler::step() {
  const std::uint32_t n = model_->num_vars();
  const VariableId i = scan_order_[t_ % n];
  const double p = full_conditional(*model_, i, x_);
  const std::uint64_t code = weight_key(i);

  auto [it, inserted] = weights_[i].try_emplace(code);
  WeightCell& cell = it->second;
  if (inserted) {
    const double w0 = options_.init(p);
    if (!(w0 > p - 1.0 && w0 < p))
      throw std::invalid_argument(
          "weight init " + std::to_string(w0) + " for conditional " +
          std::to_string(p) + " must lie strictly inside (p-1, p)");
    cell.w = w0;
  }

  const double w_before = cell.w;
  const std::uint8_t x_i = cell.w > 0.0 ? 1 : 0;
  double delta = p - x_i;
#ifdef HERDGIBBS_TAMPER_WEIGHT_UPDATE
  delta += kTamperBias;
#endif
  if (options_.compensated_sum) {
    const double y = delta - cell.comp;
    const double t = cell.w + y;
    cell.comp = (t - cell.w) - y;
    cell.w = t;
  } else {
    cell.w += delta;
  }

  if (!(cell.w > p - 1.0 - kInvariantSlack && cell.w <= p + kInvariantSlack))
    ++invariant_violations_;

  x_[i] = x_i;
  if (options_.record_trace)
    trace_.steps.push_back(StepRecord{t_, i, code, w_before, p, x_i});
  ++t_;
  return x_i;
}

SampleRecord HerdedSampler::run(std::uint64_t sweeps) {
  if (sweeps == 0) throw std::invalid_argument("run: need at least one sweep");
  const std::uint32_t n = model_->num_vars();
  SampleRecord rec;
  rec.num_vars = n;
  rec.scan_order = scan_order_;
  rec.sweeps.reserve(sweeps);
  for (std::uint64_t k = 0; k < sweeps; ++k) {
    for (std::uint32_t s = 0; s < n; ++s) step();
    rec.sweeps.push_back(x_);
  }
  return rec;
}

std::size_t HerdedSampler::weight_count() const {
  std::size_t total = 0;
  for (const auto& per_var : weights_) total += per_var.size();
  return total;
}

bool HerdedSampler::has_weight(VariableId i, std::uint64_t code) const {
  return weights_.at(i).count(code) != 0;
}

double HerdedSampler::weight(VariableId i, std::uint64_t code) const {
  return weights_.at(i).at(code).w;
}

}  // namespace herdgibbs
