#include "herdgibbs/mean_field.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace herdgibbs {

namespace {

void check_positive_tables(const Model& model) {
  for (const Factor& f : model.factors()) {
    for (double t : f.table) {
      if (!(t > 0.0))
        throw std::invalid_argument(
            "mean field requires strictly positive factor tables");
    }
  }
}

// E_Q[log f(scope)] with variable i pinned to value v; the product measure Q
// runs over the remaining scope variables.
double expected_log_pinned(const Factor& f, const std::vector<double>& q,
                           VariableId i, std::uint8_t v) {
  const std::size_t k = f.scope.size();
  double acc = 0.0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
    double weight = 1.0;
    for (std::size_t s = 0; s < k; ++s) {
      const VariableId var = f.scope[s];
      const bool bit = (a >> s) & 1;
      if (var == i) {
        if (bit != (v != 0)) {
          weight = 0.0;
          break;
        }
      } else {
        weight *= bit ? q[var] : 1.0 - q[var];
      }
    }
    if (weight > 0.0) acc += weight * std::log(f.table[a]);
  }
  return acc;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

MeanFieldResult mean_field_run(const Model& model, const MeanFieldConfig& cfg) {
  const std::uint32_t n = model.num_vars();
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
    throw std::invalid_argument("mean field damping must lie in (0, 1]");
  if (cfg.iterations == 0)
    throw std::invalid_argument("mean field needs >= 1 iteration");
  check_positive_tables(model);

  std::vector<double> q = cfg.init.empty() ? std::vector<double>(n, 0.5) : cfg.init;
  if (q.size() != n) throw std::invalid_argument("mean field init length mismatch");
  for (double v : q) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("mean field init outside [0, 1]");
  }

  std::vector<VariableId> order = cfg.scan_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  if (order.size() != n)
    throw std::invalid_argument("mean field scan order length mismatch");

  MeanFieldResult result;
  result.trajectory.reserve(cfg.iterations);
  const double d = cfg.damping;

  for (std::uint64_t sweep = 0; sweep < cfg.iterations; ++sweep) {
    for (VariableId i : order) {
      double z = 0.0;
      for (std::uint32_t fi : model.factors_touching(i)) {
        const Factor& f = model.factors()[fi];
        z += expected_log_pinned(f, q, i, 1) - expected_log_pinned(f, q, i, 0);
      }
      const double q_star = sigmoid(z);
      q[i] = (1.0 - d) * q[i] + d * q_star;  // convex combination stays in [0,1]
    }
    result.trajectory.push_back(q);
  }
  result.marginals = std::move(q);
  return result;
}

double mean_field_free_energy(const Model& model, const std::vector<double>& q) {
  if (q.size() != model.num_vars())
    throw std::invalid_argument("free energy: marginal length mismatch");
  check_positive_tables(model);

  auto entropy = [](double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
  };

  double f_val = 0.0;
  for (double p : q) f_val += entropy(p);

  for (const Factor& f : model.factors()) {
    const std::size_t k = f.scope.size();
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
      double weight = 1.0;
      for (std::size_t s = 0; s < k; ++s) {
        const bool bit = (a >> s) & 1;
        const double qi = q[f.scope[s]];
        weight *= bit ? qi : 1.0 - qi;
      }
      if (weight > 0.0) f_val += weight * std::log(f.table[a]);
    }
  }
  return f_val;
}

}  // namespace herdgibbs
