#include "herdgibbs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace herdgibbs {

namespace {

std::uint64_t encode_state(const Assignment& x) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s |= static_cast<std::uint64_t>(x[i] != 0) << i;
  return s;
}

}  // namespace

ExactDistribution empirical_distribution(const SampleRecord& rec,
                                         std::uint64_t tau, std::uint64_t T) {
  if (T == 0) throw std::invalid_argument("empirical_distribution: T >= 1 required");
  if (rec.num_vars > 20)
    throw std::invalid_argument("empirical_distribution: model exceeds joint cap");
  if (tau + T > rec.sweeps.size())
    throw std::invalid_argument("empirical_distribution: record too short (" +
                                std::to_string(rec.sweeps.size()) + " sweeps, need " +
                                std::to_string(tau + T) + ")");

  std::vector<std::uint64_t> counts(std::uint64_t{1} << rec.num_vars, 0);
  for (std::uint64_t k = tau; k < tau + T; ++k)
    ++counts[encode_state(rec.sweeps[k])];

  ExactDistribution d;
  d.n = rec.num_vars;
  d.probs.resize(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s)
    d.probs[s] = static_cast<double>(counts[s]) / static_cast<double>(T);
  return d;
}

ErrorSeries error_series(const SampleRecord& rec, const ExactDistribution& oracle,
                         ErrorMetric metric, std::uint64_t tau,
                         std::span<const std::uint64_t> t_grid,
                         std::uint32_t marginal_var) {
  if (t_grid.empty()) throw std::invalid_argument("error_series: empty T grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (t_grid[k] <= t_grid[k - 1])
      throw std::invalid_argument("error_series: T grid must be strictly increasing");
  }
  if (marginal_var >= rec.num_vars)
    throw std::invalid_argument("error_series: marginal variable out of range");

  const std::vector<double> oracle_marginals = exact_marginals(oracle);

  ErrorSeries series;
  series.metric = metric;
  series.tau = tau;
  series.points.reserve(t_grid.size());

  // Running state counts over the window [tau, tau+T) let the grid share one
  // pass instead of recounting per T.
  std::vector<std::uint64_t> counts(std::uint64_t{1} << rec.num_vars, 0);
  std::uint64_t covered = 0;
  const std::uint64_t mbit = std::uint64_t{1} << marginal_var;

  for (std::uint64_t T : t_grid) {
    if (tau + T > rec.sweeps.size())
      throw std::invalid_argument("error_series: record too short for T = " +
                                  std::to_string(T));
    for (; covered < T; ++covered)
      ++counts[encode_state(rec.sweeps[tau + covered])];

    double err = 0.0;
    const double invT = 1.0 / static_cast<double>(T);
    if (metric == ErrorMetric::kMarginalAbsError) {
      std::uint64_t ones = 0;
      for (std::uint64_t s = 0; s < counts.size(); ++s)
        if (s & mbit) ones += counts[s];
      err = std::abs(static_cast<double>(ones) * invT - oracle_marginals[marginal_var]);
    } else {
      double l1 = 0.0;
      for (std::uint64_t s = 0; s < counts.size(); ++s)
        l1 += std::abs(static_cast<double>(counts[s]) * invT - oracle.probs[s]);
      err = 0.5 * l1;
    }
    series.points.emplace_back(T, err);
  }
  return series;
}

SlopeFit convergence_slope(const ErrorSeries& series, bool envelope) {
  std::vector<std::pair<std::uint64_t, double>> pts = series.points;
  if (envelope) {
    // non-increasing upper envelope: suffix max over the measured grid
    for (std::size_t k = pts.size(); k-- > 1;)
      pts[k - 1].second = std::max(pts[k - 1].second, pts[k].second);
  }

  SlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [T, err] : pts) {
    if (!(err > 0.0)) {
      ++fit.n_excluded;
      continue;
    }
    const double lx = std::log(static_cast<double>(T));
    const double ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.n_points;
  }
  if (fit.n_points < 5)
    throw std::invalid_argument("convergence_slope: need >= 5 positive points, got " +
                                std::to_string(fit.n_points));
  const double n = static_cast<double>(fit.n_points);
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

void DiscrepancySample::add(std::span<const double> point) {
  if (dim == 0) dim = static_cast<std::uint32_t>(point.size());
  if (point.size() != dim)
    throw std::invalid_argument("discrepancy point dimension mismatch");
  for (double c : point) {
    if (!(c >= 0.0 && c < 1.0))
      throw std::invalid_argument("discrepancy coordinates must lie in [0, 1)");
    coords.push_back(c);
  }
}

double torus_coordinate(double w) {
  double r = w - std::floor(w);
  if (r >= 1.0) r = 0.0;  // guard against -eps rounding up
  return r;
}

double weight_discrepancy(const DiscrepancySample& sample, std::uint32_t grid) {
  const std::uint32_t d = sample.dim;
  if (d == 0 || d > 3)
    throw std::invalid_argument("weight_discrepancy: dimension must be 1..3");
  const std::size_t n = sample.count();
  if (n < 100)
    throw std::invalid_argument("weight_discrepancy: need >= 100 points");
  if (grid < 2) throw std::invalid_argument("weight_discrepancy: grid too coarse");

  // Histogram on the grid, then inclusion counts via prefix sums per axis.
  // cells[c0 + g*c1 + g^2*c2]; a point with coordinate x falls in cell
  // floor(x * g), so the box [0, k/g) covers cells 0..k-1 exactly.
  const std::size_t g = grid;
  std::size_t total_cells = 1;
  for (std::uint32_t a = 0; a < d; ++a) total_cells *= g;
  std::vector<double> cells(total_cells, 0.0);

  for (std::size_t p = 0; p < n; ++p) {
    std::size_t idx = 0, stride = 1;
    for (std::uint32_t a = 0; a < d; ++a) {
      auto c = static_cast<std::size_t>(sample.coords[p * d + a] * g);
      if (c >= g) c = g - 1;
      idx += c * stride;
      stride *= g;
    }
    cells[idx] += 1.0;
  }

  // prefix sums along each axis turn cell counts into counts of [0, k/g) boxes
  std::size_t stride = 1;
  for (std::uint32_t a = 0; a < d; ++a) {
    for (std::size_t base = 0; base < total_cells; ++base) {
      const std::size_t coord = (base / stride) % g;
      if (coord > 0) cells[base] += cells[base - stride];
    }
    stride *= g;
  }

  double worst = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_g = 1.0 / static_cast<double>(g);
  for (std::size_t cell = 0; cell < total_cells; ++cell) {
    double volume = 1.0;
    std::size_t rest = cell;
    for (std::uint32_t a = 0; a < d; ++a) {
      const std::size_t coord = rest % g;
      rest /= g;
      volume *= static_cast<double>(coord + 1) * inv_g;
    }
    worst = std::max(worst, std::abs(cells[cell] * inv_n - volume));
  }
  return worst;
}

VisitRateReport visit_rate(const StepTrace& trace, std::uint32_t num_vars,
                           const Assignment& state, std::uint32_t slot,
                           std::uint64_t window) {
  if (slot >= num_vars) throw std::invalid_argument("visit_rate: slot out of range");
  if (window == 0) throw std::invalid_argument("visit_rate: window >= 1 required");
  if (state.size() != num_vars)
    throw std::invalid_argument("visit_rate: state length mismatch");
  if (trace.x0.size() != num_vars)
    throw std::invalid_argument("visit_rate: trace missing initial state");

  // Replay the trajectory; sample the state at times t = k*N + slot, i.e.
  // right after the step with index t = k*N + slot - 1 (for slot 0 this is
  // the end of the previous sweep; the first sample is x0 itself).
  std::vector<std::uint8_t> hits;
  Assignment x = trace.x0;
  std::uint64_t t = 0;
  auto matches = [&]() { return x == state; };
  if (slot == 0) hits.push_back(matches() ? 1 : 0);
  for (const StepRecord& s : trace.steps) {
    x[s.var] = s.x;
    ++t;
    if (t % num_vars == slot) hits.push_back(matches() ? 1 : 0);
  }

  VisitRateReport report;
  const std::uint64_t full_windows = hits.size() / window;
  if (full_windows == 0)
    throw std::invalid_argument("visit_rate: trace shorter than one window");
  report.min_rate = 1.0;
  for (std::uint64_t w = 0; w < full_windows; ++w) {
    std::uint64_t count = 0;
    for (std::uint64_t k = 0; k < window; ++k) count += hits[w * window + k];
    report.window_counts.push_back(count);
    report.min_rate = std::min(
        report.min_rate, static_cast<double>(count) / static_cast<double>(window));
  }
  return report;
}

std::vector<KeySequence> key_sequences(const StepTrace& trace) {
  std::map<std::pair<VariableId, std::uint64_t>, std::size_t> index;
  std::vector<KeySequence> out;
  for (const StepRecord& s : trace.steps) {
    const auto key = std::make_pair(s.var, s.blanket_code);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back(KeySequence{s.var, s.blanket_code, s.p, {}});
    }
    out[it->second].decisions.push_back(s.x);
  }
  return out;
}

double max_window_deviation(const KeySequence& seq, std::uint64_t M) {
  if (M == 0) throw std::invalid_argument("max_window_deviation: M >= 1 required");
  const std::size_t len = seq.decisions.size();
  if (len < M) return 0.0;

  std::vector<std::uint64_t> prefix(len + 1, 0);
  for (std::size_t k = 0; k < len; ++k)
    prefix[k + 1] = prefix[k] + (seq.decisions[k] != 0);

  const double target = static_cast<double>(M) * seq.p;
  double worst = 0.0;
  for (std::size_t start = 0; start + M <= len; ++start) {
    const auto ones = static_cast<double>(prefix[start + M] - prefix[start]);
    worst = std::max(worst, std::abs(ones - target));
  }
  return worst;
}

}  // namespace herdgibbs
