#ifndef HERDGIBBS_DIAGNOSTICS_HPP
#define HERDGIBBS_DIAGNOSTICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "herdgibbs/herded.hpp"
#include "herdgibbs/oracle.hpp"

namespace herdgibbs {

enum class ErrorMetric { kMarginalAbsError, kTvJoint };

struct ErrorSeries {
  ErrorMetric metric = ErrorMetric::kMarginalAbsError;
  std::uint64_t tau = 0;
  std::vector<std::pair<std::uint64_t, double>> points;  // (T, error), T increasing
};

// Empirical joint over T end-of-sweep samples starting at sweep index tau
// (record index; rec.sweeps[k] is the state after sweep k+1). Entries are
// integer multiples of 1/T and sum to one exactly.
ExactDistribution empirical_distribution(const SampleRecord& rec,
                                         std::uint64_t tau, std::uint64_t T);

// Error between the empirical distribution and the oracle at each T of the
// grid. kMarginalAbsError compares P(X_var = 1); kTvJoint is d_v.
ErrorSeries error_series(const SampleRecord& rec, const ExactDistribution& oracle,
                         ErrorMetric metric, std::uint64_t tau,
                         std::span<const std::uint64_t> t_grid,
                         std::uint32_t marginal_var = 0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n_points = 0;    // points used in the fit
  std::size_t n_excluded = 0;  // zero-error points dropped before fitting
};

// Least-squares slope of log(error) against log(T). With envelope = true the
// series is first replaced by its non-increasing upper envelope
// env(T) = max_{T' >= T} error(T'), removing herding oscillations. Requires
// at least five positive points.
SlopeFit convergence_slope(const ErrorSeries& series, bool envelope = true);

// Weight points on the unit torus, collected once per sweep by mapping each
// herding weight through w - floor(w) into [0, 1).
struct DiscrepancySample {
  std::uint32_t dim = 0;
  std::vector<double> coords;  // dim * count values, point-major

  std::size_t count() const { return dim == 0 ? 0 : coords.size() / dim; }
  void add(std::span<const double> point);
};

double torus_coordinate(double w);

// Star discrepancy estimate: sup over anchored boxes [0, a) with a on a
// uniform grid of `grid` levels per axis of |empirical fraction - volume|.
// Requires >= 100 points and dim <= 3.
double weight_discrepancy(const DiscrepancySample& sample, std::uint32_t grid = 64);

struct VisitRateReport {
  std::vector<std::uint64_t> window_counts;
  double min_rate = 0.0;  // min over windows of count / window_length
};

// Counts visits of `state` at slot i of each sweep (times t with
// t mod N == slot) over disjoint windows of `window` sweeps, reconstructing
// the trajectory from the step trace.
VisitRateReport visit_rate(const StepTrace& trace, std::uint32_t num_vars,
                           const Assignment& state, std::uint32_t slot,
                           std::uint64_t window);

// Decision sequence of a single weight key extracted from a step trace, with
// its conditional; used for per-key moment-matching checks.
struct KeySequence {
  VariableId var = 0;
  std::uint64_t code = 0;
  double p = 0.0;
  std::vector<std::uint8_t> decisions;
};

std::vector<KeySequence> key_sequences(const StepTrace& trace);

// Largest deviation |ones(window) - M p| over all windows of M consecutive
// updates of one key; the Lemma-1 bound is 1.
double max_window_deviation(const KeySequence& seq, std::uint64_t M);

}  // namespace herdgibbs

#endif  // HERDGIBBS_DIAGNOSTICS_HPP
