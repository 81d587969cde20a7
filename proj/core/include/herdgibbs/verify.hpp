#ifndef HERDGIBBS_VERIFY_HPP
#define HERDGIBBS_VERIFY_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "herdgibbs/experiments.hpp"

namespace herdgibbs {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;   // the measured quantity
  double bound = 0.0;   // the limit it is held against
  double seconds = 0.0;
  std::string detail;   // human-readable context for the report line
};

struct VerifyConfig {
  GlobalConfig global;
};

// Runs the full acceptance suite: scalar moment matching, per-key counting
// bounds, oracle equivalence and stationarity, the fully-connected
// convergence bound, rate separation against Gibbs, empty-graph convergence
// and weight equidistribution, the denoising trend, output determinism, the
// tau = 0 log-factor bound, and the global weight-interval invariant.
std::vector<CheckResult> run_acceptance_checks(const VerifyConfig& cfg);

// Schema: check,status,value,bound
std::string check_results_csv(const std::vector<CheckResult>& results);

// Prints one pass/fail line per check to `out`, writes the results CSV under
// the configured output directory, and returns 0 on all-pass, 1 otherwise.
int run_verify_and_report(const VerifyConfig& cfg, std::ostream& out);

}  // namespace herdgibbs

#endif  // HERDGIBBS_VERIFY_HPP
