#ifndef HERDGIBBS_MODEL_HPP
#define HERDGIBBS_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace herdgibbs {

using VariableId = std::uint32_t;

// Binary assignment, one {0,1} entry per variable. Spin values {-1,+1} exist
// only at the Ising boundary (see ising.hpp); everything else is bits.
using Assignment = std::vector<std::uint8_t>;

// Thrown when a conditional p(X_i | blanket) has zero unnormalized mass for
// both values of X_i. Trajectories started inside the support never hit this;
// failing fast catches bad initialization.
struct UndefinedConditionalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A tabulated factor over an ordered scope of binary variables. The table has
// 2^|scope| nonnegative entries; the entry for a joint assignment is indexed
// little-endian: scope variable at position k contributes bit k. This
// encoding is fixed and shared by the text serialization below.
struct Factor {
  std::vector<VariableId> scope;
  std::vector<double> table;
};

// Index into a factor table for the values the scope takes under x.
std::uint64_t factor_index(const Factor& f, const Assignment& x);

// An immutable binary factor graph. Construct via build_model(); adjacency
// (per-variable Markov blankets) is derived once at build time. Safe to
// share across threads after construction.
class Model {
 public:
  std::uint32_t num_vars() const { return num_vars_; }
  const std::vector<Factor>& factors() const { return factors_; }

  // Markov blanket N(i): all variables sharing a factor with i, sorted
  // ascending, excluding i itself.
  const std::vector<VariableId>& blanket(VariableId i) const {
    return blankets_.at(i);
  }

  // Indices into factors() of the factors whose scope contains i.
  const std::vector<std::uint32_t>& factors_touching(VariableId i) const {
    return touching_.at(i);
  }

  // True when the builder declared that p(X_i=1 | blanket) depends on the
  // blanket only through the sum of its bits (homogeneous couplings). Shared
  // weight mode requires this.
  bool sum_sufficient() const { return sum_sufficient_; }

 private:
  friend Model build_model(std::uint32_t, std::vector<Factor>, bool);
  Model() = default;

  std::uint32_t num_vars_ = 0;
  std::vector<Factor> factors_;
  std::vector<std::vector<VariableId>> blankets_;
  std::vector<std::vector<std::uint32_t>> touching_;
  bool sum_sufficient_ = false;
};

// Validates factors (scope in range, no duplicate scope entries, table length
// 2^|scope|, entries >= 0 with at least one > 0, every variable covered) and
// computes adjacency. Throws std::invalid_argument on violations.
Model build_model(std::uint32_t num_vars, std::vector<Factor> factors,
                  bool sum_sufficient = false);

// p(X_i = 1 | x_blanket) = u1 / (u0 + u1), where u_v multiplies the entries
// of every factor touching i with X_i = v and the other scope variables read
// from x. Depends on x only through the blanket of i.
double full_conditional(const Model& model, VariableId i, const Assignment& x);

// True iff every factor entry at x is positive.
bool in_support(const Model& model, const Assignment& x);

// The two-variable benchmark model: joint {(0,0): 1/4-eps, (1,0): eps,
// (0,1): eps, (1,1): 3/4-eps}, both marginals 3/4. Requires 0 < eps < 1/4.
Model make_two_var_model(double epsilon);

// A model of independent variables: one unary factor [1-p_i, p_i] per
// variable. Marks the model sum-sufficient (blankets are empty).
Model make_independent_model(const std::vector<double>& marginals);

// Line-oriented text format:
//   vars N
//   factor K i_0 ... i_{K-1}
//   t_0 t_1 ... t_{2^K-1}
// Table entries in the little-endian index order of factor_index(). '#'
// starts a comment. Floating-point values round-trip via %.17g.
std::string serialize_model(const Model& model);
Model parse_model(std::istream& in);
Model parse_model(const std::string& text);

}  // namespace herdgibbs

#endif  // HERDGIBBS_MODEL_HPP
