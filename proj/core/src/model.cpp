#include "herdgibbs/model.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

namespace herdgibbs {

std::uint64_t factor_index(const Factor& f, const Assignment& x) {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    idx |= static_cast<std::uint64_t>(x[f.scope[k]] != 0) << k;
  }
  return idx;
}

Model build_model(std::uint32_t num_vars, std::vector<Factor> factors,
                  bool sum_sufficient) {
  if (num_vars == 0) throw std::invalid_argument("model needs at least one variable");
  if (factors.empty()) throw std::invalid_argument("model needs at least one factor");

  std::vector<bool> covered(num_vars, false);
  for (const Factor& f : factors) {
    if (f.scope.empty()) throw std::invalid_argument("factor scope is empty");
    if (f.scope.size() > 20) throw std::invalid_argument("factor scope too large (max 20)");
    std::set<VariableId> seen;
    for (VariableId v : f.scope) {
      if (v >= num_vars)
        throw std::invalid_argument("factor scope index " + std::to_string(v) +
                                    " out of range for " + std::to_string(num_vars) +
                                    " variables");
      if (!seen.insert(v).second)
        throw std::invalid_argument("factor scope repeats variable " + std::to_string(v));
      covered[v] = true;
    }
    const std::size_t want = std::size_t{1} << f.scope.size();
    if (f.table.size() != want)
      throw std::invalid_argument("factor table length " + std::to_string(f.table.size()) +
                                  " != 2^|scope| = " + std::to_string(want));
    bool any_positive = false;
    for (double t : f.table) {
      if (!(t >= 0.0)) throw std::invalid_argument("factor table entry negative or NaN");
      if (t > 0.0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("factor table is all zero");
  }
  for (std::uint32_t v = 0; v < num_vars; ++v) {
    if (!covered[v])
      throw std::invalid_argument("variable " + std::to_string(v) +
                                  " appears in no factor");
  }

  Model m;
  m.num_vars_ = num_vars;
  m.factors_ = std::move(factors);
  m.sum_sufficient_ = sum_sufficient;
  m.blankets_.resize(num_vars);
  m.touching_.resize(num_vars);

  std::vector<std::set<VariableId>> nbrs(num_vars);
  for (std::uint32_t fi = 0; fi < m.factors_.size(); ++fi) {
    const Factor& f = m.factors_[fi];
    for (VariableId v : f.scope) {
      m.touching_[v].push_back(fi);
      for (VariableId u : f.scope) {
        if (u != v) nbrs[v].insert(u);
      }
    }
  }
  for (std::uint32_t v = 0; v < num_vars; ++v) {
    m.blankets_[v].assign(nbrs[v].begin(), nbrs[v].end());  // sorted ascending
  }
  return m;
}

namespace {

// factor_index with the value of variable i overridden to v.
std::uint64_t factor_index_sub(const Factor& f, const Assignment& x,
                               VariableId i, std::uint8_t v) {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    const std::uint8_t bit = (f.scope[k] == i) ? v : x[f.scope[k]];
    idx |= static_cast<std::uint64_t>(bit != 0) << k;
  }
  return idx;
}

}  // namespace

double full_conditional(const Model& model, VariableId i, const Assignment& x) {
  if (i >= model.num_vars()) throw std::invalid_argument("variable index out of range");
  if (x.size() != model.num_vars())
    throw std::invalid_argument("assignment length mismatch");

  double u0 = 1.0, u1 = 1.0;
  for (std::uint32_t fi : model.factors_touching(i)) {
    const Factor& f = model.factors()[fi];
    u0 *= f.table[factor_index_sub(f, x, i, 0)];
    u1 *= f.table[factor_index_sub(f, x, i, 1)];
  }

  const double z = u0 + u1;
  if (z <= 0.0)
    throw UndefinedConditionalError(
        "conditional for variable " + std::to_string(i) +
        " undefined: zero mass for both values under the current blanket");
  return u1 / z;
}

bool in_support(const Model& model, const Assignment& x) {
  if (x.size() != model.num_vars())
    throw std::invalid_argument("assignment length mismatch");
  for (const Factor& f : model.factors()) {
    if (f.table[factor_index(f, x)] <= 0.0) return false;
  }
  return true;
}

Model make_two_var_model(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw std::invalid_argument("two-var model requires 0 < epsilon < 1/4");
  Factor joint;
  joint.scope = {0, 1};
  joint.table = {0.25 - epsilon, epsilon, epsilon, 0.75 - epsilon};
  return build_model(2, {std::move(joint)});
}

Model make_independent_model(const std::vector<double>& marginals) {
  if (marginals.empty()) throw std::invalid_argument("need at least one marginal");
  std::vector<Factor> factors;
  factors.reserve(marginals.size());
  for (std::uint32_t i = 0; i < marginals.size(); ++i) {
    const double p = marginals[i];
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("marginal must lie strictly in (0, 1)");
    factors.push_back(Factor{{i}, {1.0 - p, p}});
  }
  return build_model(static_cast<std::uint32_t>(marginals.size()),
                     std::move(factors), /*sum_sufficient=*/true);
}

std::string serialize_model(const Model& model) {
  std::ostringstream out;
  out << "vars " << model.num_vars() << "\n";
  char buf[64];
  for (const Factor& f : model.factors()) {
    out << "factor " << f.scope.size();
    for (VariableId v : f.scope) out << ' ' << v;
    out << "\n";
    for (std::size_t k = 0; k < f.table.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", f.table[k]);
      out << buf << (k + 1 == f.table.size() ? "\n" : " ");
    }
  }
  return out.str();
}

namespace {

// Token stream that skips '#' comments.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    while (in_ >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in_, rest);
        continue;
      }
      return true;
    }
    return false;
  }

 private:
  std::istream& in_;
};

std::uint64_t parse_uint(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("model parse: bad ") + what + " '" + tok + "'");
  }
  if (pos != tok.size())
    throw std::invalid_argument(std::string("model parse: bad ") + what + " '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("model parse: bad table entry '" + tok + "'");
  }
  if (pos != tok.size())
    throw std::invalid_argument("model parse: bad table entry '" + tok + "'");
  return v;
}

}  // namespace

Model parse_model(std::istream& in) {
  TokenReader tr(in);
  std::string tok;
  if (!tr.next(tok) || tok != "vars")
    throw std::invalid_argument("model parse: expected 'vars'");
  if (!tr.next(tok)) throw std::invalid_argument("model parse: missing variable count");
  const auto num_vars = static_cast<std::uint32_t>(parse_uint(tok, "variable count"));

  std::vector<Factor> factors;
  while (tr.next(tok)) {
    if (tok != "factor")
      throw std::invalid_argument("model parse: expected 'factor', got '" + tok + "'");
    if (!tr.next(tok)) throw std::invalid_argument("model parse: missing scope size");
    const auto k = parse_uint(tok, "scope size");
    if (k == 0 || k > 20) throw std::invalid_argument("model parse: scope size out of range");
    Factor f;
    f.scope.resize(k);
    for (auto& v : f.scope) {
      if (!tr.next(tok)) throw std::invalid_argument("model parse: truncated scope");
      v = static_cast<VariableId>(parse_uint(tok, "scope index"));
    }
    f.table.resize(std::size_t{1} << k);
    for (auto& t : f.table) {
      if (!tr.next(tok)) throw std::invalid_argument("model parse: truncated table");
      t = parse_real(tok);
    }
    factors.push_back(std::move(f));
  }
  return build_model(num_vars, std::move(factors));
}

Model parse_model(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

}  // namespace herdgibbs
