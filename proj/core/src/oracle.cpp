#include "herdgibbs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace herdgibbs {

namespace {

Assignment decode_state(std::uint64_t s, std::uint32_t n) {
  Assignment x(n);
  for (std::uint32_t i = 0; i < n; ++i) x[i] = (s >> i) & 1;
  return x;
}

}  // namespace

double Theorem2Constants::tau_star_of(double T) const {
  const double arg = (1.0 - eta) * l * T / (4.0 * n);
  return std::log(arg) / std::log(2.0 / (1.0 + eta));
}

ExactDistribution enumerate_joint(const Model& model, std::uint32_t cap) {
  const std::uint32_t n = model.num_vars();
  if (n > cap)
    throw std::invalid_argument("enumerate_joint: " + std::to_string(n) +
                                " variables exceeds cap " + std::to_string(cap));
  const std::uint64_t states = std::uint64_t{1} << n;
  ExactDistribution d;
  d.n = n;
  d.probs.resize(states);

  double total = 0.0;
  Assignment x(n, 0);
  for (std::uint64_t s = 0; s < states; ++s) {
    for (std::uint32_t i = 0; i < n; ++i) x[i] = (s >> i) & 1;
    double w = 1.0;
    for (const Factor& f : model.factors()) w *= f.table[factor_index(f, x)];
    d.probs[s] = w;
    total += w;
  }
  if (total <= 0.0)
    throw std::invalid_argument("enumerate_joint: zero mass at every state");
  for (double& p : d.probs) p /= total;
  return d;
}

double tv_distance(const ExactDistribution& p, const ExactDistribution& q) {
  if (p.n != q.n)
    throw std::invalid_argument("tv_distance: dimension mismatch");
  double l1 = 0.0;
  for (std::size_t s = 0; s < p.probs.size(); ++s)
    l1 += std::abs(p.probs[s] - q.probs[s]);
  return 0.5 * l1;
}

std::vector<double> exact_marginals(const ExactDistribution& d) {
  std::vector<double> m(d.n, 0.0);
  for (std::uint64_t s = 0; s < d.probs.size(); ++s) {
    for (std::uint32_t i = 0; i < d.n; ++i) {
      if ((s >> i) & 1) m[i] += d.probs[s];
    }
  }
  return m;
}

SweepKernel sweep_kernel(const Model& model, const std::vector<VariableId>& order,
                         std::uint32_t cap) {
  const std::uint32_t n = model.num_vars();
  if (n > cap)
    throw std::invalid_argument("sweep_kernel: " + std::to_string(n) +
                                " variables exceeds cap " + std::to_string(cap));
  {
    std::vector<VariableId> sorted(order);
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t i = 0; i < n; ++i) {
      if (sorted.size() != n || sorted[i] != i)
        throw std::invalid_argument("sweep_kernel: order is not a permutation");
    }
  }

  const std::uint64_t states = std::uint64_t{1} << n;

  // Conditional p(X_i = 1 | x_{-i}) per state, or -1 where undefined (zero
  // conditioning mass) meaning the row keeps the identity on coordinate i.
  auto site_conditionals = [&](VariableId i) {
    std::vector<double> p(states);
    for (std::uint64_t s = 0; s < states; ++s) {
      Assignment x = decode_state(s, n);
      try {
        p[s] = full_conditional(model, i, x);
      } catch (const UndefinedConditionalError&) {
        p[s] = -1.0;
      }
    }
    return p;
  };

  // M starts as the identity and absorbs one site kernel at a time:
  // (M T_i)(x, y) = M(x, y0) T_i(y0, y) + M(x, y1) T_i(y1, y) where y0, y1
  // are y with coordinate i cleared/set. T_i rows depend only on y_{-i}.
  std::vector<double> m(states * states, 0.0);
  for (std::uint64_t s = 0; s < states; ++s) m[s * states + s] = 1.0;
  std::vector<double> next(states * states);

  for (VariableId i : order) {
    const std::vector<double> p = site_conditionals(i);
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t row = 0; row < states; ++row) {
      const double* mr = &m[row * states];
      double* nr = &next[row * states];
      for (std::uint64_t y = 0; y < states; ++y) {
        const std::uint64_t y0 = y & ~bit;
        const std::uint64_t y1 = y | bit;
        const double mass = mr[y0] + mr[y1];
        const double p1 = p[y0];  // conditioning state y_{-i}; p[y0] == p[y1]
        if (p1 < 0.0) {
          // undefined conditional: identity on coordinate i
          nr[y] = mr[y];
        } else {
          nr[y] = mass * ((y & bit) ? p1 : 1.0 - p1);
        }
      }
    }
    m.swap(next);
  }

  SweepKernel k;
  k.n = n;
  k.matrix = std::move(m);
  k.order = order;
  return k;
}

ExactDistribution apply_kernel(const ExactDistribution& p, const SweepKernel& k) {
  if (p.n != k.n) throw std::invalid_argument("apply_kernel: dimension mismatch");
  const std::uint64_t states = std::uint64_t{1} << k.n;
  ExactDistribution out;
  out.n = k.n;
  out.probs.assign(states, 0.0);
  for (std::uint64_t x = 0; x < states; ++x) {
    const double px = p.probs[x];
    if (px == 0.0) continue;
    const double* row = &k.matrix[x * states];
    for (std::uint64_t y = 0; y < states; ++y) out.probs[y] += px * row[y];
  }
  return out;
}

double dobrushin_coefficient(const SweepKernel& k) {
  const std::uint64_t states = std::uint64_t{1} << k.n;
  double eta = 0.0;
  for (std::uint64_t a = 0; a < states; ++a) {
    for (std::uint64_t b = a + 1; b < states; ++b) {
      double l1 = 0.0;
      const double* ra = &k.matrix[a * states];
      const double* rb = &k.matrix[b * states];
      for (std::uint64_t y = 0; y < states; ++y) l1 += std::abs(ra[y] - rb[y]);
      eta = std::max(eta, 0.5 * l1);
    }
  }
  return eta;
}

Theorem2Constants theorem2_constants(const Model& model,
                                     const std::vector<VariableId>& order) {
  const std::uint32_t n = model.num_vars();
  const ExactDistribution joint = enumerate_joint(model);
  for (double p : joint.probs) {
    if (!(p > 0.0))
      throw std::invalid_argument(
          "theorem2_constants: joint must be strictly positive");
  }

  Theorem2Constants c;
  c.n = n;
  // Strictly positive joint: every path of length N reaches every state, so
  // t_star = N and tau_star = 1.
  c.t_star = n;
  c.tau_star = 1;

  double pi_min = 1.0;
  const std::uint64_t states = std::uint64_t{1} << n;
  Assignment x(n, 0);
  for (std::uint64_t s = 0; s < states; ++s) {
    for (std::uint32_t i = 0; i < n; ++i) x[i] = (s >> i) & 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double p1 = full_conditional(model, i, x);
      if (p1 > 0.0) pi_min = std::min(pi_min, p1);
      if (p1 < 1.0) pi_min = std::min(pi_min, 1.0 - p1);
    }
  }
  c.pi_min = pi_min;
  c.l = std::pow(pi_min, static_cast<double>(c.t_star));

  double sum = 0.0;
  for (std::uint32_t j = 0; j < c.t_star; ++j) {
    sum += std::pow(pi_min, static_cast<double>(j)) *
           std::pow(2.0, static_cast<double>(std::min(n, j)));
  }
  c.B = c.tau_star * c.l + sum;

  c.eta = dobrushin_coefficient(sweep_kernel(model, order));
  if (c.eta >= 1.0)
    throw std::invalid_argument("theorem2_constants: Dobrushin coefficient >= 1");
  c.lambda = 2.0 * n * (1.0 + c.eta) / (c.l * (1.0 - c.eta));
  c.T_star = 2.0 * c.B / c.l;
  return c;
}

}  // namespace herdgibbs
