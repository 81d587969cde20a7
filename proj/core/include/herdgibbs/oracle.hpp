#ifndef HERDGIBBS_ORACLE_HPP
#define HERDGIBBS_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "herdgibbs/model.hpp"

namespace herdgibbs {

// A full joint distribution over 2^n binary states. State s is decoded
// little-endian: bit i of s is the value of variable i.
struct ExactDistribution {
  std::uint32_t n = 0;
  std::vector<double> probs;
};

// Dense row-stochastic sweep transition kernel T = T_1 T_2 ... T_N in the
// given scan order, stored row-major (2^n x 2^n).
struct SweepKernel {
  std::uint32_t n = 0;
  std::vector<double> matrix;
  std::vector<VariableId> order;

  double at(std::uint64_t row, std::uint64_t col) const {
    return matrix[(row << n) + col];
  }
};

// Constants of the fully-connected convergence bound for a strictly positive
// model: d_v(P_T^(tau), pi) <= lambda / T for T >= T_star, tau > tau_star(T).
struct Theorem2Constants {
  std::uint32_t n = 0;
  double pi_min = 0;   // minimum nonzero conditional over all (i, blanket)
  std::uint32_t t_star = 0;   // path length; N for strictly positive models
  std::uint32_t tau_star = 0; // ceil(t_star / N)
  double l = 0;        // pi_min^t_star
  double B = 0;        // tau_star * l + sum_j pi_min^j 2^min(N, j)
  double eta = 0;      // Dobrushin coefficient of the sweep kernel
  double lambda = 0;   // 2N(1+eta) / (l(1-eta))
  double T_star = 0;   // 2B / l

  // log_{2/(1+eta)}((1-eta) l T / (4N)); negative for small T.
  double tau_star_of(double T) const;
};

// Brute-force joint: probs[s] proportional to the product of factor entries
// at state s. Throws when n exceeds the cap (default 20) or when every state
// has zero mass.
ExactDistribution enumerate_joint(const Model& model, std::uint32_t cap = 20);

// Total variation distance, half the L1 distance. Requires equal n.
double tv_distance(const ExactDistribution& p, const ExactDistribution& q);

// Per-variable marginals P(X_i = 1).
std::vector<double> exact_marginals(const ExactDistribution& d);

// Single-site kernel composed over the scan order. Rows whose conditioning
// state has zero mass keep the identity on that coordinate (the arbitrary
// choice never matters for trajectories inside the support). Cap defaults to
// 12 since the matrix holds 4^n entries.
SweepKernel sweep_kernel(const Model& model, const std::vector<VariableId>& order,
                         std::uint32_t cap = 12);

// Row distribution after applying the kernel: (p T)[y] = sum_x p[x] T(x, y).
ExactDistribution apply_kernel(const ExactDistribution& p, const SweepKernel& k);

// max over state pairs of the total variation distance between kernel rows.
double dobrushin_coefficient(const SweepKernel& k);

// Requires a strictly positive joint (so t_star = N) and eta < 1.
Theorem2Constants theorem2_constants(const Model& model,
                                     const std::vector<VariableId>& order);

}  // namespace herdgibbs

#endif  // HERDGIBBS_ORACLE_HPP
