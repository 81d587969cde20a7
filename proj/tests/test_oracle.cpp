#include <doctest.h>

#include <array>
#include <cmath>

#include "herdgibbs/oracle.hpp"
#include "test_util.hpp"

using namespace herdgibbs;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("enumerate_joint pins the two-var table and a unary model") {
  const ExactDistribution d = enumerate_joint(make_two_var_model(0.1));
  CHECK(d.probs == std::vector<double>{0.15, 0.1, 0.1, 0.65});

  const ExactDistribution u =
      enumerate_joint(build_model(1, {Factor{{0}, {1.0, 3.0}}}));
  CHECK(u.probs == std::vector<double>{0.25, 0.75});
}

TEST_CASE("enumerate_joint enforces the variable cap") {
  std::vector<Factor> factors;
  for (std::uint32_t i = 0; i < 21; ++i)
    factors.push_back(Factor{{i}, {1.0, 1.0}});
  const Model m = build_model(21, std::move(factors));
  CHECK_THROWS_AS(enumerate_joint(m), std::invalid_argument);
  CHECK_NOTHROW(enumerate_joint(m, 21));  // overridable
}

TEST_CASE("tv_distance basics") {
  const ExactDistribution a{1, {1.0, 0.0}};
  const ExactDistribution b{1, {0.0, 1.0}};
  const ExactDistribution c{1, {0.75, 0.25}};
  const ExactDistribution u{1, {0.5, 0.5}};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == 1.0);
  CHECK(tv_distance(c, u) == doctest::Approx(0.25).epsilon(1e-15));
  const ExactDistribution two{2, {0.25, 0.25, 0.25, 0.25}};
  CHECK_THROWS_AS(tv_distance(a, two), std::invalid_argument);
}

TEST_CASE("exact_marginals") {
  const ExactDistribution table1 = enumerate_joint(make_two_var_model(0.1));
  const std::vector<double> m = exact_marginals(table1);
  CHECK(m[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m[1] == doctest::Approx(0.75).epsilon(1e-15));

  const ExactDistribution uniform{2, {0.25, 0.25, 0.25, 0.25}};
  CHECK(exact_marginals(uniform) == std::vector<double>{0.5, 0.5});

  const ExactDistribution point{2, {0.0, 1.0, 0.0, 0.0}};  // mass on (1,0)
  CHECK(exact_marginals(point) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("single-variable sweep kernel has identical rows") {
  const Model m = build_model(1, {Factor{{0}, {1.0, 3.0}}});
  const SweepKernel k = sweep_kernel(m, {0});
  CHECK(k.at(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(k.at(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(k.at(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(k.at(1, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(dobrushin_coefficient(k) == doctest::Approx(0.0));
}

// Independent route: build the two one-site matrices from the table-1 joint
// by hand and multiply them.
static std::array<std::array<double, 4>, 4> two_var_kernel_by_hand(double eps) {
  const double a = eps / 0.25;            // p(X0=1 | X1=0)
  const double b = (0.75 - eps) / 0.75;   // p(X0=1 | X1=1)
  // the model is symmetric, so the X1 conditionals equal a and b as well
  std::array<std::array<double, 4>, 4> t1{}, t2{}, prod{};
  for (int s = 0; s < 4; ++s) {
    const int x1 = s >> 1;
    const double p = x1 ? b : a;
    t1[s][(s & 2) | 0] += 1.0 - p;
    t1[s][(s & 2) | 1] += p;
    const int x0 = s & 1;
    const double q = x0 ? b : a;
    t2[s][(s & 1) | 0] += 1.0 - q;
    t2[s][(s & 1) | 2] += q;
  }
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int k = 0; k < 4; ++k) prod[r][c] += t1[r][k] * t2[k][c];
  return prod;
}

TEST_CASE("two-var sweep kernel matches the hand-multiplied one-site matrices") {
  const SweepKernel k = sweep_kernel(make_two_var_model(0.1), {0, 1});
  const auto expect = two_var_kernel_by_hand(0.1);
  for (int r = 0; r < 4; ++r) {
    double row_sum = 0.0;
    for (int c = 0; c < 4; ++c) {
      CHECK(k.at(r, c) == doctest::Approx(expect[r][c]).epsilon(1e-12));
      row_sum += k.at(r, c);
    }
    CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("stationarity pi T = pi on random positive models") {
  Xoshiro256StarStar rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    const Model m = test::random_positive_model(rng);
    std::vector<VariableId> order(m.num_vars());
    for (std::uint32_t i = 0; i < m.num_vars(); ++i) order[i] = i;
    const ExactDistribution joint = enumerate_joint(m);
    const ExactDistribution advanced =
        apply_kernel(joint, sweep_kernel(m, order));
    for (std::size_t s = 0; s < joint.probs.size(); ++s)
      CHECK(std::abs(advanced.probs[s] - joint.probs[s]) <= 1e-10);
  }
}

TEST_CASE("sweep kernel cap and permutation validation") {
  const Model m = make_two_var_model(0.1);
  CHECK_THROWS_AS(sweep_kernel(m, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_kernel(m, {0, 1}, 1), std::invalid_argument);
}

TEST_CASE("zero-mass conditioning states keep the identity") {
  // (0,0) forbidden: conditioning X1=0 is fine, X0's update from (0,0) is not
  // reachable in-support; kernel rows must still be stochastic.
  const Model m = build_model(2, {Factor{{0, 1}, {0.0, 0.0, 0.4, 0.6}}});
  const SweepKernel k = sweep_kernel(m, {0, 1});
  const std::uint64_t states = 4;
  for (std::uint64_t r = 0; r < states; ++r) {
    double sum = 0.0;
    for (std::uint64_t c = 0; c < states; ++c) sum += k.at(r, c);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("identity kernel has Dobrushin coefficient one") {
  SweepKernel k;
  k.n = 1;
  k.matrix = {1.0, 0.0, 0.0, 1.0};
  k.order = {0};
  CHECK(dobrushin_coefficient(k) == doctest::Approx(1.0));
}

TEST_CASE("two-var Dobrushin coefficient is pinned at 7/15") {
  // hand value: rows from x2=0 and x2=1 give TV = (1/2) * 14/15
  const SweepKernel k = sweep_kernel(make_two_var_model(0.1), {0, 1});
  CHECK(dobrushin_coefficient(k) == doctest::Approx(7.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("Dobrushin coefficient is a contraction modulus") {
  Xoshiro256StarStar rng(707);
  const Model m = make_two_var_model(0.1);
  const SweepKernel k = sweep_kernel(m, {0, 1});
  const double eta = dobrushin_coefficient(k);
  for (int trial = 0; trial < 50; ++trial) {
    auto random_dist = [&]() {
      ExactDistribution d{2, {}};
      double total = 0.0;
      for (int s = 0; s < 4; ++s) {
        d.probs.push_back(rng.uniform01() + 1e-3);
        total += d.probs.back();
      }
      for (double& p : d.probs) p /= total;
      return d;
    };
    const ExactDistribution p = random_dist(), q = random_dist();
    CHECK(tv_distance(apply_kernel(p, k), apply_kernel(q, k)) <=
          eta * tv_distance(p, q) + 1e-12);
  }
}

TEST_CASE("theorem-2 constants for N=2 match the closed form") {
  const Model m = make_two_var_model(0.1);
  const Theorem2Constants c = theorem2_constants(m, {0, 1});
  CHECK(c.t_star == 2);
  CHECK(c.tau_star == 1);
  CHECK(c.pi_min == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
  CHECK(c.l == doctest::Approx(c.pi_min * c.pi_min).epsilon(1e-14));
  // B = pi_min^2 + 2^min(2,0) pi_min^0 + 2^min(2,1) pi_min^1
  CHECK(c.B ==
        doctest::Approx(c.pi_min * c.pi_min + 1.0 + 2.0 * c.pi_min).epsilon(1e-14));
  CHECK(c.eta == doctest::Approx(7.0 / 15.0).epsilon(1e-12));
  CHECK(c.lambda ==
        doctest::Approx(2.0 * 2.0 * (1.0 + c.eta) / (c.l * (1.0 - c.eta))));
  CHECK(c.T_star == doctest::Approx(2.0 * c.B / c.l));
}

TEST_CASE("theorem-2 constants for a single variable") {
  const Model m = build_model(1, {Factor{{0}, {1.0, 3.0}}});
  const Theorem2Constants c = theorem2_constants(m, {0});
  CHECK(c.eta == doctest::Approx(0.0));
  CHECK(c.pi_min == doctest::Approx(0.25));
  CHECK(c.l == doctest::Approx(0.25));
  CHECK(c.lambda == doctest::Approx(2.0 / 0.25));  // 2N(1+0)/(l(1-0))
}

TEST_CASE("tau* grows by a fixed increment when T doubles") {
  const Theorem2Constants c = theorem2_constants(make_two_var_model(0.1), {0, 1});
  const double inc = std::log(2.0) / std::log(2.0 / (1.0 + c.eta));
  for (double t : {128.0, 1024.0, 8192.0}) {
    CHECK(c.tau_star_of(2.0 * t) - c.tau_star_of(t) ==
          doctest::Approx(inc).epsilon(1e-12));
  }
}

TEST_CASE("theorem-2 constants reject non-positive joints") {
  const Model m = build_model(2, {Factor{{0, 1}, {0.0, 0.25, 0.25, 0.5}}});
  CHECK_THROWS_AS(theorem2_constants(m, {0, 1}), std::invalid_argument);
}

TEST_SUITE_END();
