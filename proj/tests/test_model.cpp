#include <doctest.h>

#include <sstream>

#include "herdgibbs/model.hpp"
#include "herdgibbs/oracle.hpp"
#include "test_util.hpp"

using namespace herdgibbs;

TEST_SUITE_BEGIN("model");

TEST_CASE("single unary factor normalizes to 3/4") {
  const Model m = build_model(1, {Factor{{0}, {1.0, 3.0}}});
  CHECK(full_conditional(m, 0, {0}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("two-var table-1 model has the right blanket") {
  const Model m = make_two_var_model(0.1);
  REQUIRE(m.blanket(0).size() == 1);
  CHECK(m.blanket(0)[0] == 1);
  CHECK(m.blanket(1)[0] == 0);
}

TEST_CASE("build_model rejects invalid factors") {
  CHECK_THROWS_AS(build_model(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_model(2, {Factor{{0, 5}, {1, 1, 1, 1}}}),
                  std::invalid_argument);  // scope out of range
  CHECK_THROWS_AS(build_model(1, {Factor{{0}, {1.0, -0.5}}}),
                  std::invalid_argument);  // negative entry
  CHECK_THROWS_AS(build_model(1, {Factor{{0}, {0.0, 0.0}}}),
                  std::invalid_argument);  // all-zero table
  CHECK_THROWS_AS(build_model(1, {Factor{{0}, {1.0, 2.0, 3.0}}}),
                  std::invalid_argument);  // bad table length
  CHECK_THROWS_AS(build_model(2, {Factor{{0}, {1.0, 2.0}}}),
                  std::invalid_argument);  // variable 1 uncovered
  CHECK_THROWS_AS(build_model(2, {Factor{{0, 0}, {1, 1, 1, 1}}}),
                  std::invalid_argument);  // duplicate scope entry
}

TEST_CASE("two-var conditionals match row normalization of the joint") {
  // oracle: normalize the X2 = 0 and X2 = 1 rows of the table-1 joint
  const double eps = 0.1;
  const double row0 = eps / (0.25 - eps + eps);         // = eps / 0.25
  const double row1 = (0.75 - eps) / (eps + 0.75 - eps);
  const Model m = make_two_var_model(eps);
  CHECK(full_conditional(m, 0, {0, 0}) == doctest::Approx(row0).epsilon(1e-14));
  CHECK(full_conditional(m, 0, {1, 0}) == doctest::Approx(row0).epsilon(1e-14));
  CHECK(full_conditional(m, 0, {0, 1}) == doctest::Approx(row1).epsilon(1e-14));
  CHECK(row1 == doctest::Approx(1.0 - 4.0 * 0.1 / 3.0).epsilon(1e-14));
}

TEST_CASE("cancelling neighbor spins with no observation give 1/2") {
  // 4-neighbor star with homogeneous couplings, no unary terms beyond flat
  const double j = 0.7;
  const double agree = std::exp(j), disagree = std::exp(-j);
  std::vector<Factor> factors;
  for (VariableId nb : {1u, 2u, 3u, 4u})
    factors.push_back(Factor{{0, nb}, {agree, disagree, disagree, agree}});
  const Model m = build_model(5, std::move(factors));
  CHECK(full_conditional(m, 0, {0, 1, 0, 1, 0}) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("zero-mass blanket raises undefined conditional") {
  // the X1 = 0 column carries no mass for either value of X0
  const Model m = build_model(2, {Factor{{0, 1}, {0.0, 0.0, 0.4, 0.6}}});
  CHECK_THROWS_AS(full_conditional(m, 0, {0, 0}), UndefinedConditionalError);
  CHECK_THROWS_AS(full_conditional(m, 0, {1, 0}), UndefinedConditionalError);
  CHECK(full_conditional(m, 0, {0, 1}) == doctest::Approx(0.6));
}

TEST_CASE("in_support") {
  const Model pos = make_two_var_model(0.1);
  CHECK(in_support(pos, {0, 0}));
  CHECK(in_support(pos, {1, 1}));  // table-1 entry 3/4 - eps > 0

  const Model gap = build_model(2, {Factor{{0, 1}, {0.0, 0.2, 0.3, 0.5}}});
  CHECK_FALSE(in_support(gap, {0, 0}));
  CHECK(in_support(gap, {1, 0}));
}

TEST_CASE("make_two_var_model validates epsilon and pins the joint") {
  CHECK_THROWS_AS(make_two_var_model(0.3), std::invalid_argument);
  CHECK_THROWS_AS(make_two_var_model(0.25), std::invalid_argument);
  CHECK_THROWS_AS(make_two_var_model(0.0), std::invalid_argument);

  const Model m = make_two_var_model(0.1);
  const ExactDistribution d = enumerate_joint(m);
  CHECK(d.probs[0] == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(d.probs[1] == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(d.probs[2] == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(d.probs[3] == doctest::Approx(0.65).epsilon(1e-15));
  const std::vector<double> marg = exact_marginals(d);
  CHECK(marg[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(marg[1] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("conditional complement sums to one") {
  Xoshiro256StarStar rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const Model m = test::random_positive_model(rng);
    const Assignment x = test::random_assignment(rng, m.num_vars());
    for (VariableId i = 0; i < m.num_vars(); ++i) {
      const double p1 = full_conditional(m, i, x);
      const double p1_brute = test::brute_conditional(m, i, x);
      CHECK(std::abs(p1 - p1_brute) <= 1e-12);
      // probability of X_i = 0 computed the same way
      Assignment flipped = x;
      double u0 = 1.0, u1 = 1.0;
      for (const Factor& f : m.factors()) {
        bool touches = false;
        for (VariableId v : f.scope) touches = touches || v == i;
        if (!touches) continue;
        flipped[i] = 0;
        u0 *= f.table[factor_index(f, flipped)];
        flipped[i] = 1;
        u1 *= f.table[factor_index(f, flipped)];
      }
      const double p0 = u0 / (u0 + u1);
      CHECK(std::abs(p1 + p0 - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("conditional ignores bits outside the blanket") {
  Xoshiro256StarStar rng(202);
  for (int trial = 0; trial < 40; ++trial) {
    const Model m = test::random_positive_model(rng);
    Assignment x = test::random_assignment(rng, m.num_vars());
    for (VariableId i = 0; i < m.num_vars(); ++i) {
      const double base = full_conditional(m, i, x);
      const std::vector<VariableId>& blanket = m.blanket(i);
      for (VariableId j = 0; j < m.num_vars(); ++j) {
        if (j == i) continue;
        bool in_blanket = false;
        for (VariableId b : blanket) in_blanket = in_blanket || b == j;
        if (in_blanket) continue;
        Assignment y = x;
        y[j] ^= 1;
        CHECK(std::abs(full_conditional(m, i, y) - base) <= 1e-12);
      }
    }
  }
}

TEST_CASE("conditionals match exact enumeration on small models") {
  Xoshiro256StarStar rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const Model m = test::random_positive_model(rng);
    const ExactDistribution joint = enumerate_joint(m);
    const std::uint32_t n = m.num_vars();
    Assignment x(n, 0);
    for (std::uint64_t s = 0; s < joint.probs.size(); ++s) {
      for (std::uint32_t i = 0; i < n; ++i) x[i] = (s >> i) & 1;
      for (VariableId i = 0; i < n; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        const double from_joint =
            joint.probs[s | bit] / (joint.probs[s & ~bit] + joint.probs[s | bit]);
        CHECK(std::abs(from_joint - full_conditional(m, i, x)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("rescaling factor tables leaves conditionals unchanged") {
  Xoshiro256StarStar rng(404);
  const Model m = test::random_positive_model(rng);
  std::vector<Factor> scaled = m.factors();
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    const double c = 0.5 + 3.0 * rng.uniform01();
    for (double& t : scaled[k].table) t *= c;
  }
  const Model ms = build_model(m.num_vars(), std::move(scaled));
  for (int trial = 0; trial < 20; ++trial) {
    const Assignment x = test::random_assignment(rng, m.num_vars());
    for (VariableId i = 0; i < m.num_vars(); ++i) {
      CHECK(std::abs(full_conditional(m, i, x) - full_conditional(ms, i, x)) <=
            1e-12);
    }
  }
}

TEST_CASE("model text round-trip") {
  Xoshiro256StarStar rng(505);
  for (int trial = 0; trial < 10; ++trial) {
    const Model m = test::random_positive_model(rng);
    const Model back = parse_model(serialize_model(m));
    REQUIRE(back.num_vars() == m.num_vars());
    REQUIRE(back.factors().size() == m.factors().size());
    for (std::size_t f = 0; f < m.factors().size(); ++f) {
      CHECK(back.factors()[f].scope == m.factors()[f].scope);
      CHECK(back.factors()[f].table == m.factors()[f].table);  // %.17g exact
    }
  }
}

TEST_CASE("model parser accepts comments and rejects junk") {
  const Model m = parse_model(
      "# header comment\n"
      "vars 2\n"
      "factor 2 0 1  # scope\n"
      "0.15 0.1 0.1 0.65\n");
  CHECK(m.num_vars() == 2);
  CHECK(full_conditional(m, 0, {0, 0}) == doctest::Approx(0.4));

  CHECK_THROWS_AS(parse_model("vars"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("vars two"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("vars 1\nfactor 1 0\n1.0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("vars 1\nfactory 1 0\n1 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("vars 1\nfactor 1 0\n1 x"), std::invalid_argument);
}

TEST_SUITE_END();
