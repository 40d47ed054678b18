#include <doctest.h>

#include <random>

#include "infoloss/finite_info.hpp"
#include "oracles.hpp"

using namespace infoloss;

namespace {

std::vector<std::vector<double>> as_rows(const DiscreteJoint& j) {
  std::vector<std::vector<double>> out(j.rows());
  for (std::size_t r = 0; r < j.rows(); ++r) out[r].assign(j.row(r).begin(), j.row(r).end());
  return out;
}

DiscreteJoint random_joint(std::mt19937_64& g, std::size_t rows, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(rows * m);
  double s = 0.0;
  for (auto& x : w) s += (x = u(g) < 0.2 ? 0.0 : u(g));
  for (auto& x : w) x /= s;
  return DiscreteJoint(rows, m, w);
}

}  // namespace

TEST_CASE("pmf validation") {
  CHECK_NOTHROW(Pmf({0.5, 0.5}));
  CHECK_NOTHROW(Pmf({0.5, 0.5 + 5e-13}));
  CHECK_THROWS_AS(Pmf({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(Pmf({1.2, -0.2}), ValidationError);
  CHECK_THROWS_AS(Pmf({NAN, 1.0}), ValidationError);
  CHECK_THROWS_AS(Pmf(std::vector<double>{}), ValidationError);
  const Pmf p({0.5, 0.5 + 5e-13});
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mode breaks ties toward the smallest label") {
  CHECK(Pmf({0.25, 0.375, 0.375}).mode() == 1);
  CHECK(Pmf::uniform(4).mode() == 0);
  CHECK(Pmf::degenerate(3, 2).mode() == 2);
}

TEST_CASE("entropy special values") {
  CHECK(entropy(Pmf::degenerate(5, 3)) == 0.0);
  CHECK(entropy(Pmf::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(oracle::kLn2));
  CHECK(prior_error(Pmf({0.7, 0.2, 0.1})) == doctest::Approx(0.3));
}

TEST_CASE("independent joint has zero information and prior-level error") {
  const DiscreteJoint j(2, 2, {0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4});
  CHECK(std::abs(mutual_information(j)) < 1e-15);
  CHECK(bayes_error(j) == doctest::Approx(0.4));
  CHECK(conditional_entropy(j) == doctest::Approx(entropy(Pmf({0.6, 0.4}))));
}

TEST_CASE("deterministic label gives I = H(Y) and zero error") {
  const DiscreteJoint j(3, 3, {0.2, 0, 0, 0, 0.5, 0, 0, 0, 0.3});
  CHECK(mutual_information(j) == doctest::Approx(entropy(Pmf({0.2, 0.5, 0.3}))).epsilon(1e-14));
  CHECK(bayes_error(j) == 0.0);
  CHECK(conditional_entropy(j) == 0.0);
}

TEST_CASE("from_counts normalizes") {
  const std::vector<double> c{1, 3, 2, 2};
  const DiscreteJoint j = DiscreteJoint::from_counts(2, 2, c);
  CHECK(j(0, 1) == doctest::Approx(0.375));
  CHECK(j.row_posterior(1)[0] == doctest::Approx(0.5));
}

TEST_CASE("functionals agree with direct-sum oracles on random joints") {
  std::mt19937_64 g(7);
  for (int t = 0; t < 200; ++t) {
    const DiscreteJoint j = random_joint(g, 1 + t % 9, 2 + t % 4);
    const auto rows = as_rows(j);
    CHECK(mutual_information(j) == doctest::Approx(oracle::mutual_information(rows)).epsilon(1e-12));
    CHECK(bayes_error(j) == doctest::Approx(oracle::bayes_error(rows)).epsilon(1e-12));
    // I(U;Y) = H(Y) - H(Y|U)
    CHECK(mutual_information(j) ==
          doctest::Approx(entropy(j.label_marginal()) - conditional_entropy(j)).epsilon(1e-12));
    CHECK(mutual_information(j) >= -1e-15);
    CHECK(bayes_error(j) <= prior_error(j.label_marginal()) + 1e-15);
  }
}

TEST_CASE("merging rows never increases information and never decreases error") {
  std::mt19937_64 g(11);
  for (int t = 0; t < 200; ++t) {
    const DiscreteJoint j = random_joint(g, 2 + t % 6, 2 + t % 3);
    const DiscreteJoint merged = j.merge_rows(0, j.rows() - 1);
    CHECK(merged.rows() == j.rows() - 1);
    CHECK(mutual_information(merged) <= mutual_information(j) + 1e-14);
    CHECK(bayes_error(merged) >= bayes_error(j) - 1e-14);
  }
}

TEST_CASE("Fano: H(Y|U) <= h(err) + err ln(M-1)") {
  std::mt19937_64 g(13);
  for (int t = 0; t < 300; ++t) {
    const std::size_t m = 2 + t % 5;
    const DiscreteJoint j = random_joint(g, 1 + t % 7, m);
    CHECK(conditional_entropy(j) <= fano_upper(bayes_error(j), m) + 1e-12);
  }
}

TEST_CASE("conditional information chain rule") {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> w(2 * 3 * 2);
    double s = 0.0;
    for (auto& x : w) s += (x = u(g));
    for (auto& x : w) x /= s;
    const Joint3 j3(2, 3, 2, w);
    const double c = conditional_mi(j3);
    CHECK(c == doctest::Approx(mutual_information(j3.pair_joint()) - mutual_information(j3.b_joint())));
    CHECK(c >= -1e-14);
  }
}
