#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "transnet/netgen.hpp"
#include "transnet/privacy.hpp"

using namespace transnet;

namespace {

BinaryNetwork fixed_network(int n, std::uint64_t seed) {
  Matrix b(2, 2);
  b << 0.6, 0.15, 0.15, 0.6;
  return generate_sbm({balanced_membership(n, 2), b, 0}, seed);
}

}  // namespace

TEST_CASE("randomized response with q = q' = 1 is the identity") {
  const auto a = fixed_network(30, 1);
  const auto out = randomized_response(a, {1.0, 1.0}, 99);
  CHECK(out.adj == a.adj);
}

TEST_CASE("randomized response output is symmetric binary with zero diagonal") {
  const auto a = fixed_network(25, 2);
  const auto out = randomized_response(a, {0.8, 0.7}, 5);
  CHECK_NOTHROW(out.validate());
}

TEST_CASE("q = q' = 0.5 erases the input") {
  const auto a = fixed_network(40, 3);
  const int draws = 500;
  const double pairs = 40.0 * 39.0 / 2.0;
  double total = 0.0;
  for (int d = 0; d < draws; ++d)
    total += randomized_response(a, {0.5, 0.5}, 100 + static_cast<std::uint64_t>(d)).adj.sum() / 2.0;
  const double mean_density = total / (draws * pairs);
  const double se = std::sqrt(0.25 / (pairs * draws));
  CHECK(std::abs(mean_density - 0.5) <= 3.0 * se);
}

TEST_CASE("empirical flip rates match q and q'") {
  const auto a = fixed_network(50, 4);
  const PrivacyParams params{0.9, 0.8};
  const int draws = 500;
  long ones = 0, zeros = 0, kept_ones = 0, kept_zeros = 0;
  for (int i = 0; i < 50; ++i) {
    for (int j = i + 1; j < 50; ++j) (a.adj(i, j) != 0.0 ? ones : zeros) += 1;
  }
  for (int d = 0; d < draws; ++d) {
    const auto out = randomized_response(a, params, 4242 + static_cast<std::uint64_t>(d));
    for (int i = 0; i < 50; ++i) {
      for (int j = i + 1; j < 50; ++j) {
        if (a.adj(i, j) != 0.0 && out.adj(i, j) != 0.0) ++kept_ones;
        if (a.adj(i, j) == 0.0 && out.adj(i, j) == 0.0) ++kept_zeros;
      }
    }
  }
  const double p1 = static_cast<double>(kept_ones) / (static_cast<double>(ones) * draws);
  const double p0 = static_cast<double>(kept_zeros) / (static_cast<double>(zeros) * draws);
  const double se1 = std::sqrt(0.9 * 0.1 / (static_cast<double>(ones) * draws));
  const double se0 = std::sqrt(0.8 * 0.2 / (static_cast<double>(zeros) * draws));
  CHECK(std::abs(p1 - 0.9) <= 3.0 * se1);
  CHECK(std::abs(p0 - 0.8) <= 3.0 * se0);
}

TEST_CASE("debias recovers the exact two-point values") {
  SECTION("q = q' = 1 is the identity") {
    const auto a = fixed_network(20, 5);
    const auto out = debias(a, {1.0, 1.0});
    CHECK(out.mat == a.adj);
  }
  SECTION("q = q' = 0.9 maps 1 -> 1.125 and 0 -> -0.125") {
    BinaryNetwork a;
    a.adj = Matrix::Zero(3, 3);
    a.adj(0, 1) = a.adj(1, 0) = 1.0;
    const auto out = debias(a, {0.9, 0.9});
    CHECK(out.mat(0, 1) == Catch::Approx(1.125).epsilon(1e-12));
    CHECK(out.mat(0, 2) == Catch::Approx(-0.125).epsilon(1e-12));
    CHECK(out.mat(1, 1) == 0.0);
  }
  SECTION("q + q' <= 1 is a hard error") {
    const auto a = fixed_network(10, 6);
    CHECK_THROWS_AS(debias(a, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(debias(a, {0.3, 0.6}), std::invalid_argument);
  }
}

TEST_CASE("debias is conditionally unbiased (Monte Carlo)") {
  const auto a = fixed_network(20, 7);
  const PrivacyParams params{0.8, 0.8};
  const int draws = 1000;
  Matrix mean = Matrix::Zero(20, 20);
  for (int d = 0; d < draws; ++d)
    mean += debias(randomized_response(a, params, 31337 + static_cast<std::uint64_t>(d)), params).mat;
  mean /= static_cast<double>(draws);
  // Every off-diagonal entry has variance p(1-p)/0.36 with p in {0.2, 0.8}.
  const double se = std::sqrt((0.16 / 0.36) / draws);
  int within = 0, total = 0;
  double max_dev = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) {
      const double dev = std::abs(mean(i, j) - a.adj(i, j));
      max_dev = std::max(max_dev, dev);
      within += dev <= 3.0 * se ? 1 : 0;
      ++total;
    }
  }
  // 3-sigma coverage with 190 simultaneous entries: demand 99% inside the
  // band and nothing pathologically far out.
  CHECK(static_cast<double>(within) / total >= 0.99);
  CHECK(max_dev <= 5.0 * se);
}

TEST_CASE("mean debiased density tracks the true density") {
  const auto a = fixed_network(30, 8);
  const PrivacyParams params{0.85, 0.85};
  const int draws = 400;
  double total = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto hat = debias(randomized_response(a, params, 555 + static_cast<std::uint64_t>(d)), params);
    total += hat.mat.sum() / (30.0 * 29.0);
  }
  const double truth = a.density();
  // Each debiased entry has variance at most 0.25/(q+q'-1)^2.
  const double pairs = 30.0 * 29.0 / 2.0;
  const double se = std::sqrt(2.0 * (0.25 / 0.49) / (pairs * 2.0) / draws);
  CHECK(std::abs(total / draws - truth) <= 4.0 * se);
}

TEST_CASE("epsilon_to_q") {
  CHECK(epsilon_to_q(std::log(19.0)).q == Catch::Approx(0.95).epsilon(1e-12));
  CHECK(epsilon_to_q(50.0).q > 0.999999);
  CHECK(epsilon_to_q(1e-9).q == Catch::Approx(0.5).margin(1e-9));
  CHECK_THROWS_AS(epsilon_to_q(0.0), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_to_q(-1.0), std::invalid_argument);
}

TEST_CASE("q_to_epsilon evaluates the four-ratio bound") {
  CHECK(q_to_epsilon({0.5, 0.5}) == Catch::Approx(0.0).margin(1e-15));
  CHECK(q_to_epsilon({0.95, 0.95}) == Catch::Approx(std::log(19.0)).epsilon(1e-14));
  // Asymmetric parameters: the binding ratio is q'/(1-q) = 6.
  CHECK(q_to_epsilon({0.9, 0.6}) == Catch::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK_THROWS_AS(q_to_epsilon({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(q_to_epsilon({1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(q_to_epsilon({0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("epsilon/q round trip is exact for the symmetric choice") {
  for (double eps : {0.5, 1.0, 3.0}) {
    CHECK(std::abs(q_to_epsilon(epsilon_to_q(eps)) - eps) <= 1e-12);
  }
}

TEST_CASE("privacy accounting is monotone") {
  double prev_q = 0.0;
  for (double eps : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double q = epsilon_to_q(eps).q;
    CHECK(q > prev_q);
    prev_q = q;
  }
  double prev_eps = -1.0;
  for (double q : {0.55, 0.7, 0.9, 0.99}) {
    const double eps = q_to_epsilon({q, q});
    CHECK(eps > prev_eps);
    prev_eps = eps;
  }
}
