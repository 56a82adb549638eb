#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "transnet/network.hpp"
#include "transnet/rng.hpp"

namespace transnet {

// Edge-preserving probabilities of the randomized response mechanism:
// q = P(1 -> 1), q_prime = P(0 -> 0). Debiasing additionally needs
// q + q_prime > 1; the mechanism itself is defined for the whole unit square.
struct PrivacyParams {
  double q = 1.0;
  double q_prime = 1.0;

  void validate() const {
    if (!(q >= 0.0 && q <= 1.0) || !(q_prime >= 0.0 && q_prime <= 1.0))
      throw std::invalid_argument("PrivacyParams: q and q_prime must lie in [0,1]");
  }

  void validate_debiasable() const {
    validate();
    if (!(q + q_prime > 1.0))
      throw std::invalid_argument("PrivacyParams: debiasing requires q + q_prime > 1");
  }
};

// Entrywise randomized response on the upper triangle, mirrored to keep the
// output symmetric; diagonal stays zero.
inline BinaryNetwork randomized_response(const BinaryNetwork& a, PrivacyParams params,
                                         std::uint64_t seed) {
  params.validate();
  const int n = a.n();
  BinaryNetwork out;
  out.adj = Matrix::Zero(n, n);
  RandomStream rs(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double v;
      if (a.adj(i, j) != 0.0) {
        v = rs.bernoulli(params.q) ? 1.0 : 0.0;
      } else {
        v = rs.bernoulli(params.q_prime) ? 0.0 : 1.0;
      }
      out.adj(i, j) = v;
      out.adj(j, i) = v;
    }
  }
  return out;
}

// Bias-adjusted release: symmetric real matrix whose off-diagonal entries
// take one of two values determined by the privacy parameters.
struct DebiasedNetwork {
  Matrix mat;
  PrivacyParams params;

  int n() const { return static_cast<int>(mat.rows()); }
};

// Conditionally unbiased correction of a randomized-response output:
// off-diagonal entries map to (a - (1 - q')) / (q + q' - 1); the diagonal is
// set to exactly zero (the diag correction cancels there anyway).
inline DebiasedNetwork debias(const BinaryNetwork& a_tilde, PrivacyParams params) {
  params.validate_debiasable();
  const int n = a_tilde.n();
  const double denom = params.q + params.q_prime - 1.0;
  const double shift = 1.0 - params.q_prime;
  DebiasedNetwork out;
  out.params = params;
  out.mat = (a_tilde.adj.array() - shift) / denom;
  out.mat.diagonal().setZero();
  return out;
}

// Symmetric parameter choice achieving eps-edge-DP: q = q' = e^eps/(1+e^eps).
inline PrivacyParams epsilon_to_q(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon_to_q: eps must be positive");
  const double q = 1.0 / (1.0 + std::exp(-eps));
  return PrivacyParams{q, q};
}

// Edge-DP budget of the mechanism: log of the largest of the four likelihood
// ratios. Undefined when any ratio has a zero denominator.
inline double q_to_epsilon(PrivacyParams params) {
  params.validate();
  const double q = params.q;
  const double qp = params.q_prime;
  if (q == 1.0 || qp == 1.0)
    throw std::invalid_argument("q_to_epsilon: ratio undefined at q = 1 or q_prime = 1");
  if (q == 0.0 || qp == 0.0)
    throw std::invalid_argument("q_to_epsilon: ratio undefined at q = 0 or q_prime = 0");
  const double r = std::max(std::max(qp / (1.0 - q), (1.0 - q) / qp),
                            std::max((1.0 - qp) / q, q / (1.0 - qp)));
  return std::log(r);
}

}  // namespace transnet
