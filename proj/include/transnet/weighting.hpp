#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "transnet/privacy.hpp"
#include "transnet/spectral.hpp"

namespace transnet {

// Estimated edge density of a debiased network. Debiased entries can be
// negative, so the raw estimate is floored at 1/(n(n-1)) (it later feeds a
// 1/rho^2 term); `clamped` records when the floor fired.
struct DensityEstimate {
  double value = 0.0;
  bool clamped = false;
};

inline DensityEstimate estimate_density(const DebiasedNetwork& a_hat) {
  const int n = a_hat.n();
  if (n < 2) throw std::invalid_argument("estimate_density: need n >= 2");
  const double pairs = static_cast<double>(n) * (n - 1);
  // Sum over ordered off-diagonal pairs; the diagonal is zero by construction.
  const double raw = (a_hat.mat.sum() - a_hat.mat.diagonal().sum()) / pairs;
  const double floor = 1.0 / pairs;
  if (raw < floor) return DensityEstimate{floor, true};
  return DensityEstimate{raw, false};
}

// Heterogeneity estimate between a source eigenspace and the target's.
inline double estimate_heterogeneity(const Eigenspace& u_l, const Eigenspace& u_0) {
  return projection_distance(u_l, u_0);
}

// Everything the weighting formulas need about one source network.
struct SourceStats {
  double rho_hat = 0.0;
  double e_theta_hat = 0.0;
  PrivacyParams params;
  int n = 0;
  int l = 0;
};

struct WeightVector {
  Vector w;

  int size() const { return static_cast<int>(w.size()); }

  void validate() const {
    if (w.size() < 1) throw std::invalid_argument("WeightVector: empty");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w(i) < 0.0) throw std::invalid_argument("WeightVector: negative weight");
      sum += w(i);
    }
    if (std::abs(sum - 1.0) > 1e-10) throw std::invalid_argument("WeightVector: weights must sum to 1");
  }
};

inline WeightVector equal_weights(int l_count) {
  if (l_count < 1) throw std::invalid_argument("equal_weights: need at least one source");
  Vector w = Vector::Constant(l_count, 1.0 / l_count);
  w /= w.sum();
  return WeightVector{std::move(w)};
}

// Normalized inverses: w_l proportional to 1/d_l. Uniform rescaling of d
// leaves the result unchanged.
inline WeightVector weights_from_inverse(const Vector& denominators) {
  if (denominators.size() < 1) throw std::invalid_argument("weights_from_inverse: empty");
  Vector w(denominators.size());
  for (Eigen::Index i = 0; i < denominators.size(); ++i) {
    if (!(denominators(i) > 0.0))
      throw std::logic_error("weights_from_inverse: nonpositive denominator");
    w(i) = 1.0 / denominators(i);
  }
  w /= w.sum();
  return WeightVector{std::move(w)};
}

namespace detail {

// Privacy-cost term [(q+q'-1)rho + 1-q'] * log(n) / (n rho^2); natural log.
inline double privacy_cost_term(const SourceStats& s) {
  const double bracket = (s.params.q + s.params.q_prime - 1.0) * s.rho_hat + 1.0 - s.params.q_prime;
  return bracket * std::log(static_cast<double>(s.n)) / (s.n * s.rho_hat * s.rho_hat);
}

inline void check_stats(const std::vector<SourceStats>& stats) {
  if (stats.empty()) throw std::invalid_argument("adaptive weights: need at least one source");
  for (const auto& s : stats) {
    if (s.n < 2) throw std::invalid_argument("adaptive weights: need n >= 2");
    if (!(s.rho_hat > 0.0))
      throw std::invalid_argument("adaptive weights: rho_hat must be positive (clamped upstream)");
    if (s.e_theta_hat < 0.0 || s.e_theta_hat > 1.0 + 1e-8)
      throw std::invalid_argument("adaptive weights: e_theta_hat out of [0,1]");
    s.params.validate_debiasable();
  }
}

}  // namespace detail

// Denominators of the theoretically derived weights: privacy cost plus
// heterogeneity term E^2*L plus the estimation-error term L/(n*rho).
inline Vector theoretical_weight_denominators(const std::vector<SourceStats>& stats,
                                              double rho_plugin) {
  detail::check_stats(stats);
  if (!(rho_plugin > 0.0))
    throw std::invalid_argument("theoretical weights: rho_plugin must be positive");
  const double l_count = static_cast<double>(stats.size());
  Vector d(static_cast<Eigen::Index>(stats.size()));
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    d(static_cast<Eigen::Index>(i)) = detail::privacy_cost_term(s) +
                                      s.e_theta_hat * s.e_theta_hat * l_count +
                                      l_count / (s.n * rho_plugin);
  }
  return d;
}

inline WeightVector adaptive_weights_theoretical(const std::vector<SourceStats>& stats,
                                                 double rho_plugin) {
  return weights_from_inverse(theoretical_weight_denominators(stats, rho_plugin));
}

// Constant-free variant: privacy and heterogeneity terms are each normalized
// by their maximum before being summed. A term whose maximum is zero carries
// no information about relative quality and is dropped.
inline Vector practical_weight_denominators(const std::vector<SourceStats>& stats) {
  detail::check_stats(stats);
  const double l_count = static_cast<double>(stats.size());
  const Eigen::Index m = static_cast<Eigen::Index>(stats.size());
  Vector a(m), b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = stats[static_cast<std::size_t>(i)];
    a(i) = detail::privacy_cost_term(s);
    b(i) = s.e_theta_hat * s.e_theta_hat * l_count;
  }
  const double a_max = a.maxCoeff();
  const double b_max = b.maxCoeff();
  Vector d = Vector::Zero(m);
  if (a_max > 0.0) d += a / a_max;
  if (b_max > 0.0) d += b / b_max;
  if (a_max <= 0.0 && b_max <= 0.0) d.setConstant(1.0);  // identical sources
  return d;
}

inline WeightVector adaptive_weights_practical(const std::vector<SourceStats>& stats) {
  return weights_from_inverse(practical_weight_denominators(stats));
}

}  // namespace transnet
