#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "transnet/dataio.hpp"
#include "transnet/federation.hpp"
#include "transnet/kmeans.hpp"
#include "transnet/netgen.hpp"
#include "transnet/privacy.hpp"
#include "transnet/spectral.hpp"
#include "transnet/weighting.hpp"

namespace transnet {

enum class WeightingMode { kEqual, kAdaptivePractical, kAdaptiveTheoretical };

inline const char* to_string(WeightingMode mode) {
  switch (mode) {
    case WeightingMode::kEqual: return "equal";
    case WeightingMode::kAdaptivePractical: return "adaptive_practical";
    case WeightingMode::kAdaptiveTheoretical: return "adaptive_theoretical";
  }
  return "?";
}

struct PipelineConfig {
  int k = 3;
  WeightingMode weighting = WeightingMode::kAdaptivePractical;
  bool lambda_cv = true;                                        // otherwise lambda_fixed is used
  double lambda_fixed = 0.0;
  std::vector<double> lambda_grid = {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  int cv_folds = 5;
  bool debias = true;  // disabling skips the bias adjustment everywhere
  int kmeans_restarts = 20;
  std::uint64_t seed = 0;
  EigenOrder order = EigenOrder::kAbsDescending;

  void validate() const {
    if (k < 2) throw std::invalid_argument("PipelineConfig: need k >= 2");
    if (lambda_cv && lambda_grid.empty())
      throw std::invalid_argument("PipelineConfig: empty lambda grid");
    if (!lambda_cv && lambda_fixed < 0.0)
      throw std::invalid_argument("PipelineConfig: lambda must be >= 0");
    for (double v : lambda_grid) {
      if (v < 0.0) throw std::invalid_argument("PipelineConfig: grid lambdas must be >= 0");
    }
    if (cv_folds < 2) throw std::invalid_argument("PipelineConfig: need cv_folds >= 2");
    if (kmeans_restarts < 1) throw std::invalid_argument("PipelineConfig: need restarts >= 1");
  }
};

struct Diagnostics {
  std::vector<std::string> lines;

  void add(std::string line) { lines.push_back(std::move(line)); }

  std::string text() const {
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

struct PipelineResult {
  Eigenspace regularized_space;
  Eigenspace aggregated_space;
  Eigenspace target_space;
  std::vector<int> labels;
  WeightVector weights;        // empty when there are no sources
  double lambda_selected = 0.0;
  Diagnostics diagnostics;
};

struct Step1Result {
  Eigenspace aggregated;
  WeightVector weights;
  std::vector<SourceStats> stats;
};

// Step 1 of the pipeline: Procrustes-align every source eigenspace to the
// target's, weight them by the chosen strategy, aggregate and orthogonalize.
// Heterogeneity estimates are computed here, coordinator side, because they
// need the target eigenspace. rho_plugin feeds the theoretical weights only.
inline Step1Result step1_aggregate(const std::vector<SourceSummary>& summaries,
                                   const Eigenspace& target_space, WeightingMode mode,
                                   double rho_plugin = std::numeric_limits<double>::quiet_NaN()) {
  if (summaries.empty()) throw std::invalid_argument("step1_aggregate: need at least one summary");
  const int n = target_space.n();
  const int k = target_space.k();

  Step1Result out;
  std::vector<Eigenspace> spaces;
  std::vector<Rotation> rotations;
  spaces.reserve(summaries.size());
  rotations.reserve(summaries.size());
  for (const auto& s : summaries) {
    if (s.n != n || s.k != k)
      throw std::invalid_argument("step1_aggregate: summary dimensions do not match target");
    spaces.push_back(s.eigenspace);
    rotations.push_back(procrustes_align(s.eigenspace, target_space));
    out.stats.push_back(SourceStats{s.rho_hat, estimate_heterogeneity(s.eigenspace, target_space),
                                    s.params, s.n, s.l});
  }

  switch (mode) {
    case WeightingMode::kEqual:
      out.weights = equal_weights(static_cast<int>(summaries.size()));
      break;
    case WeightingMode::kAdaptivePractical:
      out.weights = adaptive_weights_practical(out.stats);
      break;
    case WeightingMode::kAdaptiveTheoretical:
      out.weights = adaptive_weights_theoretical(out.stats, rho_plugin);
      break;
  }
  out.aggregated = weighted_aggregate(spaces, rotations, out.weights.w);
  return out;
}

// Explicit value of the regularization objective
//   tr(V^T U0 U0^T V) - (lambda/2) ||VV^T - Ubar Ubar^T||_F^2,
// evaluated through k-by-k products.
inline double regularization_objective(const Eigenspace& v, const Eigenspace& target_space,
                                       const Eigenspace& aggregated_space, double lambda) {
  const double fit = (target_space.basis.transpose() * v.basis).squaredNorm();
  const double overlap = (aggregated_space.basis.transpose() * v.basis).squaredNorm();
  const double penalty = 2.0 * v.k() - 2.0 * overlap;
  return fit - 0.5 * lambda * penalty;
}

// Ridge-type combination of the target eigenspace with the aggregated one:
// the top-k eigenvectors of U0 U0^T + lambda Ubar Ubar^T, computed inside the
// joint span of the two bases (dimension at most 2k) and mapped back.
inline Eigenspace regularize(const Eigenspace& target_space, const Eigenspace& aggregated_space,
                             double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("regularize: lambda must be >= 0");
  if (target_space.n() != aggregated_space.n() || target_space.k() != aggregated_space.k())
    throw std::invalid_argument("regularize: dimension mismatch");
  if (lambda == 0.0) return target_space;  // objective reduces to the spectral term

  const int n = target_space.n();
  const int k = target_space.k();
  Matrix joint(n, 2 * k);
  joint.leftCols(k) = target_space.basis;
  joint.rightCols(k) = aggregated_space.basis;

  Eigen::JacobiSVD<Matrix> svd(joint, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-10 * sv.maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  rank = std::max(rank, k);
  const Matrix q = svd.matrixU().leftCols(rank);

  const Matrix c0 = q.transpose() * target_space.basis;    // rank x k
  const Matrix c1 = q.transpose() * aggregated_space.basis;
  const Matrix small = c0 * c0.transpose() + lambda * (c1 * c1.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(small);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("regularize: eigendecomposition failed to converge");
  Matrix y(rank, k);
  for (int c = 0; c < k; ++c) y.col(c) = solver.eigenvectors().col(rank - 1 - c);

  Eigenspace out{q * y};
  detail::apply_sign_convention(out.basis);
  return out;
}

struct CvResult {
  double lambda = 0.0;
  std::vector<double> mean_scores;  // per grid entry, same order as the grid
};

// Edge-holdout cross validation for lambda. Node pairs are partitioned into
// folds; the training matrix rescales held-in entries by 1/(1 - 1/folds).
// Each candidate lambda is scored by block-mean reconstruction error on the
// held-out pairs; ties go to the smaller lambda.
inline CvResult select_lambda_cv(const DebiasedNetwork& a_hat_0,
                                 const Eigenspace& aggregated_space, int k,
                                 const std::vector<double>& grid, int folds, std::uint64_t seed,
                                 EigenOrder order = EigenOrder::kAbsDescending,
                                 int kmeans_restarts = 20) {
  if (grid.empty()) throw std::invalid_argument("select_lambda_cv: empty grid");
  if (folds < 2) throw std::invalid_argument("select_lambda_cv: need folds >= 2");
  const int n = a_hat_0.n();

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  RandomStream rs(derive_seed(seed, {kStreamCvMask}));
  rs.shuffle(pairs);

  std::vector<double> scores(grid.size(), 0.0);
  const double inflate = 1.0 / (1.0 - 1.0 / static_cast<double>(folds));
  for (int f = 0; f < folds; ++f) {
    const std::size_t begin = pairs.size() * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
    const std::size_t end = pairs.size() * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(folds);

    Matrix train = a_hat_0.mat * inflate;
    for (std::size_t p = begin; p < end; ++p) {
      const auto [i, j] = pairs[p];
      train(i, j) = 0.0;
      train(j, i) = 0.0;
    }
    const Eigenspace target_f = top_k_eigvecs(train, k, order).space;

    // Block means use the raw held-in entries (the inflation only unbiases
    // the training matrix spectrum).
    double global_sum = 0.0;
    long global_count = 0;
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
      if (idx >= begin && idx < end) continue;
      const auto [i, j] = pairs[idx];
      global_sum += a_hat_0.mat(i, j);
      ++global_count;
    }
    const double global_mean = global_count > 0 ? global_sum / static_cast<double>(global_count) : 0.0;

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const Eigenspace v = regularize(target_f, aggregated_space, grid[gi]);
      // Seed by the lambda value, not the grid position, so duplicated grid
      // entries score identically and the tie rule is well defined.
      const auto clusters = cluster_kmeans(
          v.basis, k,
          derive_seed(seed, {kStreamCvMask, static_cast<std::uint64_t>(f),
                             std::bit_cast<std::uint64_t>(grid[gi])}),
          KmeansOptions{kmeans_restarts, 100, 1e-8});

      Matrix block_sum = Matrix::Zero(k, k);
      Matrix block_count = Matrix::Zero(k, k);
      for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        if (idx >= begin && idx < end) continue;
        const auto [i, j] = pairs[idx];
        const int a = clusters.labels[static_cast<std::size_t>(i)];
        const int b = clusters.labels[static_cast<std::size_t>(j)];
        block_sum(a, b) += a_hat_0.mat(i, j);
        block_count(a, b) += 1.0;
        if (a != b) {
          block_sum(b, a) += a_hat_0.mat(i, j);
          block_count(b, a) += 1.0;
        }
      }
      Matrix block_mean(k, k);
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          block_mean(a, b) =
              block_count(a, b) > 0.0 ? block_sum(a, b) / block_count(a, b) : global_mean;
        }
      }

      double score = 0.0;
      for (std::size_t p = begin; p < end; ++p) {
        const auto [i, j] = pairs[p];
        const double predicted = block_mean(clusters.labels[static_cast<std::size_t>(i)],
                                            clusters.labels[static_cast<std::size_t>(j)]);
        const double diff = a_hat_0.mat(i, j) - predicted;
        score += diff * diff;
      }
      scores[gi] += score;
    }
  }

  CvResult out;
  out.mean_scores.resize(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi)
    out.mean_scores[gi] = scores[gi] / static_cast<double>(folds);

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    if (out.mean_scores[gi] < out.mean_scores[best] ||
        (out.mean_scores[gi] == out.mean_scores[best] && grid[gi] < grid[best])) {
      best = gi;
    }
  }
  out.lambda = grid[best];
  return out;
}

namespace detail {

inline DebiasedNetwork target_matrix(const Scenario& scenario, bool debias_flag) {
  if (debias_flag) return debias(scenario.target, scenario.target_params);
  return DebiasedNetwork{scenario.target.adj, scenario.target_params};
}

inline std::vector<SourceSummary> compute_summaries(const Scenario& scenario, int k,
                                                    bool debias_flag, EigenOrder order) {
  std::vector<SourceSummary> summaries;
  summaries.reserve(scenario.sources.size());
  for (int l = 0; l < scenario.l_count(); ++l) {
    auto s = local_site_compute(scenario.sources[static_cast<std::size_t>(l)],
                                scenario.source_params[static_cast<std::size_t>(l)], k,
                                debias_flag, order);
    s.l = l + 1;
    summaries.push_back(std::move(s));
  }
  return summaries;
}

inline std::string weights_line(const WeightVector& w) {
  std::string line = "weights:";
  for (Eigen::Index i = 0; i < w.w.size(); ++i) line += " " + format_double(w.w(i));
  return line;
}

}  // namespace detail

// Full pipeline: debias, per-layer eigenspaces, weighted aggregation,
// lambda selection, regularization, k-means. With no sources the pipeline
// degenerates to spectral clustering of the target.
inline PipelineResult run_transnet(const Scenario& scenario, const PipelineConfig& config) {
  config.validate();
  const int k = config.k;

  PipelineResult result;
  const DebiasedNetwork a0 = detail::target_matrix(scenario, config.debias);
  result.target_space = top_k_eigvecs(a0.mat, k, config.order).space;
  const DensityEstimate rho0 = estimate_density(a0);
  if (rho0.clamped) result.diagnostics.add("target density clamped to floor");

  const auto summaries = detail::compute_summaries(scenario, k, config.debias, config.order);
  if (summaries.empty()) {
    result.aggregated_space = result.target_space;
    result.diagnostics.add("no sources: aggregated space = target space");
  } else {
    auto step1 = step1_aggregate(summaries, result.target_space, config.weighting, rho0.value);
    result.aggregated_space = std::move(step1.aggregated);
    result.weights = std::move(step1.weights);
    result.diagnostics.add(std::string("weighting: ") + to_string(config.weighting));
    result.diagnostics.add(detail::weights_line(result.weights));
  }

  if (config.lambda_cv) {
    const auto cv = select_lambda_cv(a0, result.aggregated_space, k, config.lambda_grid,
                                     config.cv_folds, config.seed, config.order,
                                     config.kmeans_restarts);
    result.lambda_selected = cv.lambda;
    std::string line = "cv scores:";
    for (std::size_t i = 0; i < cv.mean_scores.size(); ++i) {
      line += " " + format_double(config.lambda_grid[i]) + ":" + format_double(cv.mean_scores[i]);
    }
    result.diagnostics.add(line);
  } else {
    result.lambda_selected = config.lambda_fixed;
  }
  result.diagnostics.add("lambda: " + format_double(result.lambda_selected));

  result.regularized_space =
      regularize(result.target_space, result.aggregated_space, result.lambda_selected);

  const auto clusters = cluster_kmeans(result.regularized_space.basis, k,
                                       derive_seed(config.seed, {kStreamKmeans}),
                                       KmeansOptions{config.kmeans_restarts, 100, 1e-8});
  if (clusters.degenerate)
    result.diagnostics.add("kmeans degenerate: " + std::to_string(clusters.distinct_rows) +
                           " distinct rows");
  result.labels = clusters.labels;
  return result;
}

struct BaselineResult {
  std::vector<int> labels;
  Eigenspace space;  // the eigenspace that was clustered
};

// Step 1 under equal weights plus k-means; uses the target eigenspace only
// as the Procrustes reference.
inline BaselineResult baseline_distributed_sc(const Scenario& scenario,
                                              const PipelineConfig& config) {
  config.validate();
  if (scenario.l_count() == 0)
    throw std::invalid_argument("baseline_distributed_sc: needs at least one source");
  const DebiasedNetwork a0 = detail::target_matrix(scenario, config.debias);
  const Eigenspace target_space = top_k_eigvecs(a0.mat, config.k, config.order).space;
  const auto summaries = detail::compute_summaries(scenario, config.k, config.debias, config.order);
  auto step1 = step1_aggregate(summaries, target_space, WeightingMode::kEqual);

  BaselineResult out;
  out.space = std::move(step1.aggregated);
  out.labels = cluster_kmeans(out.space.basis, config.k, derive_seed(config.seed, {kStreamKmeans}),
                              KmeansOptions{config.kmeans_restarts, 100, 1e-8})
                   .labels;
  return out;
}

// Spectral clustering of the (debiased) target network alone.
inline BaselineResult baseline_single_sc(const Scenario& scenario, const PipelineConfig& config) {
  config.validate();
  const DebiasedNetwork a0 = detail::target_matrix(scenario, config.debias);

  BaselineResult out;
  out.space = top_k_eigvecs(a0.mat, config.k, config.order).space;
  out.labels = cluster_kmeans(out.space.basis, config.k, derive_seed(config.seed, {kStreamKmeans}),
                              KmeansOptions{config.kmeans_restarts, 100, 1e-8})
                   .labels;
  return out;
}

}  // namespace transnet
