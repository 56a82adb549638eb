#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "transnet/network.hpp"
#include "transnet/rng.hpp"

namespace transnet {

struct KmeansOptions {
  int restarts = 20;
  int max_iters = 100;
  double rel_tol = 1e-8;
};

struct KmeansResult {
  std::vector<int> labels;
  double wcss = 0.0;
  bool degenerate = false;  // fewer distinct rows than requested clusters
  int distinct_rows = 0;
};

namespace detail {

inline int count_distinct_rows(const Matrix& x, std::vector<int>* first_seen_id = nullptr) {
  const int n = static_cast<int>(x.rows());
  std::vector<int> ids(static_cast<std::size_t>(n), -1);
  int distinct = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (x.row(i) == x.row(j)) {
        ids[static_cast<std::size_t>(i)] = ids[static_cast<std::size_t>(j)];
        break;
      }
    }
    if (ids[static_cast<std::size_t>(i)] < 0) ids[static_cast<std::size_t>(i)] = distinct++;
  }
  if (first_seen_id) *first_seen_id = std::move(ids);
  return distinct;
}

inline double squared_distance(const Matrix& x, int row, const Matrix& centers, int c) {
  return (x.row(row) - centers.row(c)).squaredNorm();
}

// k-means++ seeding with the project's deterministic sampler.
inline Matrix kmeanspp_centers(const Matrix& x, int k, RandomStream& rs) {
  const int n = static_cast<int>(x.rows());
  Matrix centers(k, x.cols());
  std::vector<double> mind(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rs.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = x.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = squared_distance(x, i, centers, c - 1);
      auto& m = mind[static_cast<std::size_t>(i)];
      if (d < m) m = d;
      total += m;
    }
    int pick = 0;
    if (total > 0.0) {
      const double u = rs.uniform01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += mind[static_cast<std::size_t>(i)];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rs.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = x.row(pick);
  }
  return centers;
}

struct LloydOutcome {
  std::vector<int> labels;
  double wcss = 0.0;
};

inline LloydOutcome lloyd(const Matrix& x, Matrix centers, const KmeansOptions& opts) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(centers.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  double prev_wcss = std::numeric_limits<double>::infinity();
  double wcss = 0.0;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    wcss = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(x, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(x, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = best;
      wcss += best_d;
    }

    // Empty-cluster repair: reseed with the point farthest from its center.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    bool repaired = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      int farthest = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const int li = labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(li)] <= 1) continue;  // keep donors nonempty
        const double d = squared_distance(x, i, centers, li);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      if (farthest < 0) break;  // all remaining clusters are singletons
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])];
      labels[static_cast<std::size_t>(farthest)] = c;
      ++counts[static_cast<std::size_t>(c)];
      centers.row(c) = x.row(farthest);
      repaired = true;
    }
    if (repaired) continue;  // re-assign against the repaired centers

    // Update step.
    Matrix next = Matrix::Zero(k, x.cols());
    for (int i = 0; i < n; ++i) next.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0)
        next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      else
        next.row(c) = centers.row(c);
    }
    centers = std::move(next);

    if (prev_wcss - wcss < opts.rel_tol * std::max(prev_wcss, 1e-300)) break;
    prev_wcss = wcss;
  }

  // Final assignment against the last centers so labels and wcss agree.
  LloydOutcome out;
  out.labels.resize(static_cast<std::size_t>(n));
  out.wcss = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = squared_distance(x, i, centers, 0);
    for (int c = 1; c < k; ++c) {
      const double d = squared_distance(x, i, centers, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out.labels[static_cast<std::size_t>(i)] = best;
    out.wcss += best_d;
  }
  return out;
}

}  // namespace detail

// Best-of-restarts Lloyd iterations with k-means++ seeding. Deterministic
// given the seed. If the rows admit fewer than k distinct values the result
// is the distinct-row partition with the degeneracy flag set.
inline KmeansResult cluster_kmeans(const Matrix& rows, int k, std::uint64_t seed,
                                   const KmeansOptions& opts = KmeansOptions{}) {
  const int n = static_cast<int>(rows.rows());
  if (k < 1 || k > n) throw std::invalid_argument("cluster_kmeans: need 1 <= k <= n");
  if (opts.restarts < 1) throw std::invalid_argument("cluster_kmeans: need at least one restart");

  KmeansResult result;
  std::vector<int> row_ids;
  result.distinct_rows = detail::count_distinct_rows(rows, &row_ids);
  if (result.distinct_rows < k) {
    result.labels = std::move(row_ids);
    result.wcss = 0.0;
    result.degenerate = true;
    return result;
  }

  double best_wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    RandomStream rs(derive_seed(seed, {kStreamKmeans, static_cast<std::uint64_t>(r)}));
    auto outcome = detail::lloyd(rows, detail::kmeanspp_centers(rows, k, rs), opts);
    if (outcome.wcss < best_wcss) {
      best_wcss = outcome.wcss;
      result.labels = std::move(outcome.labels);
    }
  }
  result.wcss = best_wcss;
  return result;
}

}  // namespace transnet
