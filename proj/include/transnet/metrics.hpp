#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace transnet {

namespace detail {

inline std::vector<std::vector<long>> confusion_matrix(const std::vector<int>& est,
                                                       const std::vector<int>& truth, int k) {
  if (est.size() != truth.size())
    throw std::invalid_argument("misclassification_rate: label vectors differ in length");
  if (est.empty()) throw std::invalid_argument("misclassification_rate: empty labels");
  std::vector<std::vector<long>> c(static_cast<std::size_t>(k),
                                   std::vector<long>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < est.size(); ++i) {
    const int e = est[i];
    const int t = truth[i];
    if (e < 0 || e >= k || t < 0 || t >= k)
      throw std::invalid_argument("misclassification_rate: label out of [0,k)");
    ++c[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)];
  }
  return c;
}

// Max-weight perfect matching on a k-by-k score matrix (Hungarian algorithm,
// potentials formulation). Returns the matched score sum.
inline long hungarian_max_score(const std::vector<std::vector<long>>& score) {
  const int k = static_cast<int>(score.size());
  long max_entry = 0;
  for (const auto& row : score)
    for (long v : row) max_entry = std::max(max_entry, v);
  // Minimize cost = max_entry - score.
  const int inf = std::numeric_limits<int>::max();
  std::vector<long> u(static_cast<std::size_t>(k + 1), 0), v(static_cast<std::size_t>(k + 1), 0);
  std::vector<int> p(static_cast<std::size_t>(k + 1), 0), way(static_cast<std::size_t>(k + 1), 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long> minv(static_cast<std::size_t>(k + 1), std::numeric_limits<long>::max());
    std::vector<char> used(static_cast<std::size_t>(k + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      long delta = std::numeric_limits<long>::max();
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const long cost = max_entry - score[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)];
        const long cur = cost - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  long total = 0;
  for (int j = 1; j <= k; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0)
      total += score[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)][static_cast<std::size_t>(j - 1)];
  }
  (void)inf;
  return total;
}

}  // namespace detail

// Minimum mismatch fraction over all relabelings of `est`, by checking all
// k! permutations. Intended for small k.
inline double misclassification_rate_exhaustive(const std::vector<int>& est,
                                                const std::vector<int>& truth, int k) {
  if (k > 8) throw std::invalid_argument("misclassification_rate_exhaustive: k too large");
  const auto c = detail::confusion_matrix(est, truth, k);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  long best_match = -1;
  do {
    long match = 0;
    for (int e = 0; e < k; ++e)
      match += c[static_cast<std::size_t>(e)][static_cast<std::size_t>(perm[static_cast<std::size_t>(e)])];
    best_match = std::max(best_match, match);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 1.0 - static_cast<double>(best_match) / static_cast<double>(est.size());
}

// Same minimum computed as an optimal assignment on the confusion matrix.
inline double misclassification_rate_assignment(const std::vector<int>& est,
                                                const std::vector<int>& truth, int k) {
  const auto c = detail::confusion_matrix(est, truth, k);
  const long best_match = detail::hungarian_max_score(c);
  return 1.0 - static_cast<double>(best_match) / static_cast<double>(est.size());
}

// Proportion of misclassified nodes up to label permutation. Exhaustive
// search up to k = 8, optimal assignment beyond.
inline double misclassification_rate(const std::vector<int>& est, const std::vector<int>& truth,
                                     int k) {
  if (k < 1) throw std::invalid_argument("misclassification_rate: k must be >= 1");
  if (k <= 8) return misclassification_rate_exhaustive(est, truth, k);
  return misclassification_rate_assignment(est, truth, k);
}

}  // namespace transnet
