#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace transnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Community assignment for n nodes; ids in [0, k). Equivalent to a one-hot
// n-by-k membership matrix, which one_hot() materializes on demand.
struct Membership {
  std::vector<int> community;
  int k = 0;

  int n() const { return static_cast<int>(community.size()); }

  void validate() const {
    if (k < 1) throw std::invalid_argument("Membership: k must be >= 1");
    for (int c : community) {
      if (c < 0 || c >= k) throw std::invalid_argument("Membership: community id out of range");
    }
  }

  std::vector<int> sizes() const {
    std::vector<int> s(static_cast<std::size_t>(k), 0);
    for (int c : community) ++s[static_cast<std::size_t>(c)];
    return s;
  }

  Matrix one_hot() const {
    Matrix theta = Matrix::Zero(n(), k);
    for (int i = 0; i < n(); ++i) theta(i, community[static_cast<std::size_t>(i)]) = 1.0;
    return theta;
  }
};

// Contiguous near-equal communities; when n is not divisible by k the first
// communities take the extra nodes.
inline Membership balanced_membership(int n, int k) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("balanced_membership: need 1 <= k <= n");
  Membership m;
  m.k = k;
  m.community.resize(static_cast<std::size_t>(n));
  const int base = n / k;
  const int extra = n % k;
  int node = 0;
  for (int c = 0; c < k; ++c) {
    const int size = base + (c < extra ? 1 : 0);
    for (int j = 0; j < size; ++j) m.community[static_cast<std::size_t>(node++)] = c;
  }
  return m;
}

// Symmetric binary adjacency matrix with zero diagonal.
struct BinaryNetwork {
  Matrix adj;

  int n() const { return static_cast<int>(adj.rows()); }

  void validate() const {
    if (adj.rows() != adj.cols()) throw std::invalid_argument("BinaryNetwork: matrix must be square");
    for (int i = 0; i < adj.rows(); ++i) {
      if (adj(i, i) != 0.0) throw std::invalid_argument("BinaryNetwork: diagonal must be zero");
      for (int j = i + 1; j < adj.cols(); ++j) {
        const double v = adj(i, j);
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("BinaryNetwork: entries must be 0 or 1");
        if (v != adj(j, i)) throw std::invalid_argument("BinaryNetwork: matrix must be symmetric");
      }
    }
  }

  double density() const {
    const int nn = n();
    if (nn < 2) return 0.0;
    return adj.sum() / (static_cast<double>(nn) * (nn - 1));
  }
};

// One layer of the block model: membership plus symmetric connectivity
// matrix with entries in [0,1]. The population matrix is theta*B*theta^T.
struct SbmSpec {
  Membership theta;
  Matrix b;
  int label = 0;

  void validate() const {
    theta.validate();
    if (b.rows() != b.cols()) throw std::invalid_argument("SbmSpec: B must be square");
    if (static_cast<int>(b.rows()) != theta.k)
      throw std::invalid_argument("SbmSpec: B dimension does not match membership k");
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) {
        if (b(i, j) != b(j, i)) throw std::invalid_argument("SbmSpec: B must be symmetric");
        if (b(i, j) < 0.0 || b(i, j) > 1.0)
          throw std::invalid_argument("SbmSpec: B entries must lie in [0,1]");
      }
    }
  }

  Matrix population() const {
    const Matrix theta_m = theta.one_hot();
    return theta_m * b * theta_m.transpose();
  }
};

}  // namespace transnet
