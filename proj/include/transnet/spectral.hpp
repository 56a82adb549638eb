#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "transnet/network.hpp"

namespace transnet {

// Column-orthonormal n-by-k basis of a k-dimensional subspace.
struct Eigenspace {
  Matrix basis;

  int n() const { return static_cast<int>(basis.rows()); }
  int k() const { return static_cast<int>(basis.cols()); }

  double orthonormality_error() const {
    const Matrix g = basis.transpose() * basis;
    return (g - Matrix::Identity(k(), k())).norm();
  }

  void validate(double tol = 1e-10) const {
    if (n() < k() || k() < 1) throw std::invalid_argument("Eigenspace: need n >= k >= 1");
    if (orthonormality_error() > tol)
      throw std::invalid_argument("Eigenspace: columns are not orthonormal");
  }
};

// k-by-k orthogonal alignment matrix.
struct Rotation {
  Matrix z;

  void validate(double tol = 1e-10) const {
    if (z.rows() != z.cols()) throw std::invalid_argument("Rotation: matrix must be square");
    const Matrix g = z.transpose() * z;
    if ((g - Matrix::Identity(z.rows(), z.cols())).norm() > tol)
      throw std::invalid_argument("Rotation: matrix is not orthogonal");
  }
};

enum class EigenOrder {
  kAbsDescending,        // leading by |eigenvalue|; default for debiased matrices
  kAlgebraicDescending,  // leading by signed eigenvalue
};

struct TopKResult {
  Eigenspace space;
  Vector eigenvalues;  // the k selected eigenvalues, in selection order
  bool degenerate_gap = false;
};

namespace detail {

// Deterministic sign convention: the largest-magnitude entry of each column
// is made positive; magnitude ties resolve to the lowest row index.
inline void apply_sign_convention(Matrix& basis) {
  for (int c = 0; c < basis.cols(); ++c) {
    int pivot = 0;
    double best = std::abs(basis(0, c));
    for (int r = 1; r < basis.rows(); ++r) {
      const double v = std::abs(basis(r, c));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (basis(pivot, c) < 0.0) basis.col(c) = -basis.col(c);
  }
}

inline void check_symmetric(const Matrix& s, const char* where) {
  if (s.rows() != s.cols()) throw std::invalid_argument(std::string(where) + ": matrix must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = i + 1; j < s.cols(); ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale)
        throw std::invalid_argument(std::string(where) + ": matrix must be symmetric");
    }
  }
}

}  // namespace detail

// Top-k eigenvectors of a symmetric matrix under the requested ordering,
// with a deterministic sign convention so seeded runs are bit-reproducible.
// A vanishing gap at the k-th cut is reported, not rejected.
inline TopKResult top_k_eigvecs(const Matrix& s, int k,
                                EigenOrder order = EigenOrder::kAbsDescending) {
  detail::check_symmetric(s, "top_k_eigvecs");
  const int n = static_cast<int>(s.rows());
  if (k < 1 || k > n) throw std::invalid_argument("top_k_eigvecs: need 1 <= k <= n");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("top_k_eigvecs: eigendecomposition failed to converge");
  const Vector& values = solver.eigenvalues();  // ascending

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const auto key = [&](int i) {
    return order == EigenOrder::kAbsDescending ? std::abs(values(i)) : values(i);
  };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) > key(b); });

  TopKResult out;
  out.space.basis.resize(n, k);
  out.eigenvalues.resize(k);
  for (int c = 0; c < k; ++c) {
    out.space.basis.col(c) = solver.eigenvectors().col(idx[static_cast<std::size_t>(c)]);
    out.eigenvalues(c) = values(idx[static_cast<std::size_t>(c)]);
  }
  if (k < n) {
    const double cut = key(idx[static_cast<std::size_t>(k - 1)]);
    const double next = key(idx[static_cast<std::size_t>(k)]);
    out.degenerate_gap = std::abs(cut - next) <= 1e-12 * std::max(1.0, std::abs(cut));
  }
  detail::apply_sign_convention(out.space.basis);
  return out;
}

// Closed-form orthogonal Procrustes solution: Z = V*W^T from the full SVD
// u_l^T u_0 = V S W^T, minimizing ||u_l Z - u_0||_F over orthogonal Z.
inline Rotation procrustes_align(const Eigenspace& u_l, const Eigenspace& u_0) {
  if (u_l.n() != u_0.n() || u_l.k() != u_0.k())
    throw std::invalid_argument("procrustes_align: dimension mismatch");
  const Matrix m = u_l.basis.transpose() * u_0.basis;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation{svd.matrixU() * svd.matrixV().transpose()};
}

struct RankDeficientError : std::runtime_error {
  explicit RankDeficientError(int column, double diag)
      : std::runtime_error("weighted_aggregate: rank-deficient aggregate at column " +
                           std::to_string(column) + " (|R_ii| = " + std::to_string(diag) + ")"),
        column_index(column) {}
  int column_index;
};

// Q factor of the weighted sum of rotated bases. Weights must be nonnegative
// and sum to one. The pre-QR sum must have full column rank; otherwise the
// deficient column index is reported.
inline Eigenspace weighted_aggregate(const std::vector<Eigenspace>& spaces,
                                     const std::vector<Rotation>& rotations, const Vector& w) {
  const std::size_t l_count = spaces.size();
  if (l_count == 0) throw std::invalid_argument("weighted_aggregate: need at least one space");
  if (rotations.size() != l_count || static_cast<std::size_t>(w.size()) != l_count)
    throw std::invalid_argument("weighted_aggregate: spaces, rotations, weights sizes differ");
  const int n = spaces[0].n();
  const int k = spaces[0].k();
  double sum = 0.0;
  for (std::size_t l = 0; l < l_count; ++l) {
    if (spaces[l].n() != n || spaces[l].k() != k)
      throw std::invalid_argument("weighted_aggregate: spaces must share (n,k)");
    if (rotations[l].z.rows() != k || rotations[l].z.cols() != k)
      throw std::invalid_argument("weighted_aggregate: rotation dimension mismatch");
    if (w(static_cast<Eigen::Index>(l)) < 0.0)
      throw std::invalid_argument("weighted_aggregate: weights must be nonnegative");
    sum += w(static_cast<Eigen::Index>(l));
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("weighted_aggregate: weights must sum to 1");

  Matrix acc = Matrix::Zero(n, k);
  for (std::size_t l = 0; l < l_count; ++l) {
    acc.noalias() += w(static_cast<Eigen::Index>(l)) * (spaces[l].basis * rotations[l].z);
  }

  Eigen::HouseholderQR<Matrix> qr(acc);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  for (int c = 0; c < k; ++c) {
    if (std::abs(r(c, c)) < 1e-8) throw RankDeficientError(c, std::abs(r(c, c)));
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);  // fix the QR sign ambiguity
  }
  return Eigenspace{std::move(q)};
}

// ||UU^T - VV^T||_2 via the small-factor identity sqrt(1 - sigma_min(U^T V)^2)
// = sigma_max(V - U(U^T V)). The residual form avoids the cancellation the
// raw k-by-k expression hits near zero distance; the n-by-n projector
// difference is kept only as a test oracle.
inline double projection_distance(const Eigenspace& u, const Eigenspace& v) {
  if (u.n() != v.n() || u.k() != v.k())
    throw std::invalid_argument("projection_distance: dimension mismatch");
  const Matrix residual = v.basis - u.basis * (u.basis.transpose() * v.basis);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::min(1.0, svd.singularValues().maxCoeff());
}

// Population eigenspace of a block model depends on the membership only:
// the basis Theta*Delta^{-1} with Delta = diag(sqrt(community sizes)).
inline Eigenspace membership_eigenspace(const Membership& theta) {
  theta.validate();
  const auto sizes = theta.sizes();
  for (int c = 0; c < theta.k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] == 0)
      throw std::invalid_argument("membership_eigenspace: community " + std::to_string(c) +
                                  " is empty");
  }
  Matrix basis = Matrix::Zero(theta.n(), theta.k);
  for (int i = 0; i < theta.n(); ++i) {
    const int c = theta.community[static_cast<std::size_t>(i)];
    basis(i, c) = 1.0 / std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(c)]));
  }
  return Eigenspace{std::move(basis)};
}

// Ground-truth eigenspace of the population matrix Theta*B*Theta^T. Requires
// B of full rank and nonempty communities; the span itself is membership-only.
inline Eigenspace ground_truth_eigenspace(const SbmSpec& spec) {
  spec.validate();
  Eigen::JacobiSVD<Matrix> svd(spec.b);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  if (smax <= 0.0 || smin <= 1e-12 * smax)
    throw std::invalid_argument("ground_truth_eigenspace: connectivity matrix is rank deficient");
  return membership_eigenspace(spec.theta);
}

}  // namespace transnet
