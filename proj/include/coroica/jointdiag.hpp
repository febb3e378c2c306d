// Approximate joint diagonalization by the uniformly weighted exhaustive
// diagonalization with Gauss iterations (uwedge) scheme.
//
// Each sweep transforms the set by the current estimate W, fits a unit
// diagonal correction matrix I + E to the transformed matrices by a
// pairwise linearized least squares problem, and updates W <- (I + E)^-1 W.
#pragma once

#include "coroica/types.hpp"

#include <Eigen/Eigenvalues>

#include <optional>

namespace coroica {

struct DiagonalizerOptions {
  enum class Init { whitening, identity, user };

  int max_iter = 10000;
  double rel_tol = 1e-9;
  Init init = Init::whitening;
  Matrix user_init;  // used when init == Init::user

  void validate() const {
    if (max_iter < 1) throw std::invalid_argument("DiagonalizerOptions: max_iter must be >= 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("DiagonalizerOptions: rel_tol must be > 0");
  }
};

/// Result of a joint diagonalization. Rows of `V` are unit-norm and
/// sign-canonicalized (largest-magnitude entry positive).
struct Diagonalizer {
  Matrix V;
  bool converged = false;
  int iterations = 0;
  double final_loss = 0.0;
};

/// Sum over the set of squared off-diagonal entries of V M V^T.
inline double offdiag_loss(const Matrix& v, const MatrixSet& set) {
  double loss = 0.0;
  for (const auto& m : set.matrices) {
    if (m.rows() != v.cols() || m.cols() != v.cols()) {
      throw std::invalid_argument("offdiag_loss: dimension mismatch");
    }
    const Matrix r = v * m * v.transpose();
    loss += r.squaredNorm() - r.diagonal().squaredNorm();
  }
  return loss;
}

/// W0 = |Lambda|^{-1/2} U^T for the symmetric eigendecomposition of `m`.
/// Eigenvalues are taken in absolute value (difference matrices are
/// indefinite) and floored at 1e-12 of the largest. Returns nullopt when
/// `m` is numerically zero.
inline std::optional<Matrix> whitening_matrix(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) return std::nullopt;
  Vector lambda = eig.eigenvalues().cwiseAbs();
  const double top = lambda.maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top)) return std::nullopt;
  const double floor = 1e-12 * top;
  for (Index i = 0; i < lambda.size(); ++i) lambda(i) = std::max(lambda(i), floor);
  return Matrix(lambda.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose());
}

namespace detail {

inline void check_symmetric_set(const MatrixSet& set) {
  if (set.empty()) throw std::invalid_argument("uwedge: empty matrix set");
  const Index d = set.matrices.front().rows();
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& m = set.matrices[k];
    if (m.rows() != d || m.cols() != d) {
      throw std::invalid_argument("uwedge: matrix " + std::to_string(k) + " is not " +
                                  std::to_string(d) + "x" + std::to_string(d));
    }
    if (!m.allFinite()) throw std::invalid_argument("uwedge: non-finite matrix entries");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("uwedge: matrix " + std::to_string(k) + " is not symmetric");
    }
  }
}

inline void canonicalize(Matrix& w) {
  normalize_rows(w);
  canonicalize_signs(w);
}

}  // namespace detail

/// Jointly diagonalize `set`. Non-convergence is reported through the
/// `converged` flag, never thrown.
inline Diagonalizer uwedge(const MatrixSet& set, const DiagonalizerOptions& opts = {}) {
  opts.validate();
  detail::check_symmetric_set(set);
  const Index d = set.dim();
  const auto count = static_cast<Index>(set.size());

  Diagonalizer out;
  if (d == 1) {
    out.V = Matrix::Ones(1, 1);
    out.converged = true;
    return out;
  }

  Matrix w;
  switch (opts.init) {
    case DiagonalizerOptions::Init::user:
      if (opts.user_init.rows() != d || opts.user_init.cols() != d) {
        throw std::invalid_argument("uwedge: user init has wrong shape");
      }
      w = opts.user_init;
      break;
    case DiagonalizerOptions::Init::whitening: {
      auto white = whitening_matrix(set.matrices.front());
      w = white ? *white : Matrix::Identity(d, d);
      break;
    }
    case DiagonalizerOptions::Init::identity:
      w = Matrix::Identity(d, d);
      break;
  }
  detail::canonicalize(w);

  Matrix diags(d, count);  // column k holds diag(W M_k W^T)
  std::vector<Matrix> transformed(set.size());
  Matrix gram(d, d);
  Matrix cross(d, d);
  Matrix correction(d, d);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    for (Index k = 0; k < count; ++k) {
      transformed[k] = w * set.matrices[k] * w.transpose();
      diags.col(k) = transformed[k].diagonal();
    }
    gram.noalias() = diags * diags.transpose();
    // cross(i, j) = sum_k R_k(i, j) * lambda_k(j)
    cross.setZero();
    for (Index k = 0; k < count; ++k) {
      cross.noalias() += transformed[k] * diags.col(k).asDiagonal();
    }

    correction.setIdentity();
    for (Index i = 0; i < d; ++i) {
      for (Index j = i + 1; j < d; ++j) {
        const double bii = gram(i, i);
        const double bjj = gram(j, j);
        const double bij = gram(i, j);
        const double det = bii * bjj - bij * bij;
        if (!(std::abs(det) > 1e-14 * bii * bjj) || !(bii * bjj > 0.0)) continue;
        correction(i, j) = (bii * cross(i, j) - bij * cross(j, i)) / det;
        correction(j, i) = (bjj * cross(j, i) - bij * cross(i, j)) / det;
      }
    }

    Matrix next = correction.partialPivLu().solve(w);
    if (!next.allFinite()) break;
    detail::canonicalize(next);
    const double change = (next - w).norm() / w.norm();
    w = std::move(next);
    out.iterations = iter;
    if (change < opts.rel_tol) {
      out.converged = true;
      break;
    }
  }

  out.V = std::move(w);
  out.final_loss = offdiag_loss(out.V, set);
  return out;
}

}  // namespace coroica
