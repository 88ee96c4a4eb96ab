#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "manifolds/common.hpp"

namespace manifolds {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace detail {

inline void require_same_shape(const MatrixXd& x, const MatrixXd& y, const char* op) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

inline void require_same_shape(const MatrixXcd& x, const MatrixXcd& y, const char* op) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

inline void require_finite(const MatrixXd& x, const char* op) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(op) + ": non-finite entries");
}

inline void require_finite(const MatrixXcd& x, const char* op) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(op) + ": non-finite entries");
}

}  // namespace detail

// Trace pairing <x, y> = Tr(x^T y) on maps R^p -> R^n stored as n x p matrices.
inline double frobenius_inner(const MatrixXd& x, const MatrixXd& y) {
  detail::require_same_shape(x, y, "frobenius_inner");
  return (x.transpose() * y).trace();
}

// Hermitian pairing h(x, y) = Tr(y^* x): linear in x, conjugate-linear in y.
inline std::complex<double> hermitian_inner(const MatrixXcd& x, const MatrixXcd& y) {
  detail::require_same_shape(x, y, "hermitian_inner");
  return (y.adjoint() * x).trace();
}

struct OrthDecomposition {
  VectorXd image_part;   // in the column span of x
  VectorXd kernel_part;  // annihilated by x^T
};

// Splits z along H = Im x (+) Ker x^T. Requires full column rank.
inline OrthDecomposition orth_decompose(const MatrixXd& x, const VectorXd& z,
                                        double rank_tol = kRankTol) {
  if (z.size() != x.rows())
    throw std::invalid_argument("orth_decompose: dimension mismatch");
  detail::require_finite(x, "orth_decompose");
  Eigen::JacobiSVD<MatrixXd> svd(x, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (x.cols() == 0 || sv(0) <= 0.0 || sv(x.cols() - 1) <= rank_tol * sv(0))
    throw std::invalid_argument("orth_decompose: rank-deficient map");
  const VectorXd image = svd.matrixU() * (svd.matrixU().transpose() * z);
  return {image, z - image};
}

// Bilinear form of signature (positive_dim, negative_dim): positive slots
// first, negative slots last.
struct MinkowskiForm {
  int positive_dim;
  int negative_dim;

  MinkowskiForm(int pos, int neg) : positive_dim(pos), negative_dim(neg) {
    if (pos < 1 || neg < 1)
      throw std::invalid_argument("MinkowskiForm: both signature counts must be >= 1");
  }

  int dimension() const { return positive_dim + negative_dim; }

  MatrixXd metric_matrix() const {
    VectorXd d = VectorXd::Ones(dimension());
    d.tail(negative_dim).setConstant(-1.0);
    return d.asDiagonal();
  }
};

inline double minkowski_inner(const VectorXd& u, const VectorXd& v, const MinkowskiForm& form) {
  if (u.size() != form.dimension() || v.size() != form.dimension())
    throw std::invalid_argument("minkowski_inner: dimension mismatch");
  const int p = form.positive_dim;
  const int q = form.negative_dim;
  return u.head(p).dot(v.head(p)) - u.tail(q).dot(v.tail(q));
}

// Scaling-and-squaring Pade approximation (Eigen's expm).
inline MatrixXd matrix_exp(const MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exp: matrix must be square");
  detail::require_finite(a, "matrix_exp");
  return a.exp();
}

struct ThinSvd {
  MatrixXd u;               // n x p, orthonormal columns
  VectorXd singular_values; // nonincreasing, nonnegative
  MatrixXd v;               // p x p orthogonal
};

inline ThinSvd thin_svd(const MatrixXd& x) {
  detail::require_finite(x, "thin_svd");
  Eigen::JacobiSVD<MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Realification of an n x p complex map as a 2n x p real map with rows
// interleaved as (Re, Im) pairs. With this layout the multiplication by i
// becomes the block-diagonal 2x2 rotation below, and
// Re h(x, y) = <realify(x), realify(y)>.
inline MatrixXd realify(const MatrixXcd& x) {
  MatrixXd r(2 * x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    r.row(2 * i) = x.row(i).real();
    r.row(2 * i + 1) = x.row(i).imag();
  }
  return r;
}

// J acting on realified maps: (re, im) -> (-im, re) per row pair.
inline MatrixXd apply_complex_structure(const MatrixXd& xr) {
  if (xr.rows() % 2 != 0)
    throw std::invalid_argument("apply_complex_structure: odd row count");
  MatrixXd jx(xr.rows(), xr.cols());
  for (int i = 0; i < xr.rows() / 2; ++i) {
    jx.row(2 * i) = -xr.row(2 * i + 1);
    jx.row(2 * i + 1) = xr.row(2 * i);
  }
  return jx;
}

// Realification of an n x n complex operator as a 2n x 2n real operator in
// the interleaved layout; unitary inputs give orthogonal outputs.
inline MatrixXd realify_operator(const MatrixXcd& t) {
  if (t.rows() != t.cols())
    throw std::invalid_argument("realify_operator: matrix must be square");
  MatrixXd r(2 * t.rows(), 2 * t.cols());
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) {
      const double a = t(i, j).real();
      const double b = t(i, j).imag();
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = b;
      r(2 * i + 1, 2 * j + 1) = a;
    }
  return r;
}

}  // namespace manifolds
