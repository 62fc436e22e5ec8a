#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "lmknn/error.hpp"

namespace lmknn {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Dimensions in this library stay tiny
/// (at most the number of selected features), so no blocking or views.
class Matrix {
public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw shape_error("ragged initializer for Matrix");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// (A + Aᵀ)/2; only meaningful for square matrices.
  Matrix symmetrized() const {
    if (rows_ != cols_) throw shape_error("symmetrized() needs a square matrix");
    Matrix s(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return s;
  }

  double max_asymmetry() const {
    if (rows_ != cols_) throw shape_error("max_asymmetry() needs a square matrix");
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        worst = std::max(worst, std::fabs((*this)(i, j) - (*this)(j, i)));
    return worst;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw shape_error("matrix shapes differ: " + std::to_string(rows_) + "x" +
                        std::to_string(cols_) + " vs " + std::to_string(o.rows_) + "x" +
                        std::to_string(o.cols_));
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw shape_error("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// ⟨A,B⟩ = Σ A_ij B_ij
inline double frobenius_dot(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw shape_error("frobenius_dot: shapes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
  return s;
}

struct SymmetricEigen {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column i pairs with eigenvalues[i]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for small dense symmetric matrices.
/// Input must be symmetric within asym_tol; it is symmetrized by
/// averaging before iteration starts.
inline SymmetricEigen jacobi_eigen(const Matrix& input, int max_sweeps = 64,
                                   double asym_tol = 1e-8) {
  if (input.rows() != input.cols())
    throw shape_error("jacobi_eigen: matrix must be square");
  if (input.max_asymmetry() > asym_tol)
    throw invalid_argument("jacobi_eigen: matrix is not symmetric");

  const std::size_t n = input.rows();
  Matrix a = input.symmetrized();
  Matrix v = Matrix::identity(n);

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  if (n == 1) {
    out.eigenvalues[0] = a(0, 0);
    out.eigenvectors = v;
    return out;
  }

  auto off_diagonal = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::fabs(a(i, j));
    return s;
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
  const double stop = (scale > 0.0 ? scale : 1.0) * n * n * 1e-16;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    const double off = off_diagonal();
    if (off <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= stop / (n * n)) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = 0.5 * (aqq - app) / apq;
        double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_diagonal() > stop)
    throw numerical_error("jacobi_eigen: no convergence after " +
                          std::to_string(max_sweeps) + " sweeps, off-diagonal " +
                          std::to_string(off_diagonal()));

  // Sort eigenpairs ascending for a deterministic output order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(order[j], order[j]) < a(order[best], order[best])) best = j;
    std::swap(order[i], order[best]);
  }
  out.eigenvectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.eigenvalues[i] = a(order[i], order[i]);
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, i) = v(k, order[i]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace lmknn
