#pragma once

// Small dense matrices over an arbitrary scalar, plus exact rank via
// fraction-free elimination and bridges into Eigen for spectral work.
// Dimensions here are basis sizes of bidegree blocks, so sizes stay modest.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "thodge/scalar.hpp"

namespace thodge {

template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, scalar_field<S>::zero()) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = scalar_field<S>::one();
    return m;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
    Matrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const S& a = (*this)(i, k);
        if (scalar_field<S>::is_zero(a)) continue;
        for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
      }
    return out;
  }

  Matrix operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch in sum");
    Matrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
    return out;
  }

  Matrix operator-(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch in difference");
    Matrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
    return out;
  }

  Matrix scaled(const S& s) const {
    Matrix out = *this;
    for (auto& v : out.data_) v *= s;
    return out;
  }

  Matrix conj_transpose() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = scalar_field<S>::conj((*this)(i, j));
    return out;
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (!scalar_field<S>::is_zero(v)) return false;
    return true;
  }

  std::vector<S> apply(const std::vector<S>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("Matrix: vector length mismatch");
    std::vector<S> y(rows_, scalar_field<S>::zero());
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (!scalar_field<S>::is_zero((*this)(i, j))) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

// Exact rank by fraction-free (Bareiss) elimination.  Works over any exact
// field-like scalar; pivots take the first nonzero entry in column order.
template <class S>
int bareiss_rank(Matrix<S> m) {
  const int rows = m.rows(), cols = m.cols();
  int rank = 0;
  S prev = scalar_field<S>::one();
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (!scalar_field<S>::is_zero(m(r, col))) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = col; j < cols; ++j) std::swap(m(piv, j), m(rank, j));
    const S pivot = m(rank, col);
    for (int r = rank + 1; r < rows; ++r) {
      for (int j = col + 1; j < cols; ++j) m(r, j) = (m(r, j) * pivot - m(r, col) * m(rank, j)) / prev;
      m(r, col) = scalar_field<S>::zero();
    }
    prev = pivot;
    ++rank;
  }
  return rank;
}

template <class S>
int nullity(const Matrix<S>& m) {
  return m.cols() - bareiss_rank(m);
}

// ---- Eigen bridges ---------------------------------------------------------

using EigenC = Eigen::MatrixXcd;

template <class S>
EigenC to_eigen(const Matrix<S>& m) {
  EigenC out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = scalar_field<S>::to_complex(m(i, j));
  return out;
}

// Numeric rank from singular values with a relative threshold.
int numeric_rank(const EigenC& m, double rel_tol = 1e-10);

// Kernel dimension of a Hermitian PSD matrix with a confidence verdict: the
// eigenvalue gap between dropped and kept values must be a factor >= 10 or
// the count is reported indeterminate.
struct KernelCount {
  int dim = 0;
  bool determinate = true;
  double gap = 0.0;  // smallest kept / largest dropped; inf when clean
};
KernelCount hermitian_kernel_count(const EigenC& m, double rel_drop = 1e-8, double gap_ratio = 10.0);

}  // namespace thodge
