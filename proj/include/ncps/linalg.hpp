#pragma once

// Small dense matrices for phase-space work (N <= a few dozen). Pivoted
// elimination exposes rank and kernel so degenerate 2-forms are detected
// rather than silently inverted.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ncps::linalg {

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for (int r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (int c = 0; c < cols_; ++c) s += (*this)(r, c) * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] = s;
    }
    return y;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat out(a.rows_, b.cols_);
    for (int r = 0; r < a.rows_; ++r)
      for (int k = 0; k < a.cols_; ++k) {
        double s = a(r, k);
        if (s == 0.0) continue;
        for (int c = 0; c < b.cols_; ++c) out(r, c) += s * b(k, c);
      }
    return out;
  }

  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat out(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] - b.a_[i];
    return out;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

struct Elimination {
  int rank = 0;
  bool invertible = false;
  Mat inverse;
};

// Gauss-Jordan with row partial pivoting. A pivot counts only when its
// magnitude exceeds pivot_tol * max|a_ij| of the input; dead columns are
// skipped so the returned rank is meaningful for singular input.
inline Elimination invert_with_rank(const Mat& a, double pivot_tol) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("invert_with_rank: matrix not square");
  const double tol = pivot_tol * a.max_abs();

  Mat w = a;
  Mat inv = Mat::identity(n);
  int rank = 0;
  bool singular = false;

  for (int col = 0; col < n; ++col) {
    int pivot = rank;
    for (int r = rank + 1; r < n; ++r)
      if (std::fabs(w(r, col)) > std::fabs(w(pivot, col))) pivot = r;
    if (rank >= n || std::fabs(w(pivot, col)) <= tol) {
      singular = true;
      continue;
    }
    if (pivot != rank) {
      for (int c = 0; c < n; ++c) {
        std::swap(w(pivot, c), w(rank, c));
        std::swap(inv(pivot, c), inv(rank, c));
      }
    }
    const double d = w(rank, col);
    for (int c = 0; c < n; ++c) {
      w(rank, c) /= d;
      inv(rank, c) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == rank) continue;
      const double f = w(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        w(r, c) -= f * w(rank, c);
        inv(r, c) -= f * inv(rank, c);
      }
    }
    ++rank;
  }

  Elimination out;
  out.rank = rank;
  if (!singular && rank == n) {
    out.invertible = true;
    out.inverse = std::move(inv);
  }
  return out;
}

// Orthonormal basis of the null space via reduced row echelon form followed
// by modified Gram-Schmidt. Same pivot threshold convention as above.
inline std::vector<std::vector<double>> null_space_orthonormal(const Mat& a,
                                                               double pivot_tol) {
  const int rows = a.rows(), cols = a.cols();
  const double tol = pivot_tol * a.max_abs();
  Mat w = a;
  std::vector<int> pivot_col_of_row;
  std::vector<bool> is_pivot_col(static_cast<std::size_t>(cols), false);
  int r = 0;
  for (int col = 0; col < cols && r < rows; ++col) {
    int p = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::fabs(w(i, col)) > std::fabs(w(p, col))) p = i;
    if (std::fabs(w(p, col)) <= tol) continue;
    if (p != r)
      for (int c = 0; c < cols; ++c) std::swap(w(p, c), w(r, c));
    const double d = w(r, col);
    for (int c = 0; c < cols; ++c) w(r, c) /= d;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = w(i, col);
      if (f == 0.0) continue;
      for (int c = 0; c < cols; ++c) w(i, c) -= f * w(r, c);
    }
    pivot_col_of_row.push_back(col);
    is_pivot_col[static_cast<std::size_t>(col)] = true;
    ++r;
  }

  std::vector<std::vector<double>> basis;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot_col[static_cast<std::size_t>(free_col)]) continue;
    std::vector<double> v(static_cast<std::size_t>(cols), 0.0);
    v[static_cast<std::size_t>(free_col)] = 1.0;
    for (std::size_t row = 0; row < pivot_col_of_row.size(); ++row)
      v[static_cast<std::size_t>(pivot_col_of_row[row])] = -w(static_cast<int>(row), free_col);
    basis.push_back(std::move(v));
  }

  // modified Gram-Schmidt
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < basis[i].size(); ++k) dot += basis[i][k] * basis[j][k];
      for (std::size_t k = 0; k < basis[i].size(); ++k) basis[i][k] -= dot * basis[j][k];
    }
    double norm = 0.0;
    for (double x : basis[i]) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : basis[i]) x /= norm;
  }
  return basis;
}

inline double determinant(Mat a) {
  const int n = a.rows();
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int p = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(p, col))) p = r;
    if (a(p, col) == 0.0) return 0.0;
    if (p != col) {
      for (int c = 0; c < n; ++c) std::swap(a(p, c), a(col, c));
      det = -det;
    }
    det *= a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return det;
}

}  // namespace ncps::linalg
