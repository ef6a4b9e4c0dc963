#include "aircomp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
  }
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  if (entries.size() != rows * cols) {
    throw ValidationError("Matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                          std::to_string(entries.size()));
  }
  for (double x : entries) {
    if (!std::isfinite(x)) throw ValidationError("Matrix: non-finite entry");
  }
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(entries);
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix m) { return m *= s; }

std::vector<double> multiply(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) throw ValidationError("multiply: dimension mismatch");
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> multiply_transpose(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.rows()) throw ValidationError("multiply_transpose: dimension mismatch");
  std::vector<double> y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * xi;
  }
  return y;
}

Matrix matmul_transpose(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ValidationError("matmul_transpose: a has " + std::to_string(a.cols()) +
                          " columns but b has " + std::to_string(b.cols()));
  }
  // c(i, :) = sum_k a(i, k) * bᵀ(k, :), with bᵀ stored row-major for contiguous access.
  Matrix bt(b.cols(), b.rows());
  for (std::size_t j = 0; j < b.rows(); ++j) {
    for (std::size_t k = 0; k < b.cols(); ++k) bt(k, j) = b(j, k);
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    const auto ar = a.row(i);
    for (std::size_t k = 0; k < ar.size(); ++k) {
      const double aik = ar[k];
      if (aik == 0.0) continue;
      const auto btr = bt.row(k);
      for (std::size_t j = 0; j < btr.size(); ++j) out[j] += aik * btr[j];
    }
  }
  return c;
}

double frobenius_norm(const Matrix& m) {
  if (m.empty()) throw ValidationError("empty matrix");
  double s = 0.0;
  for (double x : m.entries()) s += x * x;
  return std::sqrt(s);
}

LinearOperator as_operator(const Matrix& m) {
  LinearOperator op;
  op.rows = m.rows();
  op.cols = m.cols();
  op.apply = [&m](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
      y[i] = acc;
    }
  };
  op.apply_transpose = [&m](std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const auto r = m.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * xi;
    }
  };
  return op;
}

double operator_norm(const LinearOperator& op, double tol) {
  if (op.rows == 0 || op.cols == 0) throw ValidationError("empty matrix");
  if (!(tol > 0.0)) throw ValidationError("operator_norm: tol must be positive");

  // Deterministic start: all-ones plus a small aperiodic ramp, so the start
  // is not orthogonal to sign-alternating singular vectors such as those of [1 -1].
  std::vector<double> v(op.cols);
  for (std::size_t j = 0; j < op.cols; ++j) {
    v[j] = 1.0 + 0.25 * std::sin(1.0 + static_cast<double>(j) * 0.7548776662466927);
  }
  double nv = norm2(v);
  for (double& x : v) x /= nv;

  std::vector<double> u(op.rows);
  std::vector<double> w(op.cols);
  double prev = -1.0;
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    op.apply(v, u);
    op.apply_transpose(u, w);
    // Rayleigh quotient of AᵀA at unit v is ‖Av‖².
    double rq = 0.0;
    for (double x : u) rq += x * x;
    if (prev >= 0.0 && std::abs(rq - prev) <= tol * rq) return std::sqrt(rq);
    prev = rq;
    nv = norm2(w);
    if (nv == 0.0) return std::sqrt(rq);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = w[j] / nv;
  }
  throw NumericalError("operator_norm: power iteration did not converge in " +
                       std::to_string(kPowerIterationCap) + " iterations");
}

double operator_norm(const Matrix& m, double tol) {
  if (m.empty()) throw ValidationError("empty matrix");
  return operator_norm(as_operator(m), tol);
}

}  // namespace aircomp
