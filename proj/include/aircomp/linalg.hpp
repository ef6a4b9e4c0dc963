#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace aircomp {

/// Dense real matrix, row-major, 64-bit entries.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> entries() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix m);

/// y = m x
std::vector<double> multiply(const Matrix& m, std::span<const double> x);
/// y = mᵀ x
std::vector<double> multiply_transpose(const Matrix& m, std::span<const double> x);

/// Returns a·bᵀ (a.rows × b.rows). Zero entries of `a` are skipped.
Matrix matmul_transpose(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);

/// Matrix-free linear map x ↦ Ax together with x ↦ Aᵀx.
struct LinearOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::function<void(std::span<const double>, std::span<double>)> apply_transpose;
};

LinearOperator as_operator(const Matrix& m);

inline constexpr std::size_t kPowerIterationCap = 10'000;

/// Largest singular value by power iteration on AᵀA.
///
/// Stops once successive Rayleigh quotients differ by less than tol times
/// the current value; throws NumericalError after kPowerIterationCap steps.
double operator_norm(const LinearOperator& op, double tol);
double operator_norm(const Matrix& m, double tol);

}  // namespace aircomp
