#pragma once

// Small dense linear algebra for n <= 16: row-major square/rectangular
// matrices, LU with partial pivoting and a cyclic Jacobi eigensolver.

#include <cstddef>
#include <span>
#include <vector>

namespace stefan {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix zero(std::size_t n) { return Matrix(n, n); }
  /// Builds from nested rows; all rows must share one length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;

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
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double one_norm(const Matrix& a);
/// max_ij |a_ij - a_ji|
double asymmetry(const Matrix& a);
Matrix symmetric_part(const Matrix& a);
/// x^T A y
double quadratic_form(const Matrix& a, std::span<const double> x, std::span<const double> y);

/// LU factorisation with partial pivoting, PA = LU.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& a);

  bool singular() const noexcept { return singular_; }
  Vector solve(std::span<const double> b) const;
  Matrix inverse() const;
  double determinant() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below
/// tol * ||A||_F (with an absolute floor). Input must be symmetric.
SymmetricEigen symmetric_eigen(const Matrix& a, double tol = 1e-12, int max_sweeps = 100);

/// Largest singular value via the eigenvalues of A^T A.
double spectral_norm(const Matrix& a);

}  // namespace stefan
