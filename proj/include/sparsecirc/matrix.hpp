#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sparsecirc {

using Complex = std::complex<double>;

/// Dense complex matrix in column-major storage.
///
/// Columns are contiguous, so column operations (Householder updates,
/// inner products of columns) run over unit-stride memory.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);

  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  /// Row-major literal, convenient for small fixed matrices.
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[j * rows_ + i];
  }

  std::span<Complex> column(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> column(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  Complex trace() const;
  ComplexMatrix adjoint() const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix& operator*=(Complex s);
  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  /// In-place A - z I.
  ComplexMatrix& shift_diagonal(Complex z);

  bool all_finite() const;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }

}  // namespace sparsecirc
