#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "mpcore/errors.hpp"

namespace mpcore {

/// Row-major dense matrix over any scalar type.
template <typename S>
class DenseMatrix {
 public:
  using Scalar = S;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const S& fill = S{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<S>> rows) {
    DenseMatrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw DimensionError("ragged matrix initializer");
      m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    return m;
  }

  static DenseMatrix identity(std::size_t n, const S& zero, const S& one) {
    DenseMatrix m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<S> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const S> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<S> data() { return data_; }
  std::span<const S> data() const { return data_; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

template <typename S>
class Vector {
 public:
  using Scalar = S;

  Vector() = default;
  explicit Vector(std::size_t n, const S& fill = S{}) : data_(n, fill) {}
  Vector(std::initializer_list<S> init) : data_(init) {}
  explicit Vector(std::vector<S> v) : data_(std::move(v)) {}

  std::size_t size() const { return data_.size(); }
  S& operator[](std::size_t i) { return data_[i]; }
  const S& operator[](std::size_t i) const { return data_[i]; }

  std::span<S> span() { return data_; }
  std::span<const S> span() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<S> data_;
};

/// Row exchanges recorded by partial-pivoting LU: at step k, row k was
/// swapped with row perm[k] (perm[k] >= k; equal means no swap).
struct PivotRecord {
  std::vector<std::size_t> perm;

  std::size_t swaps() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) n += perm[k] != k;
    return n;
  }

  friend bool operator==(const PivotRecord&, const PivotRecord&) = default;
};

}  // namespace mpcore
