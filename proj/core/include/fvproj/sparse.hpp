#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fvproj/fields.hpp"

namespace fvproj {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Compressed-row matrix. Column ids are strictly increasing within each row.
/// The optional space tags record which discrete spaces the matrix maps between;
/// untagged matrices act on plain vectors.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                 std::vector<int> col_ids, std::vector<double> values);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t nnz() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  [[nodiscard]] std::span<const int> col_ids() const noexcept { return cols_ids_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  std::optional<Space> domain;
  std::optional<Space> codomain;

  /// y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
  /// y = A^T x.
  [[nodiscard]] std::vector<double> apply_transpose(std::span<const double> x) const;

  [[nodiscard]] SparseOperator transpose() const;
  [[nodiscard]] std::vector<double> diagonal() const;
  /// Entry (i, j), zero when not stored.
  [[nodiscard]] double at(std::size_t i, std::size_t j) const;
  /// Largest |a_ij - a_ji|.
  [[nodiscard]] double asymmetry() const;
  [[nodiscard]] double max_abs() const;

  /// Row i scaled by s[i].
  [[nodiscard]] SparseOperator scale_rows(std::span<const double> s) const;

  /// Writes one "row col value" line per stored entry.
  void export_coordinates(const std::filesystem::path& path) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> cols_ids_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) entries; duplicates are summed on build.
class TripletBuilder {
 public:
  TripletBuilder(std::size_t rows, std::size_t cols);
  void add(std::size_t row, std::size_t col, double value);
  void reserve(std::size_t n) { entries_.reserve(n); }
  /// Entries that sum to exactly zero are kept, so the pattern does not depend on values.
  [[nodiscard]] SparseOperator build() const;

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

/// a * A + b * B.
SparseOperator add(double a, const SparseOperator& A, double b, const SparseOperator& B);
SparseOperator multiply(const SparseOperator& A, const SparseOperator& B);
SparseOperator identity(std::size_t n);
SparseOperator diagonal_matrix(std::span<const double> d);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += a * x.
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace fvproj
