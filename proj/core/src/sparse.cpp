#include "fvproj/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fvproj/parallel.hpp"

namespace fvproj {

namespace {

constexpr std::size_t kMatvecGrain = 20000;

double pairwise_dot(const double* a, const double* b, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_dot(a, b, half) + pairwise_dot(a + half, b + half, n - half);
}

}  // namespace

SparseOperator::SparseOperator(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                               std::vector<int> col_ids, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(row_offsets)),
      cols_ids_(std::move(col_ids)),
      values_(std::move(values)) {
  if (offsets_.size() != rows_ + 1 || offsets_.front() != 0 || offsets_.back() != values_.size() ||
      cols_ids_.size() != values_.size()) {
    throw DimensionError("inconsistent compressed-row arrays");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (offsets_[i] > offsets_[i + 1]) {
      throw DimensionError("row offsets must be non-decreasing");
    }
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      if (cols_ids_[p] < 0 || static_cast<std::size_t>(cols_ids_[p]) >= cols_) {
        throw DimensionError("column id out of range");
      }
      if (p > offsets_[i] && cols_ids_[p] <= cols_ids_[p - 1]) {
        throw DimensionError("column ids must be strictly increasing within a row");
      }
    }
  }
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw DimensionError("matrix-vector size mismatch");
  }
  parallel_blocks(rows_, kMatvecGrain, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double s = 0.0;
      for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
        s += values_[p] * x[static_cast<std::size_t>(cols_ids_[p])];
      }
      y[i] = s;
    }
  });
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  apply(x, y);
  return y;
}

std::vector<double> SparseOperator::apply_transpose(std::span<const double> x) const {
  if (x.size() != rows_) {
    throw DimensionError("transpose matrix-vector size mismatch");
  }
  std::vector<double> y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      y[static_cast<std::size_t>(cols_ids_[p])] += values_[p] * x[i];
    }
  }
  return y;
}

SparseOperator SparseOperator::transpose() const {
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (int c : cols_ids_) {
    ++offsets[static_cast<std::size_t>(c) + 1];
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    offsets[j + 1] += offsets[j];
  }
  std::vector<int> ids(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      const std::size_t q = next[static_cast<std::size_t>(cols_ids_[p])]++;
      ids[q] = static_cast<int>(i);
      vals[q] = values_[p];
    }
  }
  SparseOperator t(cols_, rows_, std::move(offsets), std::move(ids), std::move(vals));
  t.domain = codomain;
  t.codomain = domain;
  return t;
}

std::vector<double> SparseOperator::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = at(i, i);
  }
  return d;
}

double SparseOperator::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) {
    throw DimensionError("entry index out of range");
  }
  const auto first = cols_ids_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = cols_ids_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(j));
  if (it != last && *it == static_cast<int>(j)) {
    return values_[static_cast<std::size_t>(it - cols_ids_.begin())];
  }
  return 0.0;
}

double SparseOperator::asymmetry() const {
  if (rows_ != cols_) {
    throw DimensionError("asymmetry of a non-square matrix");
  }
  const SparseOperator diff = add(1.0, *this, -1.0, transpose());
  return diff.max_abs();
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseOperator SparseOperator::scale_rows(std::span<const double> s) const {
  if (s.size() != rows_) {
    throw DimensionError("row scaling size mismatch");
  }
  std::vector<double> vals(values_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) vals[p] *= s[i];
  }
  SparseOperator r(rows_, cols_, offsets_, cols_ids_, std::move(vals));
  r.domain = domain;
  r.codomain = codomain;
  return r;
}

void SparseOperator::export_coordinates(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write matrix file " + path.string());
  }
  out << std::setprecision(17);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      out << i << ' ' << cols_ids_[p] << ' ' << values_[p] << '\n';
    }
  }
  if (!out) {
    throw std::runtime_error("failed writing matrix file " + path.string());
  }
}

TripletBuilder::TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

void TripletBuilder::add(std::size_t row, std::size_t col, double value) {
  if (row >= rows_ || col >= cols_) {
    throw DimensionError("triplet index out of range");
  }
  entries_.push_back({row, col, value});
}

SparseOperator TripletBuilder::build() const {
  std::vector<std::size_t> order(entries_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Stable on insertion order so duplicates are summed in a fixed sequence.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
  });
  std::vector<std::size_t> offsets(rows_ + 1, 0);
  std::vector<int> ids;
  std::vector<double> vals;
  ids.reserve(entries_.size());
  vals.reserve(entries_.size());
  std::size_t last_row = rows_;
  std::size_t last_col = cols_;
  for (std::size_t idx : order) {
    const auto& e = entries_[idx];
    if (e.row == last_row && e.col == last_col) {
      vals.back() += e.value;
      continue;
    }
    ids.push_back(static_cast<int>(e.col));
    vals.push_back(e.value);
    ++offsets[e.row + 1];
    last_row = e.row;
    last_col = e.col;
  }
  for (std::size_t i = 0; i < rows_; ++i) offsets[i + 1] += offsets[i];
  return SparseOperator(rows_, cols_, std::move(offsets), std::move(ids), std::move(vals));
}

SparseOperator add(double a, const SparseOperator& A, double b, const SparseOperator& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw DimensionError("matrix sum size mismatch");
  }
  const auto ao = A.row_offsets();
  const auto bo = B.row_offsets();
  const auto ac = A.col_ids();
  const auto bc = B.col_ids();
  const auto av = A.values();
  const auto bv = B.values();
  std::vector<std::size_t> offsets(A.rows() + 1, 0);
  std::vector<int> ids;
  std::vector<double> vals;
  ids.reserve(A.nnz() + B.nnz());
  vals.reserve(A.nnz() + B.nnz());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::size_t p = ao[i];
    std::size_t q = bo[i];
    while (p < ao[i + 1] || q < bo[i + 1]) {
      if (q == bo[i + 1] || (p < ao[i + 1] && ac[p] < bc[q])) {
        ids.push_back(ac[p]);
        vals.push_back(a * av[p++]);
      } else if (p == ao[i + 1] || bc[q] < ac[p]) {
        ids.push_back(bc[q]);
        vals.push_back(b * bv[q++]);
      } else {
        ids.push_back(ac[p]);
        vals.push_back(a * av[p++] + b * bv[q++]);
      }
    }
    offsets[i + 1] = ids.size();
  }
  SparseOperator r(A.rows(), A.cols(), std::move(offsets), std::move(ids), std::move(vals));
  r.domain = A.domain;
  r.codomain = A.codomain;
  return r;
}

SparseOperator multiply(const SparseOperator& A, const SparseOperator& B) {
  if (A.cols() != B.rows()) {
    throw DimensionError("matrix product size mismatch");
  }
  const auto ao = A.row_offsets();
  const auto bo = B.row_offsets();
  const auto ac = A.col_ids();
  const auto bc = B.col_ids();
  const auto av = A.values();
  const auto bv = B.values();
  std::vector<std::size_t> offsets(A.rows() + 1, 0);
  std::vector<int> ids;
  std::vector<double> vals;
  std::vector<double> acc(B.cols(), 0.0);
  std::vector<char> used(B.cols(), 0);
  std::vector<int> pattern;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    pattern.clear();
    for (std::size_t p = ao[i]; p < ao[i + 1]; ++p) {
      const auto k = static_cast<std::size_t>(ac[p]);
      for (std::size_t q = bo[k]; q < bo[k + 1]; ++q) {
        const auto j = static_cast<std::size_t>(bc[q]);
        if (!used[j]) {
          used[j] = 1;
          pattern.push_back(bc[q]);
        }
        acc[j] += av[p] * bv[q];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (int j : pattern) {
      ids.push_back(j);
      vals.push_back(acc[static_cast<std::size_t>(j)]);
      acc[static_cast<std::size_t>(j)] = 0.0;
      used[static_cast<std::size_t>(j)] = 0;
    }
    offsets[i + 1] = ids.size();
  }
  SparseOperator r(A.rows(), B.cols(), std::move(offsets), std::move(ids), std::move(vals));
  r.domain = B.domain;
  r.codomain = A.codomain;
  return r;
}

SparseOperator identity(std::size_t n) {
  std::vector<double> ones(n, 1.0);
  return diagonal_matrix(ones);
}

SparseOperator diagonal_matrix(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    ids[i] = static_cast<int>(i);
  }
  return SparseOperator(n, n, std::move(offsets), std::move(ids), std::vector<double>(d.begin(), d.end()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot product size mismatch");
  }
  return pairwise_dot(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("axpy size mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace fvproj
