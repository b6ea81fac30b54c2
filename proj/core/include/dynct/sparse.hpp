#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dynct {

/// Row-compressed sparse matrix of nonnegative ray/stencil weights.
///
/// Rows are stored contiguously as (column, value) pairs; the entry order
/// within a row is whatever the assembling kernel produced (ascending
/// column for all builders in this project). apply() accumulates strictly
/// in storage order, so results are reproducible bit for bit for any
/// worker count.
class CsrMatrix {
  public:
    CsrMatrix() = default;
    CsrMatrix(int64_t n_rows, int64_t n_cols);

    int64_t rows() const { return n_rows_; }
    int64_t cols() const { return n_cols_; }
    int64_t nnz() const { return static_cast<int64_t>(vals_.size()); }

    /// Append one fully-assembled row; rows must arrive in order.
    void push_row(std::span<const int32_t> cols, std::span<const double> vals);

    std::span<const int32_t> row_cols(int64_t r) const;
    std::span<const double> row_vals(int64_t r) const;

    double row_sum(int64_t r) const;

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    /// y = A^T x, sequential scatter (deterministic).
    void apply_transpose(std::span<const double> x, std::span<double> y) const;

    /// Explicit transpose; used by solvers so both directions run as
    /// deterministic gathers.
    CsrMatrix transposed() const;

    const std::vector<int64_t>& row_ptr() const { return row_ptr_; }
    const std::vector<int32_t>& col_idx() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }

  private:
    int64_t n_rows_ = 0;
    int64_t n_cols_ = 0;
    int64_t rows_pushed_ = 0;
    std::vector<int64_t> row_ptr_;
    std::vector<int32_t> cols_;
    std::vector<double> vals_;
};

} // namespace dynct
