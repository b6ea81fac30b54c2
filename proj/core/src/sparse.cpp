#include "dynct/sparse.hpp"

#include <cassert>
#include <stdexcept>

namespace dynct {

CsrMatrix::CsrMatrix(int64_t n_rows, int64_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {
    if (n_rows < 0 || n_cols < 0)
        throw std::invalid_argument("CsrMatrix: negative dimension");
    row_ptr_.reserve(static_cast<size_t>(n_rows) + 1);
    row_ptr_.push_back(0);
}

void CsrMatrix::push_row(std::span<const int32_t> cols, std::span<const double> vals) {
    if (cols.size() != vals.size())
        throw std::invalid_argument("CsrMatrix::push_row: size mismatch");
    if (rows_pushed_ >= n_rows_)
        throw std::logic_error("CsrMatrix::push_row: too many rows");
    cols_.insert(cols_.end(), cols.begin(), cols.end());
    vals_.insert(vals_.end(), vals.begin(), vals.end());
    row_ptr_.push_back(static_cast<int64_t>(vals_.size()));
    ++rows_pushed_;
}

std::span<const int32_t> CsrMatrix::row_cols(int64_t r) const {
    return {cols_.data() + row_ptr_[r], static_cast<size_t>(row_ptr_[r + 1] - row_ptr_[r])};
}

std::span<const double> CsrMatrix::row_vals(int64_t r) const {
    return {vals_.data() + row_ptr_[r], static_cast<size_t>(row_ptr_[r + 1] - row_ptr_[r])};
}

double CsrMatrix::row_sum(int64_t r) const {
    double s = 0.0;
    for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += vals_[k];
    return s;
}

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
    assert(static_cast<int64_t>(x.size()) == n_cols_);
    assert(static_cast<int64_t>(y.size()) == n_rows_);
    const int64_t nr = rows_pushed_;
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < nr; ++r) {
        double acc = 0.0;
        for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            acc += vals_[k] * x[static_cast<size_t>(cols_[k])];
        y[static_cast<size_t>(r)] = acc;
    }
}

void CsrMatrix::apply_transpose(std::span<const double> x, std::span<double> y) const {
    assert(static_cast<int64_t>(x.size()) == n_rows_);
    assert(static_cast<int64_t>(y.size()) == n_cols_);
    for (auto& v : y) v = 0.0;
    for (int64_t r = 0; r < rows_pushed_; ++r) {
        const double xr = x[static_cast<size_t>(r)];
        for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            y[static_cast<size_t>(cols_[k])] += vals_[k] * xr;
    }
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.n_rows_ = n_cols_;
    t.n_cols_ = n_rows_;
    t.rows_pushed_ = n_cols_;
    // counting pass
    std::vector<int64_t> count(static_cast<size_t>(n_cols_) + 1, 0);
    for (int32_t c : cols_) ++count[static_cast<size_t>(c) + 1];
    for (size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    t.row_ptr_ = count;
    t.cols_.resize(cols_.size());
    t.vals_.resize(vals_.size());
    std::vector<int64_t> fill(count.begin(), count.end() - 1);
    for (int64_t r = 0; r < rows_pushed_; ++r) {
        for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int64_t dst = fill[static_cast<size_t>(cols_[k])]++;
            t.cols_[dst] = static_cast<int32_t>(r);
            t.vals_[dst] = vals_[k];
        }
    }
    return t;
}

} // namespace dynct
