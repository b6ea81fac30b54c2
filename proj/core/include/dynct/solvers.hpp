#pragma once

#include "dynct/sparse.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace dynct {

/// Abstract linear operator for the least-squares solvers.
struct LinearOp {
    virtual ~LinearOp() = default;
    virtual int64_t rows() const = 0;
    virtual int64_t cols() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    virtual void apply_transpose(std::span<const double> x, std::span<double> y) const = 0;
};

/// CSR matrix with an explicit transpose so both directions run as
/// deterministic row gathers.
class CsrOp final : public LinearOp {
  public:
    explicit CsrOp(const CsrMatrix& a) : a_(&a), at_(a.transposed()) {}
    int64_t rows() const override { return a_->rows(); }
    int64_t cols() const override { return a_->cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override { a_->apply(x, y); }
    void apply_transpose(std::span<const double> x, std::span<double> y) const override {
        at_.apply(x, y);
    }

  private:
    const CsrMatrix* a_;
    CsrMatrix at_;
};

/// Vertical stack of symmetric blocks (each block is its own transpose).
class StackedSymmetricOp final : public LinearOp {
  public:
    explicit StackedSymmetricOp(std::vector<const CsrMatrix*> blocks);
    int64_t rows() const override { return total_rows_; }
    int64_t cols() const override { return n_cols_; }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

  private:
    std::vector<const CsrMatrix*> blocks_;
    int64_t total_rows_ = 0;
    int64_t n_cols_ = 0;
};

struct SolverConfig {
    int max_iterations = 200;
    double rel_tolerance = 1e-6;
    double damping = 0.0;
};

struct SolveInfo {
    int iterations = 0;
    bool converged = false;
    /// relative normal-equations residual ||A^T r|| / ||A^T b|| at exit
    double relative_residual = 0.0;
    /// ||r|| after each iteration (monotone non-increasing for both solvers)
    std::vector<double> residual_history;
};

/// Thrown when an iteration produces non-finite values (true divergence,
/// as opposed to merely hitting the iteration cap).
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, SolveInfo info)
        : std::runtime_error(what), info(std::move(info)) {}
    SolveInfo info;
};

/// Conjugate gradient on the normal equations (CGLS):
/// min ||A x - b||, warm-started at x0 when given.
std::vector<double> solve_cgls(const LinearOp& A, std::span<const double> b,
                               const SolverConfig& cfg, SolveInfo* info = nullptr,
                               const std::vector<double>* x0 = nullptr);

/// Golub-Kahan bidiagonalization least squares (LSQR) with optional
/// damping; warm-started at x0 when given.
std::vector<double> solve_lsqr(const LinearOp& A, std::span<const double> b,
                               const SolverConfig& cfg, SolveInfo* info = nullptr,
                               const std::vector<double>* x0 = nullptr);

} // namespace dynct
