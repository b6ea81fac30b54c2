#include "dynct/solvers.hpp"

#include <cmath>

namespace dynct {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace

StackedSymmetricOp::StackedSymmetricOp(std::vector<const CsrMatrix*> blocks)
    : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("StackedSymmetricOp: no blocks");
    n_cols_ = blocks_.front()->cols();
    for (const CsrMatrix* b : blocks_) {
        if (b->cols() != n_cols_ || b->rows() != b->cols())
            throw std::invalid_argument("StackedSymmetricOp: blocks must be square, same size");
        total_rows_ += b->rows();
    }
}

void StackedSymmetricOp::apply(std::span<const double> x, std::span<double> y) const {
    int64_t off = 0;
    for (const CsrMatrix* b : blocks_) {
        b->apply(x, y.subspan(static_cast<size_t>(off), static_cast<size_t>(b->rows())));
        off += b->rows();
    }
}

void StackedSymmetricOp::apply_transpose(std::span<const double> x, std::span<double> y) const {
    std::vector<double> tmp(static_cast<size_t>(n_cols_));
    for (auto& v : y) v = 0.0;
    int64_t off = 0;
    for (const CsrMatrix* b : blocks_) {
        b->apply(x.subspan(static_cast<size_t>(off), static_cast<size_t>(b->rows())), tmp);
        for (size_t i = 0; i < tmp.size(); ++i) y[i] += tmp[i];
        off += b->rows();
    }
}

std::vector<double> solve_cgls(const LinearOp& A, std::span<const double> b,
                               const SolverConfig& cfg, SolveInfo* info,
                               const std::vector<double>* x0) {
    const size_t nc = static_cast<size_t>(A.cols());
    const size_t nr = static_cast<size_t>(A.rows());
    if (b.size() != nr) throw std::invalid_argument("solve_cgls: rhs size mismatch");

    std::vector<double> x = x0 ? *x0 : std::vector<double>(nc, 0.0);
    if (x.size() != nc) throw std::invalid_argument("solve_cgls: x0 size mismatch");

    std::vector<double> r(nr), s(nc), p(nc), q(nr), atb(nc);
    A.apply_transpose(b, atb);
    const double atb_norm = norm2(atb);

    A.apply(x, q);
    for (size_t i = 0; i < nr; ++i) r[i] = b[i] - q[i];
    A.apply_transpose(r, s);
    p = s;
    double gamma = dot(s, s);

    SolveInfo out;
    out.relative_residual = atb_norm > 0.0 ? std::sqrt(gamma) / atb_norm : 0.0;
    if (atb_norm == 0.0 || out.relative_residual <= cfg.rel_tolerance) {
        out.converged = true;
        if (info) *info = std::move(out);
        return x;
    }

    for (int it = 0; it < cfg.max_iterations; ++it) {
        A.apply(p, q);
        const double qq = dot(q, q);
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        for (size_t i = 0; i < nc; ++i) x[i] += alpha * p[i];
        for (size_t i = 0; i < nr; ++i) r[i] -= alpha * q[i];
        A.apply_transpose(r, s);
        const double gamma_new = dot(s, s);
        out.iterations = it + 1;
        out.residual_history.push_back(norm2(r));
        out.relative_residual = std::sqrt(gamma_new) / atb_norm;
        if (!std::isfinite(gamma_new))
            throw SolverError("solve_cgls: iteration diverged to non-finite values", out);
        if (out.relative_residual <= cfg.rel_tolerance) {
            out.converged = true;
            break;
        }
        const double beta = gamma_new / gamma;
        gamma = gamma_new;
        for (size_t i = 0; i < nc; ++i) p[i] = s[i] + beta * p[i];
    }
    if (info) *info = std::move(out);
    return x;
}

std::vector<double> solve_lsqr(const LinearOp& A, std::span<const double> b,
                               const SolverConfig& cfg, SolveInfo* info,
                               const std::vector<double>* x0) {
    const size_t nc = static_cast<size_t>(A.cols());
    const size_t nr = static_cast<size_t>(A.rows());
    if (b.size() != nr) throw std::invalid_argument("solve_lsqr: rhs size mismatch");

    std::vector<double> x = x0 ? *x0 : std::vector<double>(nc, 0.0);
    if (x.size() != nc) throw std::invalid_argument("solve_lsqr: x0 size mismatch");

    std::vector<double> u(nr), v(nc), w(nc), tmp_r(nr), tmp_c(nc);

    // u = b - A x
    A.apply(x, tmp_r);
    for (size_t i = 0; i < nr; ++i) u[i] = b[i] - tmp_r[i];
    double beta = norm2(u);
    SolveInfo out;
    if (beta == 0.0) {
        out.converged = true;
        if (info) *info = std::move(out);
        return x;
    }
    for (auto& e : u) e /= beta;

    A.apply_transpose(u, v);
    double alpha = norm2(v);
    if (alpha == 0.0) {
        out.converged = true; // b - A x is orthogonal to range(A): x is optimal
        if (info) *info = std::move(out);
        return x;
    }
    for (auto& e : v) e /= alpha;
    w = v;

    double phibar = beta;
    double rhobar = alpha;
    const double beta0 = beta;
    double norm_a2 = 0.0; // running Frobenius estimate

    for (int it = 0; it < cfg.max_iterations; ++it) {
        // bidiagonalization step
        A.apply(v, tmp_r);
        for (size_t i = 0; i < nr; ++i) u[i] = tmp_r[i] - alpha * u[i];
        beta = norm2(u);
        if (beta > 0.0)
            for (auto& e : u) e /= beta;
        A.apply_transpose(u, tmp_c);
        for (size_t i = 0; i < nc; ++i) v[i] = tmp_c[i] - beta * v[i];
        alpha = norm2(v);
        if (alpha > 0.0)
            for (auto& e : v) e /= alpha;

        norm_a2 += alpha * alpha + beta * beta + cfg.damping * cfg.damping;

        // eliminate the damping term, then the subdiagonal
        double rhobar1 = rhobar;
        double phibar1 = phibar;
        if (cfg.damping > 0.0) {
            rhobar1 = std::hypot(rhobar, cfg.damping);
            const double c1 = rhobar / rhobar1;
            phibar1 = c1 * phibar;
        }
        const double rho = std::hypot(rhobar1, beta);
        const double c = rhobar1 / rho;
        const double s = beta / rho;
        const double theta = s * alpha;
        rhobar = -c * alpha;
        const double phi = c * phibar1;
        phibar = s * phibar1;

        const double t1 = phi / rho;
        const double t2 = -theta / rho;
        for (size_t i = 0; i < nc; ++i) {
            x[i] += t1 * w[i];
            w[i] = v[i] + t2 * w[i];
        }

        out.iterations = it + 1;
        out.residual_history.push_back(phibar);
        if (!std::isfinite(phibar))
            throw SolverError("solve_lsqr: iteration diverged to non-finite values", out);

        // ||A^T r|| = phibar * alpha * |c|; relative form follows Paige & Saunders
        const double norm_ar = phibar * alpha * std::abs(c);
        const double norm_a = std::sqrt(norm_a2);
        out.relative_residual = norm_a > 0.0 && phibar > 0.0 ? norm_ar / (norm_a * phibar) : 0.0;
        const bool residual_small = phibar <= cfg.rel_tolerance * beta0;
        const bool lsq_converged = out.relative_residual <= cfg.rel_tolerance;
        if (residual_small || lsq_converged) {
            out.converged = true;
            break;
        }
    }
    if (info) *info = std::move(out);
    return x;
}

} // namespace dynct
