#include "dynct/flow.hpp"

#include "dynct/diff_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynct {

HsSystem assemble_hs(const ImageGrid& f_prev, const ImageGrid& f_mid, const ImageGrid& f_next,
                     double lambda) {
    const int n = f_mid.n();
    if (f_prev.n() != n || f_next.n() != n)
        throw std::invalid_argument("assemble_hs: image sizes differ");
    if (!(lambda > 0.0)) throw std::invalid_argument("assemble_hs: lambda must be positive");

    const ImageGrid fx_img = spatial_derivative(f_mid, Axis::X);
    const ImageGrid fy_img = spatial_derivative(f_mid, Axis::Y);
    const std::vector<double>& fx = fx_img.values();
    const std::vector<double>& fy = fy_img.values();

    const int64_t dim = static_cast<int64_t>(n) * n;
    const CsrMatrix lap = build_diff_operators(n).dxx_plus_dyy;

    HsSystem sys{CsrMatrix(2 * dim, 2 * dim), std::vector<double>(2 * dim), lambda, n};

    std::vector<int32_t> cols;
    std::vector<double> vals;
    // x block rows: -lam*L plus diag(fx^2) on the diagonal, then the
    // off-diagonal coupling diag(fx fy) in the y block.
    for (int64_t p = 0; p < dim; ++p) {
        cols.clear();
        vals.clear();
        const auto lc = lap.row_cols(p);
        const auto lv = lap.row_vals(p);
        for (size_t k = 0; k < lc.size(); ++k) {
            double v = -lambda * lv[k];
            if (lc[k] == p) v += fx[p] * fx[p];
            cols.push_back(lc[k]);
            vals.push_back(v);
        }
        cols.push_back(static_cast<int32_t>(dim + p));
        vals.push_back(fx[p] * fy[p]);
        sys.matrix.push_row(cols, vals);
    }
    for (int64_t p = 0; p < dim; ++p) {
        cols.clear();
        vals.clear();
        cols.push_back(static_cast<int32_t>(p));
        vals.push_back(fx[p] * fy[p]);
        const auto lc = lap.row_cols(p);
        const auto lv = lap.row_vals(p);
        for (size_t k = 0; k < lc.size(); ++k) {
            double v = -lambda * lv[k];
            if (lc[k] == p) v += fy[p] * fy[p];
            cols.push_back(static_cast<int32_t>(dim + lc[k]));
            vals.push_back(v);
        }
        sys.matrix.push_row(cols, vals);
    }

    const std::vector<double>& prev = f_prev.values();
    const std::vector<double>& next = f_next.values();
    for (int64_t p = 0; p < dim; ++p) {
        const double ft = 0.5 * (next[p] - prev[p]);
        sys.rhs[p] = -fx[p] * ft;
        sys.rhs[dim + p] = -fy[p] * ft;
    }
    return sys;
}

FlowField stack_and_solve(const std::vector<HsSystem>& systems, const FlowField& init,
                          const FlowSolverConfig& cfg, SolveInfo* info) {
    if (systems.empty()) throw std::invalid_argument("stack_and_solve: no systems");
    const int n = systems.front().n;
    for (const HsSystem& s : systems)
        if (s.n != n) throw std::invalid_argument("stack_and_solve: mixed system sizes");
    if (init.n() != n) throw std::invalid_argument("stack_and_solve: init size mismatch");

    const int64_t dim = static_cast<int64_t>(n) * n;
    std::vector<const CsrMatrix*> blocks;
    std::vector<double> rhs;
    rhs.reserve(systems.size() * static_cast<size_t>(2 * dim));
    for (const HsSystem& s : systems) {
        blocks.push_back(&s.matrix);
        rhs.insert(rhs.end(), s.rhs.begin(), s.rhs.end());
    }
    StackedSymmetricOp op(std::move(blocks));

    std::vector<double> x0(static_cast<size_t>(2 * dim));
    for (int64_t p = 0; p < dim; ++p) {
        x0[p] = init.vx.values()[p];
        x0[dim + p] = init.vy.values()[p];
    }

    SolverConfig scfg{cfg.max_iterations, cfg.rel_tolerance, 0.0};
    SolveInfo local;
    const std::vector<double> x = solve_cgls(op, rhs, scfg, &local, &x0);
    if (info) *info = std::move(local);

    FlowField out(n);
    for (int64_t p = 0; p < dim; ++p) {
        out.vx.values()[p] = x[p];
        out.vy.values()[p] = x[dim + p];
    }
    return out;
}

FlowField estimate_motion(const std::vector<ImageGrid>& recons, int depth, double lambda,
                          const FlowSolverConfig& cfg, std::vector<SolveInfo>* level_info) {
    if (recons.size() < 3)
        throw std::invalid_argument("estimate_motion: need at least 3 reconstructions");
    const int n = recons.front().n();
    for (const ImageGrid& r : recons)
        if (r.n() != n) throw std::invalid_argument("estimate_motion: mixed image sizes");
    if (depth < 0) throw std::invalid_argument("estimate_motion: depth must be >= 0");
    if ((n % (1 << depth)) != 0 || (n >> depth) < 4)
        throw std::invalid_argument("estimate_motion: depth " + std::to_string(depth) +
                                    " too large for grid size " + std::to_string(n));

    FlowField v(n >> depth); // zeros
    if (level_info) level_info->clear();
    for (int i = depth; i >= 0; --i) {
        const int ln = n >> i;
        std::vector<ImageGrid> level;
        level.reserve(recons.size());
        for (const ImageGrid& r : recons) level.push_back(resample(r, ln));

        std::vector<HsSystem> systems;
        systems.reserve(recons.size() - 2);
        for (size_t j = 1; j + 1 < level.size(); ++j)
            systems.push_back(assemble_hs(level[j - 1], level[j], level[j + 1], lambda));

        SolveInfo si;
        v = stack_and_solve(systems, v, cfg, &si);
        if (level_info) level_info->push_back(std::move(si));

        if (i > 0) v = resample(v, n >> (i - 1));
    }
    return v;
}

} // namespace dynct
