#pragma once

#include "dynct/image.hpp"
#include "dynct/solvers.hpp"
#include "dynct/sparse.hpp"

#include <vector>

namespace dynct {

/// One variational motion system assembled from three consecutive
/// reconstructions: matrix is the symmetric 2n^2 x 2n^2 block system
///   [ diag(fx^2) - lam*L   diag(fx fy)        ] [vec(vx)]   [-fx . ft]
///   [ diag(fx fy)          diag(fy^2) - lam*L ] [vec(vy)] = [-fy . ft]
/// with fx, fy the central derivatives of the middle image, L the
/// Neumann Laplacian, and ft = (f_next - f_prev)/2 the time term for
/// flow expressed in pixels per scan.
struct HsSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    double lambda = 1.0;
    int n = 0;
};

HsSystem assemble_hs(const ImageGrid& f_prev, const ImageGrid& f_mid, const ImageGrid& f_next,
                     double lambda);

struct FlowSolverConfig {
    int max_iterations = 500;
    double rel_tolerance = 1e-8;
};

/// Minimizes || [A_1; ...; A_k] v - [b_1; ...; b_k] || by conjugate
/// gradient on the normal equations, warm-started at init. Hitting the
/// iteration cap returns the best iterate (recorded in the diagnostics);
/// SolverError is thrown only on true divergence.
FlowField stack_and_solve(const std::vector<HsSystem>& systems, const FlowField& init,
                          const FlowSolverConfig& cfg = {}, SolveInfo* info = nullptr);

/// Coarse-to-fine motion estimate from m >= 3 per-scan reconstructions:
/// for level i = depth..0 solve the stacked systems on the images reduced
/// by 2^i, warm-starting each level from the previous one interpolated
/// (and rescaled) to the finer grid.
FlowField estimate_motion(const std::vector<ImageGrid>& recons, int depth, double lambda = 1.0,
                          const FlowSolverConfig& cfg = {},
                          std::vector<SolveInfo>* level_info = nullptr);

} // namespace dynct
