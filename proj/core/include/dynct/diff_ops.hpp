#pragma once

#include "dynct/sparse.hpp"

namespace dynct {

/// Matrix forms of the finite-difference stencils on an n x n grid,
/// acting on vec(img) with index i*n + j (x fastest). Second-order central
/// differences, Neumann boundaries via edge replication. dx and dy carry
/// the first derivatives, dxx_plus_dyy the five-point Laplacian.
struct DiffOperators {
    CsrMatrix dx;
    CsrMatrix dy;
    CsrMatrix dxx_plus_dyy;
};

DiffOperators build_diff_operators(int n);

} // namespace dynct
