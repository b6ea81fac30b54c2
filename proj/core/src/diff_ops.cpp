#include "dynct/diff_ops.hpp"

#include <stdexcept>

namespace dynct {

DiffOperators build_diff_operators(int n) {
    if (n < 2)
        throw std::invalid_argument("build_diff_operators: n must be >= 2");
    const int64_t dim = static_cast<int64_t>(n) * n;
    DiffOperators ops{CsrMatrix(dim, dim), CsrMatrix(dim, dim), CsrMatrix(dim, dim)};

    std::vector<int32_t> cols;
    std::vector<double> vals;
    auto idx = [n](int i, int j) { return static_cast<int32_t>(i) * n + j; };

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // d/dx: (f(j+1) - f(j-1))/2 with the edge ghost replicating f.
            cols.clear(); vals.clear();
            const int jm = j > 0 ? j - 1 : 0;
            const int jp = j < n - 1 ? j + 1 : n - 1;
            cols.push_back(idx(i, jm)); vals.push_back(-0.5);
            cols.push_back(idx(i, jp)); vals.push_back(0.5);
            ops.dx.push_row(cols, vals);

            cols.clear(); vals.clear();
            const int im = i > 0 ? i - 1 : 0;
            const int ip = i < n - 1 ? i + 1 : n - 1;
            cols.push_back(idx(im, j)); vals.push_back(-0.5);
            cols.push_back(idx(ip, j)); vals.push_back(0.5);
            ops.dy.push_row(cols, vals);

            // Laplacian, entries in ascending vec index.
            cols.clear(); vals.clear();
            double diag = 0.0;
            if (i > 0) diag -= 1.0;
            if (j > 0) diag -= 1.0;
            if (j < n - 1) diag -= 1.0;
            if (i < n - 1) diag -= 1.0;
            if (i > 0) { cols.push_back(idx(i - 1, j)); vals.push_back(1.0); }
            if (j > 0) { cols.push_back(idx(i, j - 1)); vals.push_back(1.0); }
            cols.push_back(idx(i, j)); vals.push_back(diag);
            if (j < n - 1) { cols.push_back(idx(i, j + 1)); vals.push_back(1.0); }
            if (i < n - 1) { cols.push_back(idx(i + 1, j)); vals.push_back(1.0); }
            ops.dxx_plus_dyy.push_row(cols, vals);
        }
    }
    return ops;
}

} // namespace dynct
