#pragma once

#include "dynct/image.hpp"

#include <vector>

namespace dynct {

/// Pixels whose reconstruction gradient exceeds beta at some time; the
/// region where the scan data carries motion information.
struct ActiveMask {
    int n = 0;
    std::vector<bool> mask;
    size_t count = 0;

    bool at(int i, int j) const { return mask[static_cast<size_t>(i) * n + j]; }
};

/// Union over the reconstructions of pixels with |df/dx| > beta or
/// |df/dy| > beta (central Neumann stencil).
ActiveMask active_set(const std::vector<ImageGrid>& recons, double beta);

/// sqrt( sum_{p in mask} ((vx-wx)^2 + (vy-wy)^2) / |mask| ).
/// Throws std::invalid_argument on an empty mask.
double rmse_active(const FlowField& v, const FlowField& v_hat, const ActiveMask& mask);

/// Euclidean norm of the vectorized difference.
double l2_error(const ImageGrid& img, const ImageGrid& ref);

} // namespace dynct
