#include "dynct/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dynct {

ActiveMask active_set(const std::vector<ImageGrid>& recons, double beta) {
    if (recons.empty()) throw std::invalid_argument("active_set: no reconstructions");
    if (!(beta > 0.0)) throw std::invalid_argument("active_set: beta must be positive");
    const int n = recons.front().n();
    ActiveMask out;
    out.n = n;
    out.mask.assign(static_cast<size_t>(n) * n, false);
    for (const ImageGrid& rec : recons) {
        if (rec.n() != n) throw std::invalid_argument("active_set: mixed image sizes");
        const ImageGrid gx = spatial_derivative(rec, Axis::X);
        const ImageGrid gy = spatial_derivative(rec, Axis::Y);
        for (size_t p = 0; p < out.mask.size(); ++p)
            if (std::abs(gx.values()[p]) > beta || std::abs(gy.values()[p]) > beta)
                out.mask[p] = true;
    }
    for (bool b : out.mask)
        if (b) ++out.count;
    return out;
}

double rmse_active(const FlowField& v, const FlowField& v_hat, const ActiveMask& mask) {
    if (v.n() != v_hat.n() || v.n() != mask.n)
        throw std::invalid_argument("rmse_active: shape mismatch");
    if (mask.count == 0) throw std::invalid_argument("rmse_active: empty active set");
    double acc = 0.0;
    const size_t total = mask.mask.size();
    for (size_t p = 0; p < total; ++p) {
        if (!mask.mask[p]) continue;
        const double ex = v.vx.values()[p] - v_hat.vx.values()[p];
        const double ey = v.vy.values()[p] - v_hat.vy.values()[p];
        acc += ex * ex + ey * ey;
    }
    return std::sqrt(acc / static_cast<double>(mask.count));
}

double l2_error(const ImageGrid& img, const ImageGrid& ref) {
    if (img.n() != ref.n()) throw std::invalid_argument("l2_error: shape mismatch");
    double acc = 0.0;
    for (size_t p = 0; p < img.size(); ++p) {
        const double d = img.values()[p] - ref.values()[p];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace dynct
