#include "dynct/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dynct {

double GaussianSampler::uniform01() {
    // top 53 bits -> [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double GaussianSampler::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

namespace {

void add_noise(std::vector<double>& values, double sigma, uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return;
    GaussianSampler g(seed);
    for (double& v : values) v += sigma * g.next();
}

} // namespace

Sinogram add_gaussian_noise(const Sinogram& sino, double sigma, uint64_t seed) {
    Sinogram out = sino;
    add_noise(out.values, sigma, seed);
    return out;
}

ImageGrid add_gaussian_noise(const ImageGrid& img, double sigma, uint64_t seed) {
    ImageGrid out = img;
    add_noise(out.values(), sigma, seed);
    return out;
}

} // namespace dynct
