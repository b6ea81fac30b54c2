#pragma once

#include "dynct/image.hpp"
#include "dynct/projector.hpp"

#include <cstdint>
#include <random>

namespace dynct {

/// Deterministic, platform-portable N(0,1) sampler: std::mt19937_64 bits
/// mapped to [0,1) doubles, Box-Muller transform. The standard pins the
/// mt19937_64 sequence, so seeded runs replicate everywhere.
class GaussianSampler {
  public:
    explicit GaussianSampler(uint64_t seed) : rng_(seed) {}

    double next();

  private:
    double uniform01();

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Adds i.i.d. N(0, sigma^2) values from a seeded generator; sigma = 0
/// returns the input unchanged.
Sinogram add_gaussian_noise(const Sinogram& sino, double sigma, uint64_t seed);
ImageGrid add_gaussian_noise(const ImageGrid& img, double sigma, uint64_t seed);

} // namespace dynct
