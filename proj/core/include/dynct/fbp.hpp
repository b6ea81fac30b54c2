#pragma once

#include "dynct/projector.hpp"

namespace dynct {

/// Ramp-filter every detector row of a sinogram: zero-pad to at least
/// twice the detector count, multiply the spectrum by |rho|, take the
/// real part back. Exposed for tests.
std::vector<double> ramp_filter_rows(const std::vector<double>& values, int n_angles, int n_det,
                                     double det_spacing);

/// Filtered backprojection of one scan's sinogram onto an n x n grid,
/// with bilinear detector interpolation and quadrature weight
/// pi/angles_per_scan. The result is the reconstruction at the scan's
/// mid time. Throws std::invalid_argument if the sinogram does not cover
/// an angle interval of length pi.
ImageGrid fbp_reconstruct(const Sinogram& sino, int n);

} // namespace dynct
