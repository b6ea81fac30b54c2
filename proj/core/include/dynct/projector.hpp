#pragma once

#include "dynct/geometry.hpp"
#include "dynct/image.hpp"
#include "dynct/sparse.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dynct {

/// Weighting scheme for the discrete Radon transform.
///  - Length: exact chord length of the ray through each pixel.
///  - Joseph: steps along the dominant axis, splitting each sample
///    bilinearly between the two nearest pixels, scaled by the step
///    length along the ray.
enum class ProjScheme { Length, Joseph };

ProjScheme proj_scheme_from_string(const std::string& s);

/// Projection data of one scan: rows are angles (in scan order), columns
/// detectors. The acquisition time of row a is T(scan_index*pi + local_angle(a)).
struct Sinogram {
    ScanProtocol protocol;
    int scan_index = 0;
    std::vector<double> values;

    Sinogram() = default;
    Sinogram(const ScanProtocol& p, int scan);

    double& at(int a, int k) { return values[static_cast<size_t>(a) * protocol.n_det + k]; }
    double at(int a, int k) const { return values[static_cast<size_t>(a) * protocol.n_det + k]; }
    double row_time(int a) const;
    void validate() const;
};

/// Scratch space for one matrix row; entries appear in tracing order.
struct RowBuffer {
    std::vector<int32_t> cols;
    std::vector<double> vals;
    void clear() {
        cols.clear();
        vals.clear();
    }
};

/// Weights of the ray L(alpha, u) over the n x n pixel grid (vec index
/// i*n + j). alpha is the in-scan angle in [0, pi).
void project_row(ProjScheme scheme, double alpha, double u, int n, RowBuffer& out);

/// Accumulate buffer . vec(img), strictly in storage order (matches
/// CsrMatrix::apply bit for bit).
double row_dot(const RowBuffer& row, const std::vector<double>& img);

/// One scan's projection operator: one row per (angle, detector) pair,
/// row index a * n_det + k.
CsrMatrix build_static_matrix(const ScanProtocol& protocol, int n, ProjScheme scheme);

/// Project a static image over one scan's angles. Equals
/// build_static_matrix(...) applied to vec(img).
Sinogram project_static(const ImageGrid& img, const ScanProtocol& protocol, ProjScheme scheme,
                        int supersampling = 1);

/// Simulate all m scans of a phantom moving in the given per-scan flow
/// field: each angle's data is taken from the phantom warped to that
/// angle's acquisition time (cumulative fraction T(alpha)/dt).
/// supersampling = 2 averages two sub-rays per detector, for studies that
/// avoid sharing the exact projector between simulation and inversion.
std::vector<Sinogram> simulate_dynamic_sinogram(const ImageGrid& phantom, const FlowField& flow,
                                                const ScanProtocol& protocol,
                                                ProjScheme scheme = ProjScheme::Joseph,
                                                int supersampling = 1);

} // namespace dynct
