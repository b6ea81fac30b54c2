#pragma once

#include "dynct/geometry.hpp"
#include "dynct/image.hpp"
#include "dynct/projector.hpp"
#include "dynct/solvers.hpp"
#include "dynct/sparse.hpp"

#include <array>

namespace dynct {

/// A projection line deformed by the time-scaled flow: the ordered moved
/// segment midpoints, joined by straight pieces.
struct MovedPath {
    std::vector<std::array<double, 2>> vertices;
    Ray ray;
    double scale = 0.0;

    bool empty() const { return vertices.size() < 2; }
};

/// Bilinear flow sample with the field zero-extended outside the image
/// domain (the object is absent there, so border midpoints move with
/// zero flow).
std::array<double, 2> sample_flow_zero_extended(const FlowField& flow, double x, double y);

/// Alg.: trace the ray over the bordered domain, take the midpoints of
/// consecutive intersection points, displace each midpoint by
/// motion_scale(alpha) * v(midpoint), join by straight segments.
/// ref_fraction generalizes the reference time within the scan.
MovedPath build_moved_path(const Ray& ray, const FlowField& flow, const ScanProtocol& protocol,
                           int n, double ref_fraction = 0.5);

/// Per-pixel lengths of each moved path through the image domain,
/// assembled into one matrix row per (angle, detector) pair of one scan.
/// extra_points inserts that many additional interpolation points per
/// traced segment before moving (0 reproduces the base algorithm).
CsrMatrix build_moved_matrix(const ScanProtocol& protocol, const FlowField& flow, int n,
                             double ref_fraction = 0.5, int extra_points = 0);

/// Accumulate the per-pixel chord lengths of the segment (x0,y0)-(x1,y1)
/// over the n x n pixel lattice into a row buffer (entries in path order,
/// consecutive duplicates merged). Exposed for tests.
void accumulate_segment_lengths(double x0, double y0, double x1, double y1, int n,
                                RowBuffer& out);

/// Solve min ||A_moved x - b||_2 by LSQR for one scan's sinogram and a
/// per-scan flow, returning the reconstruction at the reference time.
/// Throws SolverError if the iteration diverges.
ImageGrid reconstruct_corrected(const Sinogram& sino, const FlowField& flow, int n,
                                const SolverConfig& solver = {}, SolveInfo* info = nullptr,
                                double ref_fraction = 0.5);

} // namespace dynct
