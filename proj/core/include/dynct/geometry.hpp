#pragma once

#include <vector>

namespace dynct {

/// Acquisition protocol for m consecutive parallel-beam scans.
///
/// Scan i acquires angles {i*pi + k*pi/angles_per_scan, k = 0..angles_per_scan-1},
/// one instant per angle, over a scan duration dt. Detector shifts are
/// centered: u_k = (k - (n_det-1)/2) * det_spacing, in pixel units.
struct ScanProtocol {
    int m = 1;
    int angles_per_scan = 180;
    double dt = 1.0;
    int n_det = 0;
    double det_spacing = 1.0;
    int border = 8; ///< extra border width (pixels) around the image domain

    double local_angle(int k) const;
    double angle(int scan, int k) const;
    double detector_shift(int k) const;

    /// Smallest odd detector count that covers an n x n image with a
    /// two-pixel margin on each side.
    static int default_detector_count(int n);

    /// Checks field ranges and that the ray bundle covers the image
    /// (n_det * det_spacing >= n * sqrt(2)). Throws std::invalid_argument.
    void validate(int n) const;
};

/// Acquisition time of angle alpha: T(alpha) = (alpha/pi) * dt.
/// alpha must lie in [0, m*pi).
double time_of_angle(const ScanProtocol& protocol, double alpha);

/// Signed fraction of the per-scan flow applied when moving data acquired
/// at angle alpha to the reference time ref_fraction*dt within its scan:
/// -(-ref_fraction*dt + T(alpha_local))/dt. With the default mid-scan
/// reference this is +1/2 at scan start, 0 at mid scan, -1/2 at scan end.
double motion_scale(const ScanProtocol& protocol, double alpha, double ref_fraction = 0.5);

/// A projection line L(alpha, u) = { (x,y) : x cos(alpha) + y sin(alpha) = u }.
struct Ray {
    double alpha = 0.0;
    double u = 0.0;
};

struct TracePoint {
    double x;
    double y;
    /// Flat index (row * side + col) of the pixel entered after this point
    /// in the traced lattice, -1 for the final (exit) point.
    int pixel;
};

/// Ordered intersections of a ray with the pixel-edge lattice of the
/// square [-(n/2+border), n/2+border]^2.
struct RayTrace {
    std::vector<TracePoint> points;

    bool empty() const { return points.size() < 2; }
    int segments() const { return points.empty() ? 0 : static_cast<int>(points.size()) - 1; }
    double total_length() const;
};

/// cos/sin of alpha with magnitudes below 1e-14 snapped to exactly zero,
/// so axis-aligned rays that ride pixel-edge lines stay on them through
/// all downstream arithmetic instead of drifting by ~1e-16 per pixel.
struct Direction {
    double cos_a;
    double sin_a;
};
Direction snapped_direction(double alpha);

/// All crossings of L(alpha,u) with the vertical/horizontal pixel-edge
/// lines inside the bordered square, sorted along the ray direction
/// (-sin(alpha), cos(alpha)). Coincident corner hits are merged within
/// 1e-12 pixel units. A ray missing the square yields an empty trace.
RayTrace ray_grid_intersections(const Ray& ray, int n, int border);

/// Chord length of L(alpha,u) through [-h, h]^2, by interval clipping.
double square_chord_length(double alpha, double u, double h);

} // namespace dynct
