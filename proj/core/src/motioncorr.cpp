#include "dynct/motioncorr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynct {

namespace {
constexpr double kTol = 1e-12;
} // namespace

std::array<double, 2> sample_flow_zero_extended(const FlowField& flow, double x, double y) {
    const int n = flow.n();
    const double c = 0.5 * (n - 1);
    const double gx = x + c;
    const double gy = y + c;
    if (gx <= -1.0 || gx >= n || gy <= -1.0 || gy >= n) return {0.0, 0.0};
    const int j0 = static_cast<int>(std::floor(gx));
    const int i0 = static_cast<int>(std::floor(gy));
    const double fx = gx - j0;
    const double fy = gy - i0;
    auto vx = [&](int i, int j) -> double {
        return (i >= 0 && i < n && j >= 0 && j < n) ? flow.vx(i, j) : 0.0;
    };
    auto vy = [&](int i, int j) -> double {
        return (i >= 0 && i < n && j >= 0 && j < n) ? flow.vy(i, j) : 0.0;
    };
    auto lerp2 = [&](auto&& f) {
        const double top = f(i0, j0) + fx * (f(i0, j0 + 1) - f(i0, j0));
        const double bot = f(i0 + 1, j0) + fx * (f(i0 + 1, j0 + 1) - f(i0 + 1, j0));
        return top + fy * (bot - top);
    };
    return {lerp2(vx), lerp2(vy)};
}

MovedPath build_moved_path(const Ray& ray, const FlowField& flow, const ScanProtocol& protocol,
                           int n, double ref_fraction) {
    if (flow.n() != n) throw std::invalid_argument("build_moved_path: flow size mismatch");
    MovedPath path;
    path.ray = ray;
    path.scale = motion_scale(protocol, ray.alpha, ref_fraction);

    const RayTrace trace = ray_grid_intersections(ray, n, protocol.border);
    if (trace.empty()) return path;

    path.vertices.reserve(trace.points.size() - 1);
    for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
        // same lerp form as the refinable sampler in build_moved_matrix
        const double mx = trace.points[k].x + 0.5 * (trace.points[k + 1].x - trace.points[k].x);
        const double my = trace.points[k].y + 0.5 * (trace.points[k + 1].y - trace.points[k].y);
        const auto v = sample_flow_zero_extended(flow, mx, my);
        path.vertices.push_back({mx + path.scale * v[0], my + path.scale * v[1]});
    }
    return path;
}

void accumulate_segment_lengths(double x0, double y0, double x1, double y1, int n,
                                RowBuffer& out) {
    const double h = 0.5 * n;
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len = std::hypot(dx, dy);
    if (len <= 0.0) return;

    // clip the parameter range [0,1] to the square
    double t0 = 0.0, t1 = 1.0;
    auto clip = [&](double p, double d) -> bool {
        if (std::abs(d) < 1e-15) return std::abs(p) <= h;
        double ta = (-h - p) / d;
        double tb = (h - p) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        return true;
    };
    if (!clip(x0, dx) || !clip(y0, dy) || t0 >= t1 - kTol) return;

    // Pieces between moved midpoints are at most a few pixels long, so a
    // small fixed buffer holds every crossing; insertion keeps it sorted.
    constexpr size_t kCap = 64;
    double ts[kCap];
    size_t n_ts = 0;
    auto insert_sorted = [&](double t) {
        if (n_ts == kCap) return; // clamp pathological pieces
        size_t k = n_ts++;
        while (k > 0 && ts[k - 1] > t) {
            ts[k] = ts[k - 1];
            --k;
        }
        ts[k] = t;
    };
    insert_sorted(t0);
    insert_sorted(t1);
    auto add_axis_crossings = [&](double p, double d) {
        if (std::abs(d) < 1e-15) return;
        const double a = p + t0 * d + h;
        const double b = p + t1 * d + h;
        const int mlo = static_cast<int>(std::ceil(std::min(a, b)));
        const int mhi = static_cast<int>(std::floor(std::max(a, b)));
        for (int m = mlo; m <= mhi; ++m) {
            if (m < 0 || m > n) continue;
            const double t = ((m - h) - p) / d;
            if (t > t0 + kTol && t < t1 - kTol) insert_sorted(t);
        }
    };
    add_axis_crossings(x0, dx);
    add_axis_crossings(y0, dy);

    double prev = ts[0];
    for (size_t k = 1; k < n_ts; ++k) {
        const double cur = ts[k];
        if (cur - prev <= kTol) continue;
        const double tm = 0.5 * (prev + cur);
        const double px = x0 + tm * dx;
        const double py = y0 + tm * dy;
        int pj = static_cast<int>(std::floor(px + h));
        int pi = static_cast<int>(std::floor(py + h));
        pj = std::clamp(pj, 0, n - 1);
        pi = std::clamp(pi, 0, n - 1);
        const int32_t col = static_cast<int32_t>(pi) * n + pj;
        const double seg = (cur - prev) * len;
        if (!out.cols.empty() && out.cols.back() == col)
            out.vals.back() += seg;
        else {
            out.cols.push_back(col);
            out.vals.push_back(seg);
        }
        prev = cur;
    }
}

namespace {

void moved_row(const Ray& ray, const FlowField& flow, const ScanProtocol& protocol, int n,
               double ref_fraction, int extra_points, RowBuffer& out) {
    out.clear();
    const double scale = motion_scale(protocol, ray.alpha, ref_fraction);
    const RayTrace trace = ray_grid_intersections(ray, n, protocol.border);
    if (trace.empty()) return;

    // moved sample points: extra_points interior points per segment plus
    // the segment midpoint (extra_points = 0 keeps just the midpoints)
    std::vector<std::array<double, 2>> verts;
    const int per_seg = extra_points + 1;
    verts.reserve((trace.points.size() - 1) * static_cast<size_t>(per_seg));
    for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
        const auto& p0 = trace.points[k];
        const auto& p1 = trace.points[k + 1];
        for (int q = 0; q < per_seg; ++q) {
            const double f = (q + 0.5) / per_seg;
            const double sx = p0.x + f * (p1.x - p0.x);
            const double sy = p0.y + f * (p1.y - p0.y);
            const auto v = sample_flow_zero_extended(flow, sx, sy);
            verts.push_back({sx + scale * v[0], sy + scale * v[1]});
        }
    }
    for (size_t k = 0; k + 1 < verts.size(); ++k)
        accumulate_segment_lengths(verts[k][0], verts[k][1], verts[k + 1][0], verts[k + 1][1], n,
                                   out);
}

} // namespace

CsrMatrix build_moved_matrix(const ScanProtocol& protocol, const FlowField& flow, int n,
                             double ref_fraction, int extra_points) {
    protocol.validate(n);
    if (protocol.border < 1)
        throw std::invalid_argument("build_moved_matrix: border must be >= 1 so paths start "
                                    "and finish outside the image domain");
    if (flow.n() != n) throw std::invalid_argument("build_moved_matrix: flow size mismatch");

    const int64_t n_rows = static_cast<int64_t>(protocol.angles_per_scan) * protocol.n_det;
    CsrMatrix mat(n_rows, static_cast<int64_t>(n) * n);
    RowBuffer row;
    // rows are mutually independent; assembled in protocol order
    for (int a = 0; a < protocol.angles_per_scan; ++a) {
        const double alpha = protocol.local_angle(a);
        for (int k = 0; k < protocol.n_det; ++k) {
            moved_row(Ray{alpha, protocol.detector_shift(k)}, flow, protocol, n, ref_fraction,
                      extra_points, row);
            mat.push_row(row.cols, row.vals);
        }
    }
    return mat;
}

ImageGrid reconstruct_corrected(const Sinogram& sino, const FlowField& flow, int n,
                                const SolverConfig& solver, SolveInfo* info,
                                double ref_fraction) {
    sino.validate();
    if (flow.n() != n) throw std::invalid_argument("reconstruct_corrected: flow size mismatch");

    const CsrMatrix a = build_moved_matrix(sino.protocol, flow, n, ref_fraction);
    CsrOp op(a);
    SolveInfo local;
    const std::vector<double> x = solve_lsqr(op, sino.values, solver, &local);
    if (info) *info = std::move(local);

    ImageGrid rec(n);
    rec.values() = x;
    return rec;
}

} // namespace dynct
