#include "dynct/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dynct {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDedupTol = 1e-12;
} // namespace

double ScanProtocol::local_angle(int k) const { return k * kPi / angles_per_scan; }

double ScanProtocol::angle(int scan, int k) const { return scan * kPi + local_angle(k); }

double ScanProtocol::detector_shift(int k) const {
    return (k - 0.5 * (n_det - 1)) * det_spacing;
}

int ScanProtocol::default_detector_count(int n) {
    int c = static_cast<int>(std::ceil(n * std::numbers::sqrt2)) + 4;
    if (c % 2 == 0) ++c;
    return c;
}

void ScanProtocol::validate(int n) const {
    if (m < 1) throw std::invalid_argument("ScanProtocol: m must be >= 1");
    if (angles_per_scan < 1) throw std::invalid_argument("ScanProtocol: angles_per_scan must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("ScanProtocol: dt must be positive");
    if (n_det < 1) throw std::invalid_argument("ScanProtocol: n_det must be >= 1");
    if (!(det_spacing > 0.0)) throw std::invalid_argument("ScanProtocol: det_spacing must be positive");
    if (border < 0) throw std::invalid_argument("ScanProtocol: border must be >= 0");
    if (n_det * det_spacing < n * std::numbers::sqrt2)
        throw std::invalid_argument("ScanProtocol: detector bundle does not cover an " +
                                    std::to_string(n) + "-pixel domain");
}

double time_of_angle(const ScanProtocol& protocol, double alpha) {
    if (alpha < 0.0 || alpha >= protocol.m * kPi)
        throw std::invalid_argument("time_of_angle: alpha outside [0, m*pi)");
    return alpha / kPi * protocol.dt;
}

double motion_scale(const ScanProtocol& protocol, double alpha, double ref_fraction) {
    const double local = alpha - kPi * std::floor(alpha / kPi);
    const double t_local = local / kPi * protocol.dt;
    return -(-ref_fraction * protocol.dt + t_local) / protocol.dt;
}

double RayTrace::total_length() const {
    double len = 0.0;
    for (size_t k = 0; k + 1 < points.size(); ++k)
        len += std::hypot(points[k + 1].x - points[k].x, points[k + 1].y - points[k].y);
    return len;
}

Direction snapped_direction(double alpha) {
    double c = std::cos(alpha);
    double s = std::sin(alpha);
    if (std::abs(c) < 1e-14) c = 0.0;
    if (std::abs(s) < 1e-14) s = 0.0;
    return {c, s};
}

RayTrace ray_grid_intersections(const Ray& ray, int n, int border) {
    const int side = n + 2 * border;
    const double half = 0.5 * n + border;
    const auto [ca, sa] = snapped_direction(ray.alpha);
    // point on the line closest to the origin, direction along the line
    const double px = ray.u * ca, py = ray.u * sa;
    const double dx = -sa, dy = ca;

    // clip the parameter range to the square
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    auto clip_axis = [&](double p, double d) -> bool {
        if (std::abs(d) < 1e-15) return std::abs(p) <= half;
        double ta = (-half - p) / d;
        double tb = (half - p) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        return true;
    };
    RayTrace trace;
    if (!clip_axis(px, dx) || !clip_axis(py, dy) || t0 >= t1 - kDedupTol)
        return trace;

    std::vector<double> ts;
    ts.reserve(static_cast<size_t>(2 * side) + 4);
    ts.push_back(t0);
    ts.push_back(t1);
    if (std::abs(dx) >= 1e-15) {
        for (int k = 0; k <= side; ++k) {
            const double t = ((-half + k) - px) / dx;
            if (t > t0 + kDedupTol && t < t1 - kDedupTol) ts.push_back(t);
        }
    }
    if (std::abs(dy) >= 1e-15) {
        for (int k = 0; k <= side; ++k) {
            const double t = ((-half + k) - py) / dy;
            if (t > t0 + kDedupTol && t < t1 - kDedupTol) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());

    trace.points.reserve(ts.size());
    double prev_t = -std::numeric_limits<double>::infinity();
    for (double t : ts) {
        if (t - prev_t <= kDedupTol) continue;
        trace.points.push_back({px + t * dx, py + t * dy, -1});
        prev_t = t;
    }
    if (trace.points.size() < 2) {
        trace.points.clear();
        return trace;
    }
    // pixel entered after each point, from the segment midpoint
    for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
        const double mx = 0.5 * (trace.points[k].x + trace.points[k + 1].x);
        const double my = 0.5 * (trace.points[k].y + trace.points[k + 1].y);
        int pj = static_cast<int>(std::floor(mx + half));
        int pi = static_cast<int>(std::floor(my + half));
        pj = std::clamp(pj, 0, side - 1);
        pi = std::clamp(pi, 0, side - 1);
        trace.points[k].pixel = pi * side + pj;
    }
    return trace;
}

double square_chord_length(double alpha, double u, double h) {
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    const double px = u * ca, py = u * sa;
    const double dx = -sa, dy = ca;
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    auto clip = [&](double p, double d) -> bool {
        if (std::abs(d) < 1e-15) return std::abs(p) <= h;
        double ta = (-h - p) / d;
        double tb = (h - p) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        return true;
    };
    if (!clip(px, dx) || !clip(py, dy)) return 0.0;
    return std::max(0.0, t1 - t0);
}

} // namespace dynct
