#include "dynct/phantom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dynct {

namespace {

struct Rect {
    double x0, x1, y0, y1; // unit coordinates, y up
    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

// Block glyphs "C" and "T" inside a ring; laid out in the unit square.
constexpr Rect kGlyphs[] = {
    // C
    {0.30, 0.36, 0.36, 0.64},
    {0.30, 0.46, 0.58, 0.64},
    {0.30, 0.46, 0.36, 0.42},
    // T
    {0.52, 0.70, 0.58, 0.64},
    {0.58, 0.64, 0.36, 0.64},
};

} // namespace

ImageGrid make_builtin_phantom(int n) {
    ImageGrid img(n);
    const double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const double uy = (i + 0.5) * inv;
        for (int j = 0; j < n; ++j) {
            const double ux = (j + 0.5) * inv;
            bool on = false;
            for (const Rect& r : kGlyphs)
                if (r.contains(ux, uy)) {
                    on = true;
                    break;
                }
            if (!on) {
                const double r = std::hypot(ux - 0.5, uy - 0.5);
                on = r >= 0.36 && r <= 0.40;
            }
            img(i, j) = on ? 1.0 : 0.0;
        }
    }
    return img;
}

ImageGrid make_disk_phantom(int n, double radius_frac, double value) {
    ImageGrid img(n);
    const double radius = radius_frac * n;
    for (int i = 0; i < n; ++i) {
        const double y = img.center_y(i);
        for (int j = 0; j < n; ++j) {
            const double x = img.center_x(j);
            img(i, j) = std::hypot(x, y) <= radius ? value : 0.0;
        }
    }
    return img;
}

ImageGrid make_gaussian_blob(int n, double cx, double cy, double sigma, double amplitude) {
    ImageGrid img(n);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < n; ++i) {
        const double y = img.center_y(i);
        for (int j = 0; j < n; ++j) {
            const double x = img.center_x(j);
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            img(i, j) += amplitude * std::exp(-d2 * inv2s2);
        }
    }
    return img;
}

MotionKind motion_kind_from_string(const std::string& s) {
    if (s == "zero" || s == "none") return MotionKind::Zero;
    if (s == "shift") return MotionKind::Shift;
    if (s == "rotation") return MotionKind::Rotation;
    if (s == "motion3") return MotionKind::Motion3;
    throw std::invalid_argument("unknown motion kind '" + s + "'");
}

std::string to_string(MotionKind kind) {
    switch (kind) {
        case MotionKind::Zero: return "zero";
        case MotionKind::Shift: return "shift";
        case MotionKind::Rotation: return "rotation";
        case MotionKind::Motion3: return "motion3";
    }
    return "?";
}

FlowField generate_motion_field(MotionKind kind, int n) {
    FlowField flow(n);
    const double theta = 3.0 * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int i = 0; i < n; ++i) {
        const double y = flow.vx.center_y(i);
        for (int j = 0; j < n; ++j) {
            const double x = flow.vx.center_x(j);
            switch (kind) {
                case MotionKind::Zero:
                    break;
                case MotionKind::Shift:
                    flow.vx(i, j) = 1.0;
                    flow.vy(i, j) = 1.0;
                    break;
                case MotionKind::Rotation:
                    // v = R(-3 deg) p - p
                    flow.vx(i, j) = (c - 1.0) * x + s * y;
                    flow.vy(i, j) = -s * x + (c - 1.0) * y;
                    break;
                case MotionKind::Motion3:
                    flow.vx(i, j) = -((c - 1.0) * x - s * y);
                    flow.vy(i, j) = s * x + (c - 1.0) * y;
                    break;
            }
        }
    }
    return flow;
}

} // namespace dynct
