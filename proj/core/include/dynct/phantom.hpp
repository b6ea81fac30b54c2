#pragma once

#include "dynct/image.hpp"

#include <string>

namespace dynct {

/// Built-in test object: binary text-like glyphs inside a thin ring,
/// values in {0,1}, zero well away from the domain border. Shapes scale
/// with n.
ImageGrid make_builtin_phantom(int n);

/// Centered disk of the given radius fraction of n.
ImageGrid make_disk_phantom(int n, double radius_frac = 0.25, double value = 1.0);

/// Isotropic Gaussian bump center (cx, cy) in pixel coordinates from the
/// grid center.
ImageGrid make_gaussian_blob(int n, double cx, double cy, double sigma, double amplitude = 1.0);

enum class MotionKind { Zero, Shift, Rotation, Motion3 };

MotionKind motion_kind_from_string(const std::string& s);
std::string to_string(MotionKind kind);

/// Analytic per-scan displacement fields of the three test motions,
/// evaluated at pixel centers (coordinates in pixels from the grid
/// center):
///  - Shift: constant (1, 1) pixels per scan.
///  - Rotation: clockwise rotation of 3 degrees per scan about the
///    center, v = R(-3 deg) p - p.
///  - Motion3: vx = -((cos3 - 1)x - sin3 y), vy = sin3 x + (cos3 - 1)y,
///    with the angle 3 in degrees.
FlowField generate_motion_field(MotionKind kind, int n);

} // namespace dynct
