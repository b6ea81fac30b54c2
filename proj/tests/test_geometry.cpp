#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynct/geometry.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace dynct;
namespace pi = std::numbers;

TEST_CASE("time of angle") {
    ScanProtocol p;
    p.m = 3;
    p.dt = 1.0;
    CHECK(time_of_angle(p, 0.0) == 0.0);
    CHECK(time_of_angle(p, pi::pi) == doctest::Approx(1.0));
    p.dt = 2.0;
    CHECK(time_of_angle(p, pi::pi / 2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(time_of_angle(p, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(time_of_angle(p, 3 * pi::pi), std::invalid_argument);
    SUBCASE("strictly increasing") {
        p.dt = 1.0;
        double prev = -1.0;
        for (int k = 0; k < 100; ++k) {
            const double t = time_of_angle(p, k * 3 * pi::pi / 101);
            CHECK(t > prev);
            prev = t;
        }
    }
}

TEST_CASE("motion scale over one scan") {
    ScanProtocol p;
    p.m = 2;
    CHECK(motion_scale(p, 0.0) == doctest::Approx(0.5));
    CHECK(motion_scale(p, pi::pi / 2) == doctest::Approx(0.0));
    CHECK(motion_scale(p, pi::pi * 0.999999) == doctest::Approx(-0.5).epsilon(1e-4));
    // second scan uses its local angle
    CHECK(motion_scale(p, pi::pi) == doctest::Approx(0.5));
    CHECK(motion_scale(p, 1.5 * pi::pi) == doctest::Approx(0.0));
    SUBCASE("strictly decreasing and antisymmetric about mid scan") {
        double prev = 1.0;
        for (int k = 0; k <= 64; ++k) {
            const double a = k * pi::pi / 65;
            const double s = motion_scale(p, a);
            CHECK(s < prev);
            prev = s;
            CHECK(motion_scale(p, pi::pi / 2 + a / 2) ==
                  doctest::Approx(-motion_scale(p, pi::pi / 2 - a / 2)).epsilon(1e-12));
        }
    }
    SUBCASE("configurable reference fraction") {
        CHECK(motion_scale(p, 0.0, 0.0) == doctest::Approx(0.0));
        CHECK(motion_scale(p, pi::pi / 2, 1.0) == doctest::Approx(0.5));
    }
}

TEST_CASE("vertical ray through a 2x2 grid") {
    const RayTrace trace = ray_grid_intersections(Ray{0.0, 0.0}, 2, 0);
    REQUIRE(trace.points.size() == 3);
    CHECK(trace.points[0].y == doctest::Approx(-1.0));
    CHECK(trace.points[1].y == doctest::Approx(0.0));
    CHECK(trace.points[2].y == doctest::Approx(1.0));
    for (const auto& pt : trace.points) CHECK(pt.x == doctest::Approx(0.0));
    CHECK(trace.total_length() == doctest::Approx(2.0));
    CHECK(trace.segments() == 2);
}

TEST_CASE("diagonal ray through one unit pixel") {
    const RayTrace trace = ray_grid_intersections(Ray{pi::pi / 4, 0.0}, 1, 0);
    REQUIRE(trace.segments() == 1);
    CHECK(trace.total_length() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("ray missing the domain yields an empty trace") {
    const RayTrace trace = ray_grid_intersections(Ray{0.3, 100.0}, 8, 0);
    CHECK(trace.empty());
    CHECK(trace.points.empty());
}

TEST_CASE("traced segment lengths match the quadrature oracle") {
    std::mt19937_64 rng(2024);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    const int n = 8;
    for (int trial = 0; trial < 100; ++trial) {
        const double alpha = uni(0.0, pi::pi);
        const double u = uni(-6.0, 6.0);
        const std::vector<double> ref = oracles::ray_pixel_lengths(alpha, u, n, 100000);
        std::vector<double> got(static_cast<size_t>(n) * n, 0.0);
        const RayTrace trace = ray_grid_intersections(Ray{alpha, u}, n, 0);
        for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
            const auto& p0 = trace.points[k];
            const auto& p1 = trace.points[k + 1];
            got[static_cast<size_t>(p0.pixel)] += std::hypot(p1.x - p0.x, p1.y - p0.y);
        }
        for (size_t p = 0; p < got.size(); ++p)
            CHECK(std::abs(got[p] - ref[p]) < 1e-6);
    }
}

TEST_CASE("total traced length equals the chord through the square") {
    std::mt19937_64 rng(7);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = uni(0.0, pi::pi);
        const double u = uni(-12.0, 12.0);
        const int n = 8 + 2 * (trial % 5);
        const int border = trial % 3;
        const RayTrace trace = ray_grid_intersections(Ray{alpha, u}, n, border);
        const double chord = square_chord_length(alpha, u, 0.5 * n + border);
        CHECK(trace.total_length() == doctest::Approx(chord).epsilon(1e-9));
    }
}

TEST_CASE("trace is invariant under flipping the ray by pi") {
    std::mt19937_64 rng(99);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 50; ++trial) {
        const double alpha = uni(0.0, pi::pi);
        const double u = uni(-5.0, 5.0);
        const RayTrace fwd = ray_grid_intersections(Ray{alpha, u}, 8, 0);
        const RayTrace rev = ray_grid_intersections(Ray{alpha + pi::pi, -u}, 8, 0);
        REQUIRE(fwd.points.size() == rev.points.size());
        // same point set traversed in the opposite direction
        const size_t count = fwd.points.size();
        for (size_t k = 0; k < count; ++k) {
            CHECK(fwd.points[k].x == doctest::Approx(rev.points[count - 1 - k].x).epsilon(1e-12));
            CHECK(fwd.points[k].y == doctest::Approx(rev.points[count - 1 - k].y).epsilon(1e-12));
        }
    }
}

TEST_CASE("corner-degenerate rays deduplicate coincident points") {
    // the diagonal through pixel corners of a 4x4 grid
    const RayTrace trace = ray_grid_intersections(Ray{pi::pi / 4, 0.0}, 4, 0);
    CHECK(trace.total_length() == doctest::Approx(4.0 * std::sqrt(2.0)));
    for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
        const double len = std::hypot(trace.points[k + 1].x - trace.points[k].x,
                                      trace.points[k + 1].y - trace.points[k].y);
        CHECK(len > 1e-12); // no zero-length segments
    }
}

TEST_CASE("protocol defaults and validation") {
    CHECK(ScanProtocol::default_detector_count(256) == 367);
    CHECK(ScanProtocol::default_detector_count(64) % 2 == 1);
    ScanProtocol p;
    p.n_det = ScanProtocol::default_detector_count(64);
    CHECK_NOTHROW(p.validate(64));
    p.n_det = 10;
    CHECK_THROWS_AS(p.validate(64), std::invalid_argument);
    p.n_det = 367;
    p.m = 0;
    CHECK_THROWS_AS(p.validate(256), std::invalid_argument);
}

TEST_CASE("detector shifts are centered") {
    ScanProtocol p;
    p.n_det = 5;
    p.det_spacing = 2.0;
    CHECK(p.detector_shift(0) == doctest::Approx(-4.0));
    CHECK(p.detector_shift(2) == doctest::Approx(0.0));
    CHECK(p.detector_shift(4) == doctest::Approx(4.0));
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += p.detector_shift(k);
    CHECK(sum == doctest::Approx(0.0));
}

TEST_CASE("scan angle lists are uniform over [0, pi) with scan offset") {
    ScanProtocol p;
    p.m = 3;
    p.angles_per_scan = 4;
    for (int k = 0; k < 4; ++k)
        CHECK(p.angle(0, k) == doctest::Approx(k * pi::pi / 4));
    CHECK(p.angle(2, 1) == doctest::Approx(2 * pi::pi + pi::pi / 4));
}
