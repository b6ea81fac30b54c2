#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynct/motioncorr.hpp"
#include "dynct/phantom.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace dynct;
namespace nums = std::numbers;

namespace {

ScanProtocol protocol_for(int n, int angles = 12, int border = 4) {
    ScanProtocol p;
    p.m = 1;
    p.angles_per_scan = angles;
    p.n_det = ScanProtocol::default_detector_count(n);
    p.border = border;
    return p;
}

std::vector<double> dense_row(const CsrMatrix& m, int64_t r) {
    std::vector<double> out(static_cast<size_t>(m.cols()), 0.0);
    auto cols = m.row_cols(r);
    auto vals = m.row_vals(r);
    for (size_t k = 0; k < cols.size(); ++k) out[cols[k]] += vals[k];
    return out;
}

std::vector<double> dense_row(const RowBuffer& row, int64_t n_cols) {
    std::vector<double> out(static_cast<size_t>(n_cols), 0.0);
    for (size_t k = 0; k < row.cols.size(); ++k) out[row.cols[k]] += row.vals[k];
    return out;
}

FlowField random_flow(int n, uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    FlowField f(n);
    for (size_t k = 0; k < f.vx.size(); ++k) {
        f.vx.values()[k] = scale * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
        f.vy.values()[k] = scale * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
    }
    return f;
}

} // namespace

TEST_CASE("zero flow keeps the moved path on the projection line") {
    const int n = 16;
    const ScanProtocol p = protocol_for(n);
    const FlowField zero(n);
    const Ray ray{0.7, 1.3};
    const MovedPath path = build_moved_path(ray, zero, p, n);
    REQUIRE(!path.empty());
    const double ca = std::cos(ray.alpha), sa = std::sin(ray.alpha);
    for (const auto& v : path.vertices)
        CHECK(std::abs(v[0] * ca + v[1] * sa - ray.u) < 1e-12);
    // vertex count equals traced segment count
    const RayTrace trace = ray_grid_intersections(ray, n, p.border);
    CHECK(path.vertices.size() == static_cast<size_t>(trace.segments()));
}

TEST_CASE("mid-scan rays are not deformed for any flow") {
    const int n = 16;
    const ScanProtocol p = protocol_for(n, 12);
    const FlowField wild = random_flow(n, 9, 3.0);
    const double alpha = nums::pi / 2; // T = dt/2, scale = 0
    CHECK(motion_scale(p, alpha) == 0.0);
    const Ray ray{alpha, -2.3};
    const MovedPath path = build_moved_path(ray, wild, p, n);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    for (const auto& v : path.vertices)
        CHECK(std::abs(v[0] * ca + v[1] * sa - ray.u) < 1e-12);
}

TEST_CASE("constant flow shifts interior vertices rigidly") {
    const int n = 16;
    const ScanProtocol p = protocol_for(n);
    FlowField flow(n);
    for (double& v : flow.vx.values()) v = 0.8;
    for (double& v : flow.vy.values()) v = -0.6;
    const Ray ray{0.4, 0.7};
    const MovedPath path = build_moved_path(ray, flow, p, n);
    const RayTrace trace = ray_grid_intersections(ray, n, p.border);
    const double hull = 0.5 * (n - 1) - 1.0; // inside, away from the fade rim
    REQUIRE(!path.empty());
    size_t interior = 0;
    for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
        const double mx = 0.5 * (trace.points[k].x + trace.points[k + 1].x);
        const double my = 0.5 * (trace.points[k].y + trace.points[k + 1].y);
        if (std::abs(mx) > hull || std::abs(my) > hull) continue;
        ++interior;
        CHECK(path.vertices[k][0] == doctest::Approx(mx + path.scale * 0.8).epsilon(1e-14));
        CHECK(path.vertices[k][1] == doctest::Approx(my + path.scale * -0.6).epsilon(1e-14));
    }
    CHECK(interior > 0);
}

TEST_CASE("constant flow rows equal static rows of the shifted line") {
    const int n = 32;
    const ScanProtocol p = protocol_for(n, 8, 6);
    const double c1 = 0.9, c2 = -0.7;
    FlowField flow(n);
    for (double& v : flow.vx.values()) v = c1;
    for (double& v : flow.vy.values()) v = c2;
    const CsrMatrix moved = build_moved_matrix(p, flow, n);
    RowBuffer row;
    for (int a = 0; a < p.angles_per_scan; ++a) {
        const double alpha = p.local_angle(a);
        const double scale = motion_scale(p, alpha);
        for (int k = 0; k < p.n_det; ++k) {
            const double du = scale * (c1 * std::cos(alpha) + c2 * std::sin(alpha));
            project_row(ProjScheme::Length, alpha, p.detector_shift(k) + du, n, row);
            const std::vector<double> ref = dense_row(row, moved.cols());
            const std::vector<double> got =
                dense_row(moved, static_cast<int64_t>(a) * p.n_det + k);
            // compare pixels at least one pixel inside the domain; the flow
            // fades to zero across the outermost ring
            for (int i = 1; i < n - 1; ++i)
                for (int j = 1; j < n - 1; ++j)
                    CHECK(std::abs(got[static_cast<size_t>(i) * n + j] -
                                   ref[static_cast<size_t>(i) * n + j]) < 0.06);
        }
    }
}

TEST_CASE("zero-flow moved matrix equals the static length matrix") {
    const int n = 32;
    const ScanProtocol p = protocol_for(n, 10, 5);
    const CsrMatrix moved = build_moved_matrix(p, FlowField(n), n);
    const CsrMatrix fixed = build_static_matrix(p, n, ProjScheme::Length);
    REQUIRE(moved.rows() == fixed.rows());
    for (int64_t r = 0; r < moved.rows(); ++r) {
        const std::vector<double> a = dense_row(moved, r);
        const std::vector<double> b = dense_row(fixed, r);
        for (size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-9);
    }
}

TEST_CASE("flow away from the ray leaves its row unchanged") {
    const int n = 32;
    const ScanProtocol p = protocol_for(n, 1, 5);
    FlowField corner(n);
    for (int i = n - 6; i < n; ++i)
        for (int j = n - 6; j < n; ++j) {
            corner.vx(i, j) = 2.0;
            corner.vy(i, j) = 2.0;
        }
    // vertical ray far from the perturbed corner
    RowBuffer ref;
    project_row(ProjScheme::Length, 0.0, -10.5, n, ref);
    const MovedPath path = build_moved_path(Ray{0.0, -10.5}, corner, p, n);
    RowBuffer got;
    for (size_t k = 0; k + 1 < path.vertices.size(); ++k)
        accumulate_segment_lengths(path.vertices[k][0], path.vertices[k][1],
                                   path.vertices[k + 1][0], path.vertices[k + 1][1], n, got);
    const std::vector<double> a = dense_row(ref, static_cast<int64_t>(n) * n);
    const std::vector<double> b = dense_row(got, static_cast<int64_t>(n) * n);
    for (size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-9);
}

TEST_CASE("row weights converge linearly to static weights as flow shrinks") {
    // odd n keeps integer detector offsets off the pixel-edge lines, where
    // the true row weights are genuinely discontinuous in the flow
    const int n = 15;
    const ScanProtocol p = protocol_for(n, 6, 5);
    const FlowField base = random_flow(n, 4, 1.0);
    const CsrMatrix fixed = build_static_matrix(p, n, ProjScheme::Length);
    auto max_diff = [&](double eps) {
        FlowField f(n);
        for (size_t k = 0; k < f.vx.size(); ++k) {
            f.vx.values()[k] = eps * base.vx.values()[k];
            f.vy.values()[k] = eps * base.vy.values()[k];
        }
        const CsrMatrix moved = build_moved_matrix(p, f, n);
        double worst = 0.0;
        for (int64_t r = 0; r < moved.rows(); ++r) {
            const std::vector<double> a = dense_row(moved, r);
            const std::vector<double> b = dense_row(fixed, r);
            for (size_t k = 0; k < a.size(); ++k)
                worst = std::max(worst, std::abs(a[k] - b[k]));
        }
        return worst;
    };
    const double d2 = max_diff(1e-2);
    const double d3 = max_diff(1e-3);
    CHECK(d2 < 0.1);
    CHECK(d3 < 0.15 * d2); // roughly linear in the flow magnitude
}

TEST_CASE("matrix rows equal rows built independently from public pieces") {
    const int n = 16;
    const ScanProtocol p = protocol_for(n, 5, 4);
    const FlowField flow = random_flow(n, 77, 1.5);
    const CsrMatrix mat = build_moved_matrix(p, flow, n);
    // walk rows in a scrambled order
    std::vector<int64_t> order;
    for (int64_t r = 0; r < mat.rows(); ++r) order.push_back((r * 13) % mat.rows());
    for (int64_t r : order) {
        const int a = static_cast<int>(r / p.n_det);
        const int k = static_cast<int>(r % p.n_det);
        const MovedPath path =
            build_moved_path(Ray{p.local_angle(a), p.detector_shift(k)}, flow, p, n);
        RowBuffer row;
        for (size_t s = 0; s + 1 < path.vertices.size(); ++s)
            accumulate_segment_lengths(path.vertices[s][0], path.vertices[s][1],
                                       path.vertices[s + 1][0], path.vertices[s + 1][1], n, row);
        const std::vector<double> got = dense_row(mat, r);
        const std::vector<double> ref = dense_row(row, mat.cols());
        for (size_t q = 0; q < got.size(); ++q) CHECK(got[q] == ref[q]);
    }
}

TEST_CASE("extra intermediate points never hurt against a dense oracle") {
    const int n = 16;
    const ScanProtocol p = protocol_for(n, 1, 5);
    const FlowField flow = random_flow(n, 123, 1.2);
    const Ray ray{0.0, 0.0};
    const double scale = motion_scale(p, ray.alpha);

    // dense oracle: map a fine polyline through the same displacement and
    // accumulate its per-pixel lengths
    RowBuffer oracle;
    {
        const RayTrace trace = ray_grid_intersections(ray, n, p.border);
        REQUIRE(!trace.empty());
        std::vector<std::array<double, 2>> fine;
        const int per_seg = 64;
        for (size_t k = 0; k + 1 < trace.points.size(); ++k)
            for (int q = 0; q < per_seg; ++q) {
                const double f = (q + 0.5) / per_seg;
                const double sx = trace.points[k].x + f * (trace.points[k + 1].x - trace.points[k].x);
                const double sy = trace.points[k].y + f * (trace.points[k + 1].y - trace.points[k].y);
                const auto v = sample_flow_zero_extended(flow, sx, sy);
                fine.push_back({sx + scale * v[0], sy + scale * v[1]});
            }
        for (size_t k = 0; k + 1 < fine.size(); ++k)
            accumulate_segment_lengths(fine[k][0], fine[k][1], fine[k + 1][0], fine[k + 1][1], n,
                                       oracle);
    }
    const std::vector<double> ref = dense_row(oracle, static_cast<int64_t>(n) * n);

    auto row_error = [&](int extra) {
        ScanProtocol q = p;
        const CsrMatrix m = build_moved_matrix(q, flow, n, 0.5, extra);
        // ray alpha=0, u=0 is row (0, center detector)
        const int64_t r = (p.n_det - 1) / 2;
        const std::vector<double> got = dense_row(m, r);
        double err = 0.0;
        for (size_t k = 0; k < got.size(); ++k) err = std::max(err, std::abs(got[k] - ref[k]));
        return err;
    };
    const double e0 = row_error(0);
    const double e2 = row_error(2);
    CHECK(e2 <= e0 + 1e-12);
}

TEST_CASE("corrected reconstruction with zero flow matches the static solve") {
    const int n = 16;
    const ScanProtocol p = protocol_for(n, 24, 4);
    const ImageGrid phantom = make_disk_phantom(n, 0.3);
    const Sinogram sino = project_static(phantom, p, ProjScheme::Length);

    const ImageGrid via_moved = reconstruct_corrected(sino, FlowField(n), n, {400, 1e-10, 0.0});

    const CsrMatrix a = build_static_matrix(p, n, ProjScheme::Length);
    CsrOp op(a);
    const std::vector<double> x = solve_lsqr(op, sino.values, {400, 1e-10, 0.0});
    for (size_t k = 0; k < via_moved.size(); ++k)
        CHECK(via_moved.values()[k] == doctest::Approx(x[k]).epsilon(1e-5));
}

TEST_CASE("moved matrix validates its inputs") {
    const int n = 16;
    ScanProtocol p = protocol_for(n);
    CHECK_THROWS_AS(build_moved_matrix(p, FlowField(8), n), std::invalid_argument);
    p.border = 0;
    CHECK_THROWS_AS(build_moved_matrix(p, FlowField(n), n), std::invalid_argument);
}

TEST_CASE("sample_flow_zero_extended fades to zero outside the domain") {
    const int n = 8;
    FlowField flow(n);
    for (double& v : flow.vx.values()) v = 2.0;
    // deep outside
    CHECK(sample_flow_zero_extended(flow, 100.0, 0.0)[0] == 0.0);
    CHECK(sample_flow_zero_extended(flow, 0.0, -100.0)[0] == 0.0);
    // at a pixel center, exact
    CHECK(sample_flow_zero_extended(flow, flow.vx.center_x(3), flow.vx.center_y(2))[0] == 2.0);
    // half a pixel beyond the outermost center: halfway faded
    const double edge = 0.5 * (n - 1);
    CHECK(sample_flow_zero_extended(flow, edge + 0.5, 0.5)[0] == doctest::Approx(1.0));
}
