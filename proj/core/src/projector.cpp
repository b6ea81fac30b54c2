#include "dynct/projector.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dynct {

ProjScheme proj_scheme_from_string(const std::string& s) {
    if (s == "length") return ProjScheme::Length;
    if (s == "joseph") return ProjScheme::Joseph;
    throw std::invalid_argument("unknown projection scheme '" + s + "'");
}

Sinogram::Sinogram(const ScanProtocol& p, int scan)
    : protocol(p), scan_index(scan),
      values(static_cast<size_t>(p.angles_per_scan) * p.n_det, 0.0) {}

double Sinogram::row_time(int a) const {
    return time_of_angle(protocol, protocol.angle(scan_index, a));
}

void Sinogram::validate() const {
    if (scan_index < 0 || scan_index >= protocol.m)
        throw std::invalid_argument("Sinogram: scan_index outside protocol");
    if (values.size() != static_cast<size_t>(protocol.angles_per_scan) * protocol.n_det)
        throw std::invalid_argument("Sinogram: value count does not match protocol");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("Sinogram: non-finite value");
}

namespace {

void length_row(double alpha, double u, int n, RowBuffer& out) {
    const RayTrace trace = ray_grid_intersections(Ray{alpha, u}, n, 0);
    for (size_t k = 0; k + 1 < trace.points.size(); ++k) {
        const auto& p0 = trace.points[k];
        const auto& p1 = trace.points[k + 1];
        const double len = std::hypot(p1.x - p0.x, p1.y - p0.y);
        if (len <= 0.0) continue;
        if (!out.cols.empty() && out.cols.back() == p0.pixel)
            out.vals.back() += len;
        else {
            out.cols.push_back(p0.pixel);
            out.vals.push_back(len);
        }
    }
}

void joseph_row(double alpha, double u, int n, RowBuffer& out) {
    const auto [ca, sa] = snapped_direction(alpha);
    const double c = 0.5 * (n - 1);
    if (std::abs(ca) >= std::abs(sa)) {
        // march over rows; the ray advances fastest in y
        const double w = 1.0 / std::abs(ca);
        for (int i = 0; i < n; ++i) {
            const double y = i - c;
            const double x = (u - y * sa) / ca;
            const double cx = x + c;
            const int j0 = static_cast<int>(std::floor(cx));
            const double f = cx - j0;
            if (j0 >= 0 && j0 < n && 1.0 - f > 0.0) {
                out.cols.push_back(i * n + j0);
                out.vals.push_back((1.0 - f) * w);
            }
            if (j0 + 1 >= 0 && j0 + 1 < n && f > 0.0) {
                out.cols.push_back(i * n + j0 + 1);
                out.vals.push_back(f * w);
            }
        }
    } else {
        const double w = 1.0 / std::abs(sa);
        for (int j = 0; j < n; ++j) {
            const double x = j - c;
            const double y = (u - x * ca) / sa;
            const double cy = y + c;
            const int i0 = static_cast<int>(std::floor(cy));
            const double f = cy - i0;
            if (i0 >= 0 && i0 < n && 1.0 - f > 0.0) {
                out.cols.push_back(i0 * n + j);
                out.vals.push_back((1.0 - f) * w);
            }
            if (i0 + 1 >= 0 && i0 + 1 < n && f > 0.0) {
                out.cols.push_back((i0 + 1) * n + j);
                out.vals.push_back(f * w);
            }
        }
    }
}

} // namespace

void project_row(ProjScheme scheme, double alpha, double u, int n, RowBuffer& out) {
    out.clear();
    if (scheme == ProjScheme::Length)
        length_row(alpha, u, n, out);
    else
        joseph_row(alpha, u, n, out);
}

double row_dot(const RowBuffer& row, const std::vector<double>& img) {
    double acc = 0.0;
    for (size_t k = 0; k < row.cols.size(); ++k)
        acc += row.vals[k] * img[static_cast<size_t>(row.cols[k])];
    return acc;
}

CsrMatrix build_static_matrix(const ScanProtocol& protocol, int n, ProjScheme scheme) {
    protocol.validate(n);
    const int64_t n_rows = static_cast<int64_t>(protocol.angles_per_scan) * protocol.n_det;
    CsrMatrix mat(n_rows, static_cast<int64_t>(n) * n);
    RowBuffer row;
    for (int a = 0; a < protocol.angles_per_scan; ++a) {
        const double alpha = protocol.local_angle(a);
        for (int k = 0; k < protocol.n_det; ++k) {
            project_row(scheme, alpha, protocol.detector_shift(k), n, row);
            mat.push_row(row.cols, row.vals);
        }
    }
    return mat;
}

namespace {

double project_detector(ProjScheme scheme, double alpha, double u, double spacing,
                        int supersampling, int n, const std::vector<double>& img,
                        RowBuffer& scratch) {
    if (supersampling <= 1) {
        project_row(scheme, alpha, u, n, scratch);
        return row_dot(scratch, img);
    }
    double acc = 0.0;
    for (int s = 0; s < supersampling; ++s) {
        const double off = (s + 0.5) / supersampling - 0.5;
        project_row(scheme, alpha, u + off * spacing, n, scratch);
        acc += row_dot(scratch, img);
    }
    return acc / supersampling;
}

} // namespace

Sinogram project_static(const ImageGrid& img, const ScanProtocol& protocol, ProjScheme scheme,
                        int supersampling) {
    protocol.validate(img.n());
    Sinogram sino(protocol, 0);
    RowBuffer row;
    for (int a = 0; a < protocol.angles_per_scan; ++a) {
        const double alpha = protocol.local_angle(a);
        for (int k = 0; k < protocol.n_det; ++k)
            sino.at(a, k) = project_detector(scheme, alpha, protocol.detector_shift(k),
                                             protocol.det_spacing, supersampling, img.n(),
                                             img.values(), row);
    }
    return sino;
}

std::vector<Sinogram> simulate_dynamic_sinogram(const ImageGrid& phantom, const FlowField& flow,
                                                const ScanProtocol& protocol, ProjScheme scheme,
                                                int supersampling) {
    if (phantom.n() != flow.n())
        throw std::invalid_argument("simulate_dynamic_sinogram: phantom and flow sizes differ");
    protocol.validate(phantom.n());
    const int n = phantom.n();

    // Scan i re-measures the lines of local angles [0, pi) at later times
    // (L(i*pi + b, u) = L(b, +-u)); we keep the local-angle indexing, so odd
    // scans are stored with the detector axis relabeled. With a centered
    // detector array this is a pure relabeling of rows.
    std::vector<Sinogram> sinos;
    sinos.reserve(protocol.m);
    RowBuffer row;
    for (int scan = 0; scan < protocol.m; ++scan) {
        Sinogram sino(protocol, scan);
        for (int a = 0; a < protocol.angles_per_scan; ++a) {
            const double alpha_global = protocol.angle(scan, a);
            const double s = alpha_global / std::numbers::pi; // = T(alpha)/dt
            const ImageGrid warped = warp_backward(phantom, flow, s);
            const double alpha = protocol.local_angle(a);
            for (int k = 0; k < protocol.n_det; ++k)
                sino.at(a, k) = project_detector(scheme, alpha, protocol.detector_shift(k),
                                                 protocol.det_spacing, supersampling, n,
                                                 warped.values(), row);
        }
        sinos.push_back(std::move(sino));
    }
    return sinos;
}

} // namespace dynct
