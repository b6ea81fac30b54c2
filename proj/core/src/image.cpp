#include "dynct/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynct {

ImageGrid::ImageGrid(int n, double fill, double pixel_size)
    : n_(n), pixel_size_(pixel_size), values_(static_cast<size_t>(n) * n, fill) {
    if (n < 2)
        throw std::invalid_argument("ImageGrid: n must be >= 2, got " + std::to_string(n));
    if (!(pixel_size > 0.0))
        throw std::invalid_argument("ImageGrid: pixel_size must be positive");
}

void ImageGrid::validate() const {
    if (n_ < 2 || values_.size() != static_cast<size_t>(n_) * n_)
        throw std::invalid_argument("ImageGrid: inconsistent shape");
    if (!(pixel_size_ > 0.0))
        throw std::invalid_argument("ImageGrid: pixel_size must be positive");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("ImageGrid: non-finite value");
}

FlowField::FlowField(ImageGrid x, ImageGrid y) : vx(std::move(x)), vy(std::move(y)) {
    if (vx.n() != vy.n())
        throw std::invalid_argument("FlowField: vx and vy shapes differ");
}

void FlowField::validate() const {
    vx.validate();
    vy.validate();
    if (vx.n() != vy.n())
        throw std::invalid_argument("FlowField: vx and vy shapes differ");
}

namespace {

// Neumann index clamp: ghost cells replicate the edge value.
inline int clampi(int k, int lo, int hi) { return k < lo ? lo : (k > hi ? hi : k); }

} // namespace

ImageGrid spatial_derivative(const ImageGrid& img, Axis axis) {
    const int n = img.n();
    ImageGrid out(n, 0.0, img.pixel_size());
    // Written as coefficient multiplies accumulated in column order so the
    // result matches the sparse operator matrices bit for bit.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc;
            if (axis == Axis::X) {
                const int jm = clampi(j - 1, 0, n - 1);
                const int jp = clampi(j + 1, 0, n - 1);
                acc = -0.5 * img(i, jm) + 0.5 * img(i, jp);
            } else {
                const int im = clampi(i - 1, 0, n - 1);
                const int ip = clampi(i + 1, 0, n - 1);
                acc = -0.5 * img(im, j) + 0.5 * img(ip, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

ImageGrid laplacian(const ImageGrid& img) {
    const int n = img.n();
    ImageGrid out(n, 0.0, img.pixel_size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Ghost replication drops the off-grid coefficient and shrinks
            // the diagonal weight accordingly. Terms accumulate in vec-index
            // order to match the sparse operator matrix bit for bit.
            const int im = i - 1, ip = i + 1, jm = j - 1, jp = j + 1;
            double diag = 0.0;
            if (im >= 0) diag -= 1.0;
            if (jm >= 0) diag -= 1.0;
            if (jp < n) diag -= 1.0;
            if (ip < n) diag -= 1.0;
            double acc = 0.0;
            if (im >= 0) acc += 1.0 * img(im, j);
            if (jm >= 0) acc += 1.0 * img(i, jm);
            acc += diag * img(i, j);
            if (jp < n) acc += 1.0 * img(i, jp);
            if (ip < n) acc += 1.0 * img(ip, j);
            out(i, j) = acc;
        }
    }
    return out;
}

double bilinear_sample(const ImageGrid& img, double x, double y) {
    const int n = img.n();
    const double c = 0.5 * (n - 1);
    double gx = x / img.pixel_size() + c;
    double gy = y / img.pixel_size() + c;
    // clamp-to-edge
    if (gx < 0.0) gx = 0.0;
    if (gx > n - 1) gx = n - 1;
    if (gy < 0.0) gy = 0.0;
    if (gy > n - 1) gy = n - 1;
    const int j0 = static_cast<int>(gx);
    const int i0 = static_cast<int>(gy);
    const double fx = gx - j0; // in [0, 1): an exact hit on the last
    const double fy = gy - i0; // center gives f = 0, never f = 1
    const int j1 = j0 + 1 > n - 1 ? n - 1 : j0 + 1;
    const int i1 = i0 + 1 > n - 1 ? n - 1 : i0 + 1;
    // lerp form keeps constants and exact center hits exact
    const double top = img(i0, j0) + fx * (img(i0, j1) - img(i0, j0));
    const double bot = img(i1, j0) + fx * (img(i1, j1) - img(i1, j0));
    return top + fy * (bot - top);
}

ImageGrid warp_backward(const ImageGrid& img, const FlowField& flow, double s) {
    if (img.n() != flow.n())
        throw std::invalid_argument("warp_backward: image and flow sizes differ");
    const int n = img.n();
    ImageGrid out(n, 0.0, img.pixel_size());
    const double h = img.pixel_size();
    for (int i = 0; i < n; ++i) {
        const double y = img.center_y(i);
        for (int j = 0; j < n; ++j) {
            const double x = img.center_x(j);
            out(i, j) = bilinear_sample(img, x - s * flow.vx(i, j) * h, y - s * flow.vy(i, j) * h);
        }
    }
    return out;
}

namespace {

bool power_of_two_ratio(int a, int b) {
    // true if a = b * 2^k for some k >= 0
    if (a < b) return false;
    while (a > b) {
        if (a % 2 != 0) return false;
        a /= 2;
    }
    return a == b;
}

ImageGrid downsample2(const ImageGrid& img) {
    const int n = img.n() / 2;
    ImageGrid out(n, 0.0, img.pixel_size() * 2.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = img(2 * i, 2 * j) + img(2 * i, 2 * j + 1);
            const double b = img(2 * i + 1, 2 * j) + img(2 * i + 1, 2 * j + 1);
            out(i, j) = (a + b) * 0.25;
        }
    return out;
}

ImageGrid upsample_bilinear(const ImageGrid& img, int new_n) {
    const int n = img.n();
    ImageGrid out(new_n, 0.0, img.pixel_size() * n / new_n);
    const double ratio = static_cast<double>(n) / new_n;
    for (int i = 0; i < new_n; ++i) {
        const double gy = (i + 0.5) * ratio - 0.5;
        for (int j = 0; j < new_n; ++j) {
            const double gx = (j + 0.5) * ratio - 0.5;
            // reuse the clamped bilinear kernel in index space
            double cx = gx, cy = gy;
            if (cx < 0.0) cx = 0.0;
            if (cx > n - 1) cx = n - 1;
            if (cy < 0.0) cy = 0.0;
            if (cy > n - 1) cy = n - 1;
            const int j0 = static_cast<int>(cx);
            const int i0 = static_cast<int>(cy);
            const double fx = cx - j0;
            const double fy = cy - i0;
            const int j1 = j0 + 1 > n - 1 ? n - 1 : j0 + 1;
            const int i1 = i0 + 1 > n - 1 ? n - 1 : i0 + 1;
            const double top = img(i0, j0) + fx * (img(i0, j1) - img(i0, j0));
            const double bot = img(i1, j0) + fx * (img(i1, j1) - img(i1, j0));
            out(i, j) = top + fy * (bot - top);
        }
    }
    return out;
}

} // namespace

ImageGrid resample(const ImageGrid& img, int new_n) {
    const int n = img.n();
    if (new_n < 2)
        throw std::invalid_argument("resample: new_n must be >= 2");
    if (new_n == n) return img;
    if (new_n < n) {
        if (!power_of_two_ratio(n, new_n))
            throw std::invalid_argument("resample: downsampling factor must be a power of two");
        ImageGrid cur = img;
        while (cur.n() > new_n) cur = downsample2(cur);
        return cur;
    }
    if (!power_of_two_ratio(new_n, n))
        throw std::invalid_argument("resample: upsampling factor must be a power of two");
    return upsample_bilinear(img, new_n);
}

FlowField resample(const FlowField& flow, int new_n) {
    const double scale = static_cast<double>(new_n) / flow.n();
    FlowField out(resample(flow.vx, new_n), resample(flow.vy, new_n));
    for (double& v : out.vx.values()) v *= scale;
    for (double& v : out.vy.values()) v *= scale;
    return out;
}

} // namespace dynct
