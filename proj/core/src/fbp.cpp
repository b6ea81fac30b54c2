#include "dynct/fbp.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dynct {

namespace {

int next_pow2(int v) {
    int p = 1;
    while (p < v) p *= 2;
    return p;
}

// FFTW planning is not thread safe; executions on private buffers are.
std::mutex plan_mutex;

struct FftPair {
    int size;
    fftw_plan fwd;
    fftw_plan bwd;
    fftw_complex* buf;

    explicit FftPair(int n) : size(n) {
        std::lock_guard<std::mutex> lock(plan_mutex);
        buf = fftw_alloc_complex(n);
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;
};

} // namespace

std::vector<double> ramp_filter_rows(const std::vector<double>& values, int n_angles, int n_det,
                                     double det_spacing) {
    if (values.size() != static_cast<size_t>(n_angles) * n_det)
        throw std::invalid_argument("ramp_filter_rows: shape mismatch");
    const int pad = next_pow2(2 * n_det);
    FftPair fft(pad);

    // |rho| at DFT bin k, in cycles per physical detector unit
    std::vector<double> ramp(pad);
    for (int k = 0; k < pad; ++k) {
        const int kk = k <= pad / 2 ? k : pad - k;
        ramp[k] = static_cast<double>(kk) / pad / det_spacing;
    }

    std::vector<double> out(values.size());
    for (int a = 0; a < n_angles; ++a) {
        const double* src = values.data() + static_cast<size_t>(a) * n_det;
        for (int k = 0; k < n_det; ++k) {
            fft.buf[k][0] = src[k];
            fft.buf[k][1] = 0.0;
        }
        for (int k = n_det; k < pad; ++k) {
            fft.buf[k][0] = 0.0;
            fft.buf[k][1] = 0.0;
        }
        fftw_execute(fft.fwd);
        for (int k = 0; k < pad; ++k) {
            fft.buf[k][0] *= ramp[k];
            fft.buf[k][1] *= ramp[k];
        }
        fftw_execute(fft.bwd);
        double* dst = out.data() + static_cast<size_t>(a) * n_det;
        const double inv = 1.0 / pad; // FFTW backward transform is unnormalized
        for (int k = 0; k < n_det; ++k) dst[k] = fft.buf[k][0] * inv;
    }
    return out;
}

ImageGrid fbp_reconstruct(const Sinogram& sino, int n) {
    sino.validate();
    const ScanProtocol& p = sino.protocol;
    if (p.angles_per_scan < 2)
        throw std::invalid_argument("fbp_reconstruct: sinogram does not cover an interval of pi");

    const std::vector<double> filtered =
        ramp_filter_rows(sino.values, p.angles_per_scan, p.n_det, p.det_spacing);

    ImageGrid rec(n);
    const double weight = std::numbers::pi / p.angles_per_scan;
    const double det_c = 0.5 * (p.n_det - 1);
    const double inv_spacing = 1.0 / p.det_spacing;

    std::vector<double> cos_a(p.angles_per_scan), sin_a(p.angles_per_scan);
    for (int a = 0; a < p.angles_per_scan; ++a) {
        cos_a[a] = std::cos(p.local_angle(a));
        sin_a[a] = std::sin(p.local_angle(a));
    }

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double y = rec.center_y(i);
        for (int j = 0; j < n; ++j) {
            const double x = rec.center_x(j);
            double acc = 0.0;
            for (int a = 0; a < p.angles_per_scan; ++a) {
                const double u = x * cos_a[a] + y * sin_a[a];
                const double dk = u * inv_spacing + det_c;
                const int k0 = static_cast<int>(std::floor(dk));
                if (k0 < 0 || k0 >= p.n_det - 1) continue;
                const double f = dk - k0;
                const double* q = filtered.data() + static_cast<size_t>(a) * p.n_det;
                acc += q[k0] + f * (q[k0 + 1] - q[k0]);
            }
            rec(i, j) = acc * weight;
        }
    }
    return rec;
}

} // namespace dynct
