#pragma once

#include <cstddef>
#include <vector>

namespace dynct {

/// Square scalar raster with pixel centers on a regular grid.
///
/// Values are stored row-major: entry (i, j) is row i (the y index) and
/// column j (the x index). The grid is centered on the origin, so pixel
/// (i, j) covers the square [-n/2 + j, -n/2 + j + 1] x [-n/2 + i, -n/2 + i + 1]
/// in pixel units (times pixel_size), and its center sits at
///   x_j = (j - (n-1)/2) * pixel_size,  y_i = (i - (n-1)/2) * pixel_size.
/// Flattened ("vec") index is i*n + j, i.e. the x index runs fastest.
class ImageGrid {
  public:
    ImageGrid() = default;
    ImageGrid(int n, double fill = 0.0, double pixel_size = 1.0);

    int n() const { return n_; }
    double pixel_size() const { return pixel_size_; }

    double& operator()(int i, int j) { return values_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return values_[static_cast<size_t>(i) * n_ + j]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    size_t size() const { return values_.size(); }

    /// Physical coordinate of the center of column j / row i.
    double center_x(int j) const { return (j - 0.5 * (n_ - 1)) * pixel_size_; }
    double center_y(int i) const { return (i - 0.5 * (n_ - 1)) * pixel_size_; }

    /// Throws std::invalid_argument if a value is non-finite or the shape
    /// is inconsistent.
    void validate() const;

  private:
    int n_ = 0;
    double pixel_size_ = 1.0;
    std::vector<double> values_;
};

/// Per-pixel displacement field, in pixels per one scan duration.
/// vx/vy share the indexing convention of ImageGrid.
struct FlowField {
    ImageGrid vx;
    ImageGrid vy;

    FlowField() = default;
    explicit FlowField(int n) : vx(n), vy(n) {}
    FlowField(ImageGrid x, ImageGrid y);

    int n() const { return vx.n(); }
    void validate() const;
};

enum class Axis { X, Y };

/// Second-order central difference along one axis, Neumann boundary
/// (ghost cell replicates the edge value, so the edge stencil is
/// (f_1 - f_0)/2). Units: value per pixel.
ImageGrid spatial_derivative(const ImageGrid& img, Axis axis);

/// Five-point Laplacian with the same Neumann ghost convention,
/// d2/dx2 + d2/dy2.
ImageGrid laplacian(const ImageGrid& img);

/// Bilinear interpolation at physical point (x, y); out-of-domain points
/// clamp to the edge pixel centers.
double bilinear_sample(const ImageGrid& img, double x, double y);

/// Backward warp: output(i,j) = img sampled at (x_j - s*vx(i,j), y_i - s*vy(i,j)).
/// s is in scan units (s = 1 advances one full scan duration).
ImageGrid warp_backward(const ImageGrid& img, const FlowField& flow, double s);

/// Resample to new_n x new_n. Downsampling (new_n < n) averages k x k blocks,
/// upsampling interpolates bilinearly. Only power-of-two factors are
/// supported; anything else throws std::invalid_argument.
ImageGrid resample(const ImageGrid& img, int new_n);

/// Resample a flow field; displacement values are additionally scaled by
/// new_n/n so they stay expressed in pixels of the target grid.
FlowField resample(const FlowField& flow, int new_n);

} // namespace dynct
