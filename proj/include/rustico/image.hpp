#ifndef RUSTICO_IMAGE_HPP
#define RUSTICO_IMAGE_HPP

#include <cstddef>
#include <vector>

namespace rustico {

/// 2-D raster of real-valued intensities, row-major. The single carrier for
/// inputs, intermediate feature maps and filter responses. Pixel (x, y) has
/// x growing rightward (column) and y growing downward (row).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    double* row(int y) { return data.data() + static_cast<std::size_t>(y) * width; }
    const double* row(int y) const { return data.data() + static_cast<std::size_t>(y) * width; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool same_size(const GrayImage& other) const {
        return width == other.width && height == other.height;
    }
};

/// Square convolution mask with odd side 2*radius+1, center tap at (radius, radius).
struct Kernel2D {
    int radius = 0;
    std::vector<double> weights; // row-major, side = 2*radius+1

    int side() const { return 2 * radius + 1; }
    double& at(int dx, int dy) { return weights[static_cast<std::size_t>(dy + radius) * side() + (dx + radius)]; }
    double at(int dx, int dy) const { return weights[static_cast<std::size_t>(dy + radius) * side() + (dx + radius)]; }
};

/// Correlation of img with k, borders handled by edge replication.
/// out(x,y) = sum_{u,v} k(u,v) * img(clamp(x+u), clamp(y+v)).
/// Rejects kernels wider than 4x the larger image side.
GrayImage convolve(const GrayImage& img, const Kernel2D& k);

/// Isotropic Gaussian mask, radius ceil(3*sigma), weights normalized to sum 1.
Kernel2D gaussian_kernel(double sigma);

/// 1-D Gaussian taps for the separable path, radius ceil(3*sigma), sum 1.
std::vector<double> gaussian_taps(double sigma);

/// Same, truncated at an explicit radius.
std::vector<double> gaussian_taps(double sigma, int radius);

/// Separable Gaussian blur with edge replication. Equal to
/// convolve(img, gaussian_kernel(sigma)) up to floating-point rounding.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Separable blur with an explicit truncation radius.
GrayImage gaussian_blur(const GrayImage& img, double sigma, int radius);

/// Half-wave rectification: out = max(0, v) pointwise.
GrayImage rectify(const GrayImage& img);

/// Translate content by the polar vector (rho, angle) rounded to whole pixels:
/// (dx, dy) = (round(rho*cos(angle)), round(rho*sin(angle))), with y downward
/// and angle measured from +x toward +y. Vacated pixels are zero-filled.
GrayImage shift(const GrayImage& img, double rho, double angle);

/// Divide by the global maximum when it is positive; otherwise return a copy.
GrayImage normalize_max(const GrayImage& img);

/// Location of the largest value, first occurrence in row-major scan order.
struct PixelPos {
    int x = 0;
    int y = 0;
};
PixelPos argmax(const GrayImage& img);

} // namespace rustico

#endif
