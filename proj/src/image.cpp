#include "rustico/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rustico {

namespace {

inline int clamp_coord(int v, int hi) {
    return v < 0 ? 0 : (v >= hi ? hi - 1 : v);
}

} // namespace

GrayImage convolve(const GrayImage& img, const Kernel2D& k) {
    if (img.empty())
        throw std::invalid_argument("convolve: empty image");
    if (k.side() > 4 * std::max(img.width, img.height))
        throw std::invalid_argument("convolve: kernel side exceeds 4x image side");

    const int r = k.radius;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double sum = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = clamp_coord(y + dy, img.height);
                const double* srow = img.row(sy);
                const double* krow = k.weights.data() + static_cast<std::size_t>(dy + r) * k.side();
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = clamp_coord(x + dx, img.width);
                    sum += krow[dx + r] * srow[sx];
                }
            }
            out.at(x, y) = sum;
        }
    }
    return out;
}

std::vector<double> gaussian_taps(double sigma, int radius) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_taps: sigma must be positive");
    if (radius < 0)
        throw std::invalid_argument("gaussian_taps: negative radius");
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        taps[i + radius] = v;
        sum += v;
    }
    for (double& t : taps)
        t /= sum;
    return taps;
}

std::vector<double> gaussian_taps(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_taps: sigma must be positive");
    return gaussian_taps(sigma, static_cast<int>(std::ceil(3.0 * sigma)));
}

Kernel2D gaussian_kernel(double sigma) {
    const std::vector<double> taps = gaussian_taps(sigma);
    Kernel2D k;
    k.radius = static_cast<int>(taps.size() / 2);
    k.weights.resize(taps.size() * taps.size());
    for (std::size_t y = 0; y < taps.size(); ++y)
        for (std::size_t x = 0; x < taps.size(); ++x)
            k.weights[y * taps.size() + x] = taps[y] * taps[x];
    return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    return gaussian_blur(img, sigma, static_cast<int>(std::ceil(3.0 * sigma)));
}

GrayImage gaussian_blur(const GrayImage& img, double sigma, int radius) {
    if (img.empty())
        throw std::invalid_argument("gaussian_blur: empty image");
    if (2 * radius + 1 > 4 * std::max(img.width, img.height))
        throw std::invalid_argument("gaussian_blur: kernel side exceeds 4x image side");
    const std::vector<double> taps = gaussian_taps(sigma, radius);
    const int r = radius;

    // horizontal pass
    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double* src = img.row(y);
        double* dst = tmp.row(y);
        for (int x = 0; x < img.width; ++x) {
            double sum = 0.0;
            for (int d = -r; d <= r; ++d)
                sum += taps[d + r] * src[clamp_coord(x + d, img.width)];
            dst[x] = sum;
        }
    }
    // vertical pass
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        double* dst = out.row(y);
        for (int d = -r; d <= r; ++d) {
            const double w = taps[d + r];
            const double* src = tmp.row(clamp_coord(y + d, img.height));
            if (d == -r)
                for (int x = 0; x < img.width; ++x) dst[x] = w * src[x];
            else
                for (int x = 0; x < img.width; ++x) dst[x] += w * src[x];
        }
    }
    return out;
}

GrayImage rectify(const GrayImage& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        out.data[i] = img.data[i] > 0.0 ? img.data[i] : 0.0;
    return out;
}

GrayImage shift(const GrayImage& img, double rho, double angle) {
    const int dx = static_cast<int>(std::lround(rho * std::cos(angle)));
    const int dy = static_cast<int>(std::lround(rho * std::sin(angle)));
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= img.height)
            continue;
        const int x0 = std::max(0, dx);
        const int x1 = std::min(img.width, img.width + dx);
        const double* src = img.row(sy) - dx;
        double* dst = out.row(y);
        for (int x = x0; x < x1; ++x)
            dst[x] = src[x];
    }
    return out;
}

GrayImage normalize_max(const GrayImage& img) {
    double mx = 0.0;
    for (double v : img.data)
        mx = std::max(mx, v);
    GrayImage out = img;
    if (mx > 0.0)
        for (double& v : out.data)
            v /= mx;
    return out;
}

PixelPos argmax(const GrayImage& img) {
    PixelPos best;
    double mx = -std::numeric_limits<double>::infinity();
    for (int y = 0; y < img.height; ++y) {
        const double* row = img.row(y);
        for (int x = 0; x < img.width; ++x) {
            if (row[x] > mx) {
                mx = row[x];
                best = {x, y};
            }
        }
    }
    return best;
}

} // namespace rustico
