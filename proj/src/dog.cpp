#include "rustico/dog.hpp"

#include <cmath>
#include <stdexcept>

namespace rustico {

void validate(const DoGSpec& spec) {
    if (spec.delta != +1 && spec.delta != -1)
        throw std::invalid_argument("DoGSpec: delta must be +1 or -1");
    if (!(spec.sigma > 0.0))
        throw std::invalid_argument("DoGSpec: sigma must be positive");
}

Kernel2D dog_kernel(const DoGSpec& spec) {
    validate(spec);
    const int r = static_cast<int>(std::ceil(3.0 * spec.sigma));
    const double s_in = 0.5 * spec.sigma;
    const double s_out = spec.sigma;

    Kernel2D k;
    k.radius = r;
    k.weights.assign(static_cast<std::size_t>(k.side()) * k.side(), 0.0);

    double sum_in = 0.0, sum_out = 0.0;
    std::vector<double> g_in(k.weights.size()), g_out(k.weights.size());
    std::size_t i = 0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++i) {
            const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
            g_in[i] = std::exp(-d2 / (2.0 * s_in * s_in));
            g_out[i] = std::exp(-d2 / (2.0 * s_out * s_out));
            sum_in += g_in[i];
            sum_out += g_out[i];
        }
    }
    for (i = 0; i < k.weights.size(); ++i) {
        const double v = g_in[i] / sum_in - g_out[i] / sum_out;
        k.weights[i] = spec.delta > 0 ? v : -v;
    }
    return k;
}

GrayImage dog_response(const GrayImage& img, const DoGSpec& spec) {
    validate(spec);
    // Separable form of convolve(img, dog_kernel): each constituent Gaussian
    // is truncated at the outer radius, so blur both at that shared support.
    const int r = static_cast<int>(std::ceil(3.0 * spec.sigma));
    const GrayImage inner = gaussian_blur(img, 0.5 * spec.sigma, r);
    const GrayImage outer = gaussian_blur(img, spec.sigma, r);

    GrayImage out(img.width, img.height);
    if (spec.delta > 0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double v = inner.data[i] - outer.data[i];
            out.data[i] = v > 0.0 ? v : 0.0;
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double v = outer.data[i] - inner.data[i];
            out.data[i] = v > 0.0 ? v : 0.0;
        }
    }
    return out;
}

DogKey dog_key(const DoGSpec& spec) {
    return DogKey{spec.delta, static_cast<std::int64_t>(std::llround(spec.sigma * 1e6))};
}

} // namespace rustico
