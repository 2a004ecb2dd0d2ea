#ifndef RUSTICO_DOG_HPP
#define RUSTICO_DOG_HPP

#include <cstdint>

#include "rustico/image.hpp"

namespace rustico {

/// Difference-of-Gaussians receptive field. delta = +1 selects center-on
/// (bright structures on dark ground), delta = -1 center-off. sigma is the
/// standard deviation of the outer Gaussian; the inner one is fixed at 0.5*sigma.
struct DoGSpec {
    int delta = +1;
    double sigma = 1.0;
};

void validate(const DoGSpec& spec);

/// DoG mask: unit-mass inner Gaussian minus unit-mass outer Gaussian, both
/// sampled and normalized on the truncated square support of radius
/// ceil(3*sigma); negated for delta = -1. Sums to ~0 by construction.
Kernel2D dog_kernel(const DoGSpec& spec);

/// rectify(convolve(img, dog_kernel(spec))), computed with two separable
/// Gaussian blurs. Values are >= 0.
GrayImage dog_response(const GrayImage& img, const DoGSpec& spec);

/// Cache key for sharing DoG response maps: polarity plus sigma canonically
/// rounded to 1e-6.
struct DogKey {
    int delta = 0;
    std::int64_t sigma_micro = 0;

    bool operator<(const DogKey& o) const {
        return delta != o.delta ? delta < o.delta : sigma_micro < o.sigma_micro;
    }
    bool operator==(const DogKey& o) const {
        return delta == o.delta && sigma_micro == o.sigma_micro;
    }
};

DogKey dog_key(const DoGSpec& spec);

} // namespace rustico

#endif
