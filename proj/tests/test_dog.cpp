#include <doctest.h>

#include <numbers>
#include <stdexcept>

#include <cmath>

#include "rustico/cosfire.hpp"
#include "rustico/dog.hpp"

using namespace rustico;

TEST_CASE("dog kernel sums to ~0 and has the right polarity at center") {
    const Kernel2D on = dog_kernel({+1, 2.0});
    double sum = 0.0;
    for (double w : on.weights)
        sum += w;
    CHECK(std::fabs(sum) < 1e-6);
    CHECK(on.at(0, 0) > 0.0);

    const Kernel2D off = dog_kernel({-1, 2.0});
    CHECK(off.at(0, 0) < 0.0);
}

TEST_CASE("dog kernel off-center tap matches the truncated closed form") {
    const Kernel2D k = dog_kernel({+1, 2.0});
    const int r = k.radius;
    CHECK(r == 6);
    double si = 0.0, so = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double d2 = dx * dx + dy * dy;
            si += std::exp(-d2 / (2.0 * 1.0 * 1.0)); // inner sigma = 0.5*2
            so += std::exp(-d2 / (2.0 * 4.0));
        }
    const double expected = std::exp(-1.0 / 2.0) / si - std::exp(-1.0 / 8.0) / so;
    CHECK(k.at(1, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("center-off kernel is the exact negation of center-on") {
    const Kernel2D on = dog_kernel({+1, 1.7});
    const Kernel2D off = dog_kernel({-1, 1.7});
    REQUIRE(on.weights.size() == off.weights.size());
    for (std::size_t i = 0; i < on.weights.size(); ++i)
        CHECK(off.weights[i] == -on.weights[i]);
}

TEST_CASE("dog kernel rejects bad parameters") {
    CHECK_THROWS_AS(dog_kernel({+1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(dog_kernel({0, 1.0}), std::invalid_argument);
}

TEST_CASE("constant images produce near-zero DoG response") {
    const GrayImage img(21, 21, 0.8);
    const GrayImage resp = dog_response(img, {+1, 2.0});
    for (double v : resp.data)
        CHECK(v <= 1e-4);
}

TEST_CASE("separable DoG response equals direct convolution plus rectification") {
    GrayImage img(17, 15, 0.0);
    img.at(8, 7) = 1.0;
    img.at(3, 10) = 0.6;
    img.at(12, 2) = 0.3;
    const DoGSpec spec{+1, 1.3};
    const GrayImage fast = dog_response(img, spec);
    const GrayImage slow = rectify(convolve(img, dog_kernel(spec)));
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-12));
}

TEST_CASE("a thin bright line drives the center-on response, not center-off") {
    GrayImage img(21, 21, 0.0);
    for (int y = 0; y < 21; ++y)
        img.at(10, y) = 1.0; // 1-pixel vertical line
    const GrayImage on = dog_response(img, {+1, 1.0});
    CHECK(argmax(on).x == 10);
    CHECK(on.at(10, 10) > 0.0);

    const GrayImage off = dog_response(img, {-1, 1.0});
    CHECK(off.at(10, 10) == 0.0);
}

TEST_CASE("step edge: center-on peaks on the bright side, center-off on the dark side") {
    GrayImage img(30, 11, 0.0);
    for (int y = 0; y < 11; ++y)
        for (int x = 15; x < 30; ++x)
            img.at(x, y) = 1.0;
    const GrayImage on = dog_response(img, {+1, 2.0});
    const GrayImage off = dog_response(img, {-1, 2.0});
    CHECK(argmax(on).x >= 15);
    CHECK(argmax(off).x < 15);
}

TEST_CASE("dog responses stay nonnegative and finite") {
    GrayImage img(16, 16);
    for (std::size_t i = 0; i < img.size(); ++i)
        img.data[i] = (i * 2654435761u % 997) / 997.0;
    for (int delta : {+1, -1}) {
        const GrayImage resp = dog_response(img, {delta, 2.4});
        for (double v : resp.data) {
            CHECK(v >= 0.0);
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("feature bank computes one DoG map per distinct (delta, sigma)") {
    GrayImage img(31, 31, 0.0);
    for (int x = 5; x < 26; ++x)
        img.at(x, 15) = 1.0;

    CosfireFilter f;
    f.sigma0 = 1.0;
    f.alpha = 0.1;
    f.tuples = {{+1, 2.0, 0.0, 0.0}, {+1, 2.0, 4.0, 0.0}, {+1, 2.0, 4.0, std::numbers::pi}};

    FeatureBank bank(img);
    const GrayImage resp = response(f, bank);
    CHECK(bank.dog_computations() == 1);   // shared across all three tuples
    CHECK(bank.blur_computations() == 2);  // rho=0 and rho=4 blur sigmas

    // asking again must not recompute
    response(f, bank);
    CHECK(bank.dog_computations() == 1);
    CHECK(bank.blur_computations() == 2);

    const DogKey a = dog_key({+1, 2.0});
    const DogKey b = dog_key({+1, 2.0 + 1e-9}); // rounds to the same key
    CHECK(a == b);
    const DogKey c = dog_key({+1, 2.1});
    CHECK(!(a == c));
}
