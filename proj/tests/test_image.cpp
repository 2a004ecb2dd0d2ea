#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "rustico/image.hpp"

using namespace rustico;

namespace {

GrayImage random_image(int w, int h, unsigned seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    GrayImage img(w, h);
    for (double& v : img.data)
        v = dist(rng);
    return img;
}

Kernel2D identity_kernel() {
    Kernel2D k;
    k.radius = 0;
    k.weights = {1.0};
    return k;
}

} // namespace

TEST_CASE("convolve with identity kernel leaves image unchanged") {
    const GrayImage img = random_image(9, 7, 41);
    const GrayImage out = convolve(img, identity_kernel());
    REQUIRE(out.width == img.width);
    REQUIRE(out.height == img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(out.data[i] == img.data[i]);
}

TEST_CASE("convolving an impulse reproduces the sampled Gaussian") {
    GrayImage img(11, 11, 0.0);
    img.at(5, 5) = 1.0;
    const Kernel2D k = gaussian_kernel(1.0);
    const GrayImage out = convolve(img, k);
    // closed form evaluated independently, same truncation and normalization
    const int r = k.radius;
    double norm = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            norm += std::exp(-(dx * dx + dy * dy) / 2.0);
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double expected = std::exp(-(dx * dx + dy * dy) / 2.0) / norm;
            CHECK(out.at(5 + dx, 5 + dy) == doctest::Approx(expected).epsilon(1e-9));
        }
}

TEST_CASE("edge replication preserves constant images under unit-sum kernels") {
    const GrayImage img(5, 5, 1.0);
    const GrayImage out = convolve(img, gaussian_kernel(1.0));
    for (double v : out.data)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convolve rejects degenerate kernel sizes") {
    const GrayImage img(4, 4, 0.5);
    Kernel2D k;
    k.radius = 9; // side 19 > 4*4
    k.weights.assign(19 * 19, 0.0);
    CHECK_THROWS_AS(convolve(img, k), std::invalid_argument);
    CHECK_THROWS_AS(convolve(GrayImage(), identity_kernel()), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_blur(img, 3.0), std::invalid_argument); // same rule
}

TEST_CASE("convolve is linear") {
    const GrayImage a = random_image(16, 16, 1);
    const GrayImage b = random_image(16, 16, 2);
    const Kernel2D k = gaussian_kernel(1.5);
    const double ca = 2.25, cb = -0.75;
    GrayImage mix(16, 16);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix.data[i] = ca * a.data[i] + cb * b.data[i];
    const GrayImage lhs = convolve(mix, k);
    const GrayImage ra = convolve(a, k);
    const GrayImage rb = convolve(b, k);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        CHECK(lhs.data[i] == doctest::Approx(ca * ra.data[i] + cb * rb.data[i]).epsilon(1e-9));
}

TEST_CASE("gaussian kernel is normalized and unimodal") {
    const Kernel2D k = gaussian_kernel(1.0);
    double sum = 0.0;
    for (double w : k.weights)
        sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const double center = k.at(0, 0);
    for (double w : k.weights)
        CHECK(center >= w);
    CHECK(k.radius == 3);
}

TEST_CASE("gaussian kernel tap ratio matches the closed form") {
    const Kernel2D k = gaussian_kernel(2.0);
    CHECK(k.at(1, 0) / k.at(0, 0) == doctest::Approx(std::exp(-1.0 / 8.0)).epsilon(1e-9));
    CHECK(k.radius == 6);
}

TEST_CASE("gaussian kernel rejects nonpositive sigma") {
    CHECK_THROWS_AS(gaussian_kernel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(-1.0), std::invalid_argument);
}

TEST_CASE("separable blur matches the full 2-D convolution") {
    const GrayImage img = random_image(24, 18, 7);
    const GrayImage sep = gaussian_blur(img, 1.7);
    const GrayImage full = convolve(img, gaussian_kernel(1.7));
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(sep.data[i] == doctest::Approx(full.data[i]).epsilon(1e-12));
}

TEST_CASE("cascaded blurs approximate a single wider blur on the interior") {
    const GrayImage img = random_image(48, 48, 11, 0.5, 1.5);
    const double s1 = 1.5, s2 = 2.0;
    const GrayImage twice = gaussian_blur(gaussian_blur(img, s1), s2);
    const GrayImage once = gaussian_blur(img, std::sqrt(s1 * s1 + s2 * s2));
    const int margin = static_cast<int>(std::ceil(3.0 * (s1 + s2)));
    for (int y = margin; y < img.height - margin; ++y)
        for (int x = margin; x < img.width - margin; ++x) {
            const double rel = std::fabs(twice.at(x, y) - once.at(x, y)) / std::fabs(once.at(x, y));
            CHECK(rel < 1e-3);
        }
}

TEST_CASE("rectify clamps negatives and is idempotent") {
    GrayImage img(3, 1);
    img.data = {-1.0, 0.0, 2.0};
    const GrayImage once = rectify(img);
    CHECK(once.data == std::vector<double>{0.0, 0.0, 2.0});
    const GrayImage twice = rectify(once);
    CHECK(twice.data == once.data);

    GrayImage neg(4, 4, -3.5);
    for (double v : rectify(neg).data)
        CHECK(v == 0.0);
    GrayImage pos(4, 4, 0.25);
    CHECK(rectify(pos).data == pos.data);
}

TEST_CASE("shift by rho zero is the identity") {
    const GrayImage img = random_image(10, 10, 3);
    const GrayImage out = shift(img, 0.0, 1.234);
    CHECK(out.data == img.data);
}

TEST_CASE("axis-aligned shift moves a bright pixel as specified") {
    GrayImage img(12, 12, 0.0);
    img.at(5, 5) = 1.0;
    const GrayImage out = shift(img, 2.0, 0.0);
    CHECK(out.at(7, 5) == 1.0);
    double total = 0.0;
    for (double v : out.data)
        total += v;
    CHECK(total == 1.0);
}

TEST_CASE("diagonal shift matches a brute-force remap") {
    const GrayImage img = random_image(15, 13, 9);
    const double rho = 2.0;
    const double angle = std::numbers::pi / 4.0;
    const GrayImage out = shift(img, rho, angle);

    const int dx = static_cast<int>(std::lround(rho * std::cos(angle)));
    const int dy = static_cast<int>(std::lround(rho * std::sin(angle)));
    CHECK(dx == 1);
    CHECK(dy == 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int sx = x - dx;
            const int sy = y - dy;
            const double expected =
                (sx >= 0 && sy >= 0 && sx < img.width && sy < img.height) ? img.at(sx, sy) : 0.0;
            CHECK(out.at(x, y) == expected);
        }
}

TEST_CASE("opposite shifts cancel away from the zero-filled border") {
    const GrayImage img = random_image(20, 20, 5);
    const double rho = 3.0, theta = 0.7;
    const GrayImage back = shift(shift(img, rho, theta), rho, theta + std::numbers::pi);
    const int dx = static_cast<int>(std::lround(rho * std::cos(theta)));
    const int dy = static_cast<int>(std::lround(rho * std::sin(theta)));
    const int mx = std::abs(dx), my = std::abs(dy);
    for (int y = my; y < img.height - my; ++y)
        for (int x = mx; x < img.width - mx; ++x)
            CHECK(back.at(x, y) == img.at(x, y));
}

TEST_CASE("normalize_max and argmax") {
    GrayImage img(4, 3, 0.0);
    img.at(2, 1) = 0.5;
    img.at(1, 2) = 0.25;
    const GrayImage norm = normalize_max(img);
    CHECK(norm.at(2, 1) == 1.0);
    CHECK(norm.at(1, 2) == 0.5);
    const PixelPos p = argmax(img);
    CHECK(p.x == 2);
    CHECK(p.y == 1);
    // all-zero map survives normalization untouched
    const GrayImage zeros(3, 3, 0.0);
    CHECK(normalize_max(zeros).data == zeros.data);
}
