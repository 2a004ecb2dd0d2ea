#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "rustico/datasets.hpp"
#include "rustico/errors.hpp"

using namespace rustico;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("rustico_ds_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void put_png(const fs::path& p, int w, int h, double value) {
    fs::create_directories(p.parent_path());
    write_png_unit(GrayImage(w, h, value), p.string());
}

} // namespace

TEST_CASE("bar fixture draws the stated bar and centerline") {
    const Fixture fx = make_bar_fixture(101, 40, 3, 0.0);
    const int c = 50;
    // centerline on the middle row only
    for (int x = 0; x < 101; ++x)
        for (int y = 0; y < 101; ++y) {
            if (fx.gt.get(x, y)) {
                CHECK(y == c);
                CHECK(std::abs(x - c) <= 20);
                CHECK(fx.image.at(x, y) == 1.0);
            }
        }
    CHECK(fx.gt.count() == 40);
    CHECK(fx.image.at(c, c) == 1.0);
    CHECK(fx.image.at(c, c + 2) == 0.0); // above the 3-wide band
    CHECK(fx.image.at(5, 5) == 0.0);
}

TEST_CASE("rotated bar fixture stays centered") {
    const Fixture fx = make_bar_fixture(101, 41, 3, std::numbers::pi / 4);
    CHECK(fx.image.at(50, 50) == 1.0);
    CHECK(fx.gt.get(50, 50));
    // with y up, angle pi/4 runs along the (1, -1) pixel diagonal
    int on_diag = 0, total = 0;
    for (int y = 0; y < 101; ++y)
        for (int x = 0; x < 101; ++x)
            if (fx.gt.get(x, y)) {
                ++total;
                if (std::abs((x - 50) + (y - 50)) <= 1)
                    ++on_diag;
            }
    CHECK(total > 20);
    CHECK(on_diag == total);
}

TEST_CASE("crossed bars accumulate both centerlines") {
    const Fixture fx = make_crossed_bars_fixture(61, 31, 3, 0.0, std::numbers::pi / 2);
    CHECK(fx.gt.get(30, 30));
    CHECK(fx.gt.get(30 + 10, 30));
    CHECK(fx.gt.get(30, 30 + 10));
    CHECK(fx.image.at(30 - 10, 30) == 1.0);
    CHECK(fx.image.at(30, 30 - 10) == 1.0);
}

TEST_CASE("bar plus texture fixture partitions the canvas") {
    const Fixture fx = make_bar_plus_texture_fixture(80, 40, 24, 3, 2);
    // region marks exactly the right half
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 80; ++x)
            CHECK(fx.region.get(x, y) == (x >= 40));
    // checkerboard alternates in 2-pixel squares
    CHECK(fx.image.at(40, 0) == 1.0);
    CHECK(fx.image.at(42, 0) == 0.0);
    CHECK(fx.image.at(40, 2) == 0.0);
    CHECK(fx.image.at(42, 2) == 1.0);
    // bar centerline inside the left half
    bool has_gt = false;
    for (int x = 0; x < 40; ++x)
        has_gt |= fx.gt.get(x, 20);
    CHECK(has_gt);
    CHECK(fx.gt.count() == 24);
}

TEST_CASE("curve fixture ground truth hugs the analytic arc") {
    const double radius = 30.0;
    const Fixture fx = make_curve_fixture(101, radius, 3);
    const double cx = 101 * 0.15;
    const double cy = 101 * 0.85;
    REQUIRE(fx.gt.count() > 20);
    for (int y = 0; y < 101; ++y)
        for (int x = 0; x < 101; ++x)
            if (fx.gt.get(x, y)) {
                const double r = std::hypot(x - cx, cy - y);
                CHECK(std::fabs(r - radius) <= 0.5);
            }
    // independent rasterization: every analytic sample has a gt pixel nearby
    for (int s = 0; s <= 90; ++s) {
        const double theta = (std::numbers::pi / 2.0) * s / 90.0;
        const int px = static_cast<int>(std::lround(cx + radius * std::cos(theta)));
        const int py = static_cast<int>(std::lround(cy - radius * std::sin(theta)));
        if (px < 0 || py < 0 || px >= 101 || py >= 101)
            continue;
        bool near = false;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (px + dx >= 0 && py + dy >= 0 && px + dx < 101 && py + dy < 101)
                    near |= fx.gt.get(px + dx, py + dy);
        CHECK(near);
    }
}

TEST_CASE("tb_roses layout scan keeps evaluable items and reports holes") {
    TempDir tmp;
    put_png(tmp.path / "images" / "rose_b.png", 24, 16, 0.5);
    put_png(tmp.path / "images" / "rose_a.png", 24, 16, 0.5);
    put_png(tmp.path / "images" / "rose_c.png", 24, 16, 0.5);
    put_png(tmp.path / "gt_centerline" / "rose_a.png", 24, 16, 1.0);
    put_png(tmp.path / "gt_centerline" / "rose_b.png", 24, 16, 1.0);
    put_png(tmp.path / "gt_segmentation" / "rose_a.png", 24, 16, 1.0);

    const ScanResult scan = scan_dataset(tmp.path, Layout::tb_roses_1);
    REQUIRE(scan.items.size() == 2);
    CHECK(scan.items[0].id == "rose_a");
    CHECK(scan.items[1].id == "rose_b");
    CHECK(!scan.items[0].segmentation.empty());
    CHECK(scan.items[1].segmentation.empty());
    CHECK(!scan.errors.empty()); // rose_c has no ground truth at all

    // deterministic rescans
    const ScanResult again = scan_dataset(tmp.path, Layout::tb_roses_1);
    REQUIRE(again.items.size() == scan.items.size());
    for (std::size_t i = 0; i < scan.items.size(); ++i)
        CHECK(again.items[i].id == scan.items[i].id);
}

TEST_CASE("drive layout resolves manual and fov masks by id") {
    TempDir tmp;
    put_png(tmp.path / "images" / "01_test.png", 20, 18, 0.4);
    put_png(tmp.path / "images" / "02_test.png", 20, 18, 0.4);
    put_png(tmp.path / "1st_manual" / "01_manual1.png", 20, 18, 1.0);
    put_png(tmp.path / "1st_manual" / "02_manual1.png", 20, 18, 1.0);
    put_png(tmp.path / "mask" / "01_test_mask.png", 20, 18, 1.0);
    put_png(tmp.path / "mask" / "02_test_mask.png", 20, 18, 1.0);

    const ScanResult scan = scan_dataset(tmp.path, Layout::drive);
    REQUIRE(scan.items.size() == 2);
    CHECK(scan.errors.empty());
    CHECK(!scan.items[0].segmentation.empty());
    CHECK(!scan.items[0].fov.empty());

    const DatasetItem item = load_item(scan.items[0], Channel::green, false);
    CHECK(item.image.width == 20);
    CHECK(item.gt_segmentation.has_value());
    CHECK(item.fov.has_value());
    CHECK(!item.gt_centerline.has_value());
}

TEST_CASE("manifest overrides the expected directory names") {
    TempDir tmp;
    put_png(tmp.path / "pics" / "z1.png", 10, 10, 0.3);
    put_png(tmp.path / "lines" / "z1.png", 10, 10, 1.0);
    {
        std::ofstream out(tmp.path / "manifest.json");
        out << R"({"images": "pics", "centerline": ["lines/{stem}.png"]})";
    }
    const ScanResult scan = scan_dataset(tmp.path, Layout::cracktree206);
    REQUIRE(scan.items.size() == 1);
    CHECK(scan.items[0].id == "z1");
    CHECK(!scan.items[0].centerline.empty());
}

TEST_CASE("empty roots yield zero items plus a summary error") {
    TempDir tmp;
    const ScanResult scan = scan_dataset(tmp.path / "missing", Layout::cracktree206);
    CHECK(scan.items.empty());
    CHECK(!scan.errors.empty());

    fs::create_directories(tmp.path / "image");
    const ScanResult empty = scan_dataset(tmp.path, Layout::cracktree206);
    CHECK(empty.items.empty());
    CHECK(!empty.errors.empty());
}

TEST_CASE("inversion flips intensities and is an involution") {
    TempDir tmp;
    GrayImage ramp(8, 1);
    for (int x = 0; x < 8; ++x)
        ramp.at(x, 0) = x / 7.0;
    put_png(tmp.path / "image" / "r.png", 1, 1, 0.0); // placeholder so the dir exists
    write_png_unit(ramp, (tmp.path / "image" / "r.png").string());
    put_png(tmp.path / "gt" / "r.png", 8, 1, 1.0);

    const ScanResult scan = scan_dataset(tmp.path, Layout::cracktree206);
    REQUIRE(scan.items.size() == 1);
    const DatasetItem plain = load_item(scan.items[0], Channel::luminance, false);
    const DatasetItem flipped = load_item(scan.items[0], Channel::luminance, true);
    for (std::size_t i = 0; i < plain.image.size(); ++i)
        CHECK(flipped.image.data[i] ==
              doctest::Approx(1.0 - plain.image.data[i]).epsilon(1e-12));
}

TEST_CASE("mask dimension mismatches surface as IoError") {
    TempDir tmp;
    put_png(tmp.path / "image" / "a.png", 10, 10, 0.5);
    put_png(tmp.path / "gt" / "a.png", 9, 10, 1.0);
    const ScanResult scan = scan_dataset(tmp.path, Layout::cracktree206);
    REQUIRE(scan.items.size() == 1);
    CHECK_THROWS_AS(load_item(scan.items[0], Channel::luminance, false), IoError);
}
