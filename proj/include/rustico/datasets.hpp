#ifndef RUSTICO_DATASETS_HPP
#define RUSTICO_DATASETS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rustico/image.hpp"
#include "rustico/image_io.hpp"
#include "rustico/metrics.hpp"

namespace rustico {

enum class Layout { tb_roses_1, cracktree206, drive };

Layout layout_from_string(const std::string& name);
std::string to_string(Layout layout);

/// File locations of one dataset item; empty paths mean the field is absent.
struct DatasetEntry {
    std::string id;
    std::filesystem::path image;
    std::filesystem::path centerline;
    std::filesystem::path segmentation;
    std::filesystem::path fov;
};

struct ScanResult {
    std::vector<DatasetEntry> items; // lexicographic id order
    std::vector<std::string> errors; // per-item problems, scan continues past them
};

/// Walks the documented directory layout. A manifest.json in the root can
/// override subdirectory names and file patterns ({stem} = image filename
/// stem, {id} = stem up to the first underscore).
ScanResult scan_dataset(const std::filesystem::path& root, Layout layout);

/// One loaded item, intensities normalized to [0, 1].
struct DatasetItem {
    std::string id;
    GrayImage image;
    std::optional<BinaryMask> gt_centerline;
    std::optional<BinaryMask> gt_segmentation;
    std::optional<BinaryMask> fov;
};

/// Loads pixels for an entry; invert flips intensities (1 - v) so dark
/// structures become bright. Throws IoError on unreadable files or when a
/// mask does not match the image dimensions.
DatasetItem load_item(const DatasetEntry& entry, Channel channel, bool invert);

/// Synthetic test fixture: image, exact ground-truth centerline and, when the
/// kind defines one, a region-of-interest mask (the textured half for
/// bar_plus_texture; empty otherwise).
struct Fixture {
    GrayImage image;
    BinaryMask gt;
    BinaryMask region;
};

/// Bright bar on dark ground, rotated by `angle` (counterclockwise, y up)
/// about the canvas center. GT marks the bar's centerline.
Fixture make_bar_fixture(int canvas, int length, int width, double angle);

/// Two bars at the given angles through the same center.
Fixture make_crossed_bars_fixture(int canvas, int length, int width, double angle_a,
                                  double angle_b);

/// Clean horizontal bar in the left half, checkerboard texture (squares of
/// `square` pixels) filling the right half. The region mask marks the
/// textured half.
Fixture make_bar_plus_texture_fixture(int width, int height, int bar_length, int bar_width,
                                      int square);

/// Quarter-circle arc of the given radius and stroke width. GT follows the
/// analytic arc.
Fixture make_curve_fixture(int canvas, double radius, int width);

} // namespace rustico

#endif
