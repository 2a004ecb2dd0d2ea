#include "rustico/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rustico/errors.hpp"

namespace fs = std::filesystem;

namespace rustico {

namespace {

const std::set<std::string> kImageExtensions = {".png", ".pgm", ".ppm"};

// candidate sub-path templates per ground-truth role, tried in order
struct LayoutSpec {
    std::vector<std::string> image_dirs;
    std::vector<std::string> centerline;
    std::vector<std::string> segmentation;
    std::vector<std::string> fov;
};

LayoutSpec default_spec(Layout layout) {
    switch (layout) {
    case Layout::tb_roses_1:
        return {{"images", "image"},
                {"gt_centerline/{stem}.png", "gt_centerline/{stem}.pgm", "centerline/{stem}.png"},
                {"gt_segmentation/{stem}.png", "gt_segmentation/{stem}.pgm",
                 "segmentation/{stem}.png"},
                {}};
    case Layout::cracktree206:
        return {{"image", "images"},
                {"gt/{stem}.png", "gt/{stem}.pgm", "GT/{stem}.png", "groundtruth/{stem}.png"},
                {},
                {}};
    case Layout::drive:
        return {{"images", "image"},
                {},
                {"1st_manual/{id}_manual1.png", "1st_manual/{id}_manual1.pgm",
                 "manual/{id}_manual1.png"},
                {"mask/{id}_test_mask.png", "mask/{id}_training_mask.png",
                 "mask/{stem}_mask.png", "mask/{stem}_mask.pgm"}};
    }
    throw std::invalid_argument("unknown layout");
}

std::string expand(const std::string& tmpl, const std::string& stem, const std::string& id) {
    std::string out = tmpl;
    auto replace_all = [&](const std::string& key, const std::string& value) {
        for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key))
            out.replace(pos, key.size(), value);
    };
    replace_all("{stem}", stem);
    replace_all("{id}", id);
    return out;
}

fs::path find_first(const fs::path& root, const std::vector<std::string>& templates,
                    const std::string& stem, const std::string& id) {
    for (const std::string& tmpl : templates) {
        const fs::path candidate = root / expand(tmpl, stem, id);
        if (fs::exists(candidate))
            return candidate;
    }
    return {};
}

void apply_manifest(const fs::path& root, LayoutSpec& spec, std::vector<std::string>& errors) {
    const fs::path manifest = root / "manifest.json";
    if (!fs::exists(manifest))
        return;
    try {
        std::ifstream in(manifest);
        const nlohmann::json j = nlohmann::json::parse(in);
        auto read_list = [&](const char* key, std::vector<std::string>& target) {
            if (!j.contains(key))
                return;
            target.clear();
            if (j.at(key).is_string())
                target.push_back(j.at(key).get<std::string>());
            else
                for (const auto& item : j.at(key))
                    target.push_back(item.get<std::string>());
        };
        read_list("images", spec.image_dirs);
        read_list("centerline", spec.centerline);
        read_list("segmentation", spec.segmentation);
        read_list("fov", spec.fov);
    } catch (const std::exception& e) {
        errors.push_back(std::string("manifest.json ignored: ") + e.what());
    }
}

} // namespace

Layout layout_from_string(const std::string& name) {
    if (name == "tb_roses_1")
        return Layout::tb_roses_1;
    if (name == "cracktree206")
        return Layout::cracktree206;
    if (name == "drive")
        return Layout::drive;
    throw std::invalid_argument("unknown dataset layout: " + name);
}

std::string to_string(Layout layout) {
    switch (layout) {
    case Layout::tb_roses_1:
        return "tb_roses_1";
    case Layout::cracktree206:
        return "cracktree206";
    case Layout::drive:
        return "drive";
    }
    return "?";
}

ScanResult scan_dataset(const fs::path& root, Layout layout) {
    ScanResult result;
    if (!fs::exists(root) || !fs::is_directory(root)) {
        result.errors.push_back("dataset root not found: " + root.string());
        return result;
    }
    LayoutSpec spec = default_spec(layout);
    apply_manifest(root, spec, result.errors);

    fs::path image_dir;
    for (const std::string& dir : spec.image_dirs)
        if (fs::is_directory(root / dir)) {
            image_dir = root / dir;
            break;
        }
    if (image_dir.empty()) {
        result.errors.push_back("no image directory under " + root.string());
        return result;
    }

    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(image_dir)) {
        if (!de.is_regular_file())
            continue;
        std::string ext = de.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (kImageExtensions.count(ext))
            files.push_back(de.path());
    }
    std::sort(files.begin(), files.end());

    const bool wants_centerline = !spec.centerline.empty();
    const bool wants_segmentation = !spec.segmentation.empty();
    for (const fs::path& file : files) {
        const std::string stem = file.stem().string();
        const std::string id = stem.substr(0, stem.find('_'));
        DatasetEntry entry;
        entry.id = stem;
        entry.image = file;
        entry.centerline = find_first(root, spec.centerline, stem, id);
        entry.segmentation = find_first(root, spec.segmentation, stem, id);
        entry.fov = find_first(root, spec.fov, stem, id);
        if (wants_centerline && entry.centerline.empty())
            result.errors.push_back(stem + ": missing centerline ground truth");
        if (wants_segmentation && entry.segmentation.empty())
            result.errors.push_back(stem + ": missing segmentation ground truth");
        // an item stays evaluable as long as one ground-truth role resolved
        const bool any_gt = !entry.centerline.empty() || !entry.segmentation.empty();
        const bool wants_gt = wants_centerline || wants_segmentation;
        if (wants_gt && !any_gt)
            continue;
        result.items.push_back(std::move(entry));
    }
    if (result.items.empty())
        result.errors.push_back("no usable items under " + root.string());
    return result;
}

DatasetItem load_item(const DatasetEntry& entry, Channel channel, bool invert) {
    DatasetItem item;
    item.id = entry.id;
    item.image = load_image(entry.image.string(), channel);
    if (invert)
        for (double& v : item.image.data)
            v = 1.0 - v;

    auto load_optional = [&](const fs::path& path) -> std::optional<BinaryMask> {
        if (path.empty())
            return std::nullopt;
        BinaryMask mask = load_mask(path.string());
        if (mask.width != item.image.width || mask.height != item.image.height)
            throw IoError(entry.id + ": mask dimensions differ from image: " + path.string());
        return mask;
    };
    item.gt_centerline = load_optional(entry.centerline);
    item.gt_segmentation = load_optional(entry.segmentation);
    item.fov = load_optional(entry.fov);
    return item;
}

namespace {

void draw_bar(GrayImage& img, BinaryMask& gt, double cx, double cy, int length, int width,
              double angle) {
    // axis direction in pixel coordinates; angles are counterclockwise with y up
    const double ux = std::cos(angle);
    const double uy = -std::sin(angle);
    const double half_len = (length - 1) / 2.0;
    const double half_wid = width / 2.0;

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double rx = x - cx;
            const double ry = y - cy;
            const double along = rx * ux + ry * uy;
            const double across = -rx * uy + ry * ux;
            if (std::fabs(along) <= half_len + 0.5 && across >= -half_wid && across < half_wid)
                img.at(x, y) = 1.0;
        }
    }
    // centerline: walk the axis and round
    const int steps = 4 * length;
    for (int s = 0; s <= steps; ++s) {
        const double t = -half_len + (2.0 * half_len) * s / steps;
        const int px = static_cast<int>(std::lround(cx + t * ux));
        const int py = static_cast<int>(std::lround(cy + t * uy));
        if (px >= 0 && py >= 0 && px < gt.width && py < gt.height)
            gt.set(px, py, true);
    }
}

} // namespace

Fixture make_bar_fixture(int canvas, int length, int width, double angle) {
    if (canvas < 3 || length < 1 || width < 1)
        throw std::invalid_argument("make_bar_fixture: bad parameters");
    Fixture fx;
    fx.image = GrayImage(canvas, canvas, 0.0);
    fx.gt = BinaryMask(canvas, canvas);
    fx.region = BinaryMask(canvas, canvas);
    const double c = canvas / 2;
    draw_bar(fx.image, fx.gt, c, c, length, width, angle);
    return fx;
}

Fixture make_crossed_bars_fixture(int canvas, int length, int width, double angle_a,
                                  double angle_b) {
    Fixture fx = make_bar_fixture(canvas, length, width, angle_a);
    const double c = canvas / 2;
    draw_bar(fx.image, fx.gt, c, c, length, width, angle_b);
    return fx;
}

Fixture make_bar_plus_texture_fixture(int width, int height, int bar_length, int bar_width,
                                      int square) {
    if (width < 4 || height < 4 || square < 1)
        throw std::invalid_argument("make_bar_plus_texture_fixture: bad parameters");
    Fixture fx;
    fx.image = GrayImage(width, height, 0.0);
    fx.gt = BinaryMask(width, height);
    fx.region = BinaryMask(width, height);

    const int half = width / 2;
    draw_bar(fx.image, fx.gt, half / 2, height / 2, bar_length, bar_width, 0.0);

    for (int y = 0; y < height; ++y)
        for (int x = half; x < width; ++x) {
            fx.region.set(x, y, true);
            const bool on = ((x - half) / square + y / square) % 2 == 0;
            fx.image.at(x, y) = on ? 1.0 : 0.0;
        }
    return fx;
}

Fixture make_curve_fixture(int canvas, double radius, int width) {
    if (canvas < 8 || radius <= 0.0 || width < 1)
        throw std::invalid_argument("make_curve_fixture: bad parameters");
    Fixture fx;
    fx.image = GrayImage(canvas, canvas, 0.0);
    fx.gt = BinaryMask(canvas, canvas);
    fx.region = BinaryMask(canvas, canvas);

    // quarter arc centered near the lower-left corner, sweeping 0..pi/2;
    // the centerline is the annulus of half-pixel radial tolerance, so every
    // ground-truth pixel lies within 0.5 of the analytic arc by construction
    const double cx = canvas * 0.15;
    const double cy = canvas * 0.85;
    const double half_wid = width / 2.0;
    for (int y = 0; y < canvas; ++y)
        for (int x = 0; x < canvas; ++x) {
            const double dx = x - cx;
            const double dy = cy - y; // y up
            if (dx < 0.0 || dy < 0.0)
                continue;
            const double r = std::hypot(dx, dy);
            if (std::fabs(r - radius) < half_wid)
                fx.image.at(x, y) = 1.0;
            if (std::fabs(r - radius) <= 0.5)
                fx.gt.set(x, y, true);
        }
    return fx;
}

} // namespace rustico
