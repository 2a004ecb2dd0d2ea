#ifndef RUSTICO_METRICS_HPP
#define RUSTICO_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rustico/image.hpp"

namespace rustico {

/// Per-pixel boolean raster, dimensions always matched against whatever it is
/// compared with.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 0 or 1, row-major

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t size() const { return bits.size(); }
    std::size_t count() const;
    bool same_size(const BinaryMask& o) const { return width == o.width && height == o.height; }
};

/// Distance used when matching detected centerlines against ground truth.
enum class DistanceMetric { euclidean, chebyshev };

/// bit set iff resp(x,y) >= t; t must lie in (0, 1].
BinaryMask threshold_map(const GrayImage& resp, double t);

/// The evaluation threshold grid {0.01, 0.02, ..., 1.00}.
std::vector<double> threshold_grid();

/// Squared Euclidean distance to the nearest set pixel (exact two-pass
/// transform). Unset-everywhere masks give "infinite" (a value larger than
/// any image distance).
std::vector<double> squared_distance_transform(const BinaryMask& mask);

/// Chebyshev (chessboard) distance to the nearest set pixel.
std::vector<int> chebyshev_distance_transform(const BinaryMask& mask);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

/// Tolerance-based centerline scores: a detected pixel counts as a true
/// positive when some ground-truth pixel lies within d_star, and vice versa
/// for recall. Both masks empty scores 1 everywhere; one empty scores 0.
Prf centerline_prf(const BinaryMask& det, const BinaryMask& gt, double d_star,
                   DistanceMetric metric = DistanceMetric::euclidean);

struct SweepResult {
    double t_star = 0.0;
    double avg_precision = 0.0;
    double avg_recall = 0.0;
    double avg_f = 0.0;
    std::vector<Prf> per_image;            // at t_star, in input order
    std::vector<std::array<double, 4>> curve; // t, avg Pr, avg Re, avg F per grid point
};

/// Evaluate every grid threshold over the image set and keep the one with the
/// highest average F; ties break toward the smaller threshold. Responses must
/// be normalized to [0, 1].
SweepResult sweep_thresholds(const std::vector<const GrayImage*>& responses,
                             const std::vector<const BinaryMask*>& gts, double d_star,
                             DistanceMetric metric = DistanceMetric::euclidean);

/// Matthews correlation coefficient, counting restricted to fov when given.
/// Returns 0 when any confusion-matrix denominator factor is zero.
double mcc(const BinaryMask& pred, const BinaryMask& gt,
           const BinaryMask* fov = nullptr);

/// Connectivity / Area / Length agreement and their product.
struct CalResult {
    double c = 0.0;
    double a = 0.0;
    double l = 0.0;
    double cal = 0.0;
};

/// Disk dilation and skeleton radii follow the standard (2, 2) defaults.
CalResult cal(const BinaryMask& pred, const BinaryMask& gt, double alpha = 2.0,
              double beta = 2.0);

/// Number of 8-connected components.
int count_components(const BinaryMask& mask);

/// Morphological dilation by a Euclidean disk of the given radius.
BinaryMask dilate_disk(const BinaryMask& mask, double radius);

/// Zhang-Suen iterative thinning to a 1-pixel-wide skeleton. Idempotent.
BinaryMask skeletonize(const BinaryMask& mask);

/// Two-sided Wilcoxon signed-rank p-value for paired samples: exact
/// distribution up to n = 25 nonzero differences, normal approximation with
/// continuity correction beyond. All-zero differences give p = 1.
double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

/// Threshold sweep maximizing the dataset-average CAL; predictions are
/// intersected with the fov mask when one is supplied (entries may be null).
struct CalSweep {
    double t_star = 0.0;
    CalResult averages;
    std::vector<CalResult> per_image;
    std::vector<std::array<double, 2>> curve; // t, avg CAL
};
CalSweep sweep_cal(const std::vector<const GrayImage*>& responses,
                   const std::vector<const BinaryMask*>& gts,
                   const std::vector<const BinaryMask*>& fovs = {});

/// Threshold sweep maximizing the dataset-average MCC.
struct MccSweep {
    double t_star = 0.0;
    double avg_mcc = 0.0;
    std::vector<double> per_image;
    std::vector<std::array<double, 2>> curve; // t, avg MCC
};
MccSweep sweep_mcc(const std::vector<const GrayImage*>& responses,
                   const std::vector<const BinaryMask*>& gts,
                   const std::vector<const BinaryMask*>& fovs = {});

} // namespace rustico

#endif
