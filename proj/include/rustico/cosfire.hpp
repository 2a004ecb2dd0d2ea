#ifndef RUSTICO_COSFIRE_HPP
#define RUSTICO_COSFIRE_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rustico/dog.hpp"
#include "rustico/image.hpp"

namespace rustico {

/// One afferent contribution: which DoG to use (delta, sigma) and the polar
/// offset (rho, phi) at which its evidence is collected relative to the
/// filter center. phi is kept normalized into [0, 2pi).
struct Tuple4 {
    int delta = +1;
    double sigma = 1.0;
    double rho = 0.0;
    double phi = 0.0;
};

/// Bar-selective COSFIRE filter: tuple set plus the blur hyperparameters.
/// Tuple i is blurred with sigma' = sigma0 + alpha*rho_i before shifting.
struct CosfireFilter {
    std::vector<Tuple4> tuples;
    double sigma0 = 1.0;
    double alpha = 0.0;

    std::size_t size() const { return tuples.size(); }
    double blur_sigma(const Tuple4& t) const { return sigma0 + alpha * t.rho; }
};

/// Throws std::invalid_argument when the tuple set is empty or any
/// sigma' = sigma0 + alpha*rho is not positive.
void validate(const CosfireFilter& f);

/// Normalize an angle into [0, 2pi).
double wrap_angle(double phi);

/// Canonical tuple order (by rho, then phi, then delta, then sigma) so that
/// serialized filters are byte-stable.
void sort_tuples(std::vector<Tuple4>& tuples);

/// Synthetic prototype: dark square canvas with a bright centered horizontal
/// bar of the given length and width. Canvas must be odd so a center pixel
/// exists.
GrayImage render_bar_prototype(int length, int width, int canvas);

/// Keypoint detection settings for configure(). Defaults recover exactly the
/// {0, pi} keypoints of an ideal bar.
struct ConfigureParams {
    int circle_samples = 360;       // equiangular positions per circle
    double merge_window = 1.0 / 16; // turns; closer maxima collapse to the strongest
    double sigma0 = 1.0;
    double alpha = 0.0;
};

/// Automatic configuration on a prototype image with a defined center pixel:
/// computes the rectified DoG response, samples it on concentric circles
/// (bilinear interpolation) and emits one tuple per angular local maximum
/// above fraction * global max. Throws ConfigureError when nothing is found.
CosfireFilter configure(const GrayImage& prototype, const DoGSpec& spec,
                        const std::vector<double>& radii, double fraction,
                        const ConfigureParams& params = {});

/// Orientation offset: every phi_i becomes (phi_i + psi) mod 2pi, everything
/// else untouched. Result is re-sorted into canonical order.
CosfireFilter rotate_filter(const CosfireFilter& f, double psi);

/// Per-image cache of DoG response maps and their blurred variants, shared by
/// every tuple and every rotated filter applied to the same image. Each
/// distinct (delta, sigma) map and (delta, sigma, sigma') blur is computed
/// once; counters expose that for tests. prepare() precomputes all maps a
/// filter needs so later lookups are read-only and thread-safe.
class FeatureBank {
public:
    explicit FeatureBank(const GrayImage& img) : img_(&img) {}

    const GrayImage& image() const { return *img_; }

    const GrayImage& dog(const DoGSpec& spec);
    const GrayImage& blurred(const DoGSpec& spec, double blur_sigma);

    void prepare(const CosfireFilter& f, int jobs = 1);

    std::size_t dog_computations() const { return dog_count_; }
    std::size_t blur_computations() const { return blur_count_; }

private:
    struct BlurKey {
        DogKey dog;
        std::int64_t blur_micro;
        bool operator<(const BlurKey& o) const {
            if (!(dog == o.dog)) return dog < o.dog;
            return blur_micro < o.blur_micro;
        }
    };

    const GrayImage* img_;
    std::map<DogKey, GrayImage> dog_maps_;
    std::map<BlurKey, GrayImage> blur_maps_;
    std::size_t dog_count_ = 0;
    std::size_t blur_count_ = 0;
};

/// B-COSFIRE response: geometric mean over tuples of the blurred, shifted DoG
/// feature maps. Zero wherever any feature map is zero; the mean is taken in
/// log space and values below 1e-12 are clamped to zero.
GrayImage response(const CosfireFilter& f, FeatureBank& bank);
GrayImage response(const CosfireFilter& f, const GrayImage& img);

/// Maximum superposition of responses of the filter rotated by each offset.
GrayImage multi_orientation_response(const CosfireFilter& f,
                                     const std::vector<double>& orientations,
                                     const GrayImage& img, int jobs = 0);

/// Evenly spaced orientation offsets {k*pi/n : k = 0..n-1}. Line filters are
/// symmetric under pi, so [0, pi) covers the full circle.
std::vector<double> orientation_set(int n);

/// JSON round trip: {"sigma0":..., "alpha":..., "tuples":[{"delta":...,
/// "sigma":..., "rho":..., "phi":...}, ...]}. phi is stored with 9
/// significant digits.
std::string filter_to_json(const CosfireFilter& f);
CosfireFilter filter_from_json(const std::string& text);
void save_filter(const CosfireFilter& f, const std::string& path);
CosfireFilter load_filter(const std::string& path);

} // namespace rustico

#endif
