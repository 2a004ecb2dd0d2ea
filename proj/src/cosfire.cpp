#include "rustico/cosfire.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rustico/errors.hpp"
#include "parallel.hpp"

namespace rustico {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kResponseFloor = 1e-12;

double bilinear(const GrayImage& img, double px, double py) {
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0;
    const double fy = py - y0;
    auto sample = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height)
            return 0.0;
        return img.at(x, y);
    };
    return (1.0 - fy) * ((1.0 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0)) +
           fy * ((1.0 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1));
}

double round_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::strtod(buf, nullptr);
}

} // namespace

double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    // fmod can land exactly on 2pi after the correction when phi is a tiny
    // negative value
    if (w >= kTwoPi)
        w = 0.0;
    return w;
}

void validate(const CosfireFilter& f) {
    if (f.tuples.empty())
        throw std::invalid_argument("CosfireFilter: empty tuple set");
    for (const Tuple4& t : f.tuples) {
        if (t.delta != +1 && t.delta != -1)
            throw std::invalid_argument("CosfireFilter: tuple delta must be +1 or -1");
        if (!(t.sigma > 0.0))
            throw std::invalid_argument("CosfireFilter: tuple sigma must be positive");
        if (t.rho < 0.0)
            throw std::invalid_argument("CosfireFilter: tuple rho must be >= 0");
        if (!(f.blur_sigma(t) > 0.0))
            throw std::invalid_argument("CosfireFilter: sigma0 + alpha*rho must be positive");
    }
}

void sort_tuples(std::vector<Tuple4>& tuples) {
    std::sort(tuples.begin(), tuples.end(), [](const Tuple4& a, const Tuple4& b) {
        if (a.rho != b.rho) return a.rho < b.rho;
        if (a.phi != b.phi) return a.phi < b.phi;
        if (a.delta != b.delta) return a.delta < b.delta;
        return a.sigma < b.sigma;
    });
}

GrayImage render_bar_prototype(int length, int width, int canvas) {
    if (canvas % 2 == 0)
        throw std::invalid_argument("render_bar_prototype: canvas must be odd");
    if (!(width < length && length <= canvas))
        throw std::invalid_argument("render_bar_prototype: need width < length <= canvas");
    if (width < 1)
        throw std::invalid_argument("render_bar_prototype: width must be >= 1");
    GrayImage img(canvas, canvas, 0.0);
    const int c = canvas / 2;
    const int x0 = c - (length - 1) / 2;
    const int y0 = c - (width - 1) / 2;
    for (int y = y0; y < y0 + width; ++y)
        for (int x = x0; x < x0 + length; ++x)
            img.at(x, y) = 1.0;
    return img;
}

CosfireFilter configure(const GrayImage& prototype, const DoGSpec& spec,
                        const std::vector<double>& radii, double fraction,
                        const ConfigureParams& params) {
    if (prototype.empty() || prototype.width % 2 == 0 || prototype.height % 2 == 0)
        throw std::invalid_argument("configure: prototype needs odd dimensions");
    if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()))
        throw std::invalid_argument("configure: radii must be nonempty and ascending");
    if (radii.front() < 0.0)
        throw std::invalid_argument("configure: radii must be >= 0");
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("configure: fraction must be in (0, 1]");
    if (params.circle_samples < 4)
        throw std::invalid_argument("configure: need at least 4 circle samples");

    const GrayImage resp = dog_response(prototype, spec);
    double global_max = 0.0;
    for (double v : resp.data)
        global_max = std::max(global_max, v);
    if (!(global_max > 0.0))
        throw ConfigureError("configure: prototype produced no DoG response");

    const double threshold = fraction * global_max;
    const int cx = prototype.width / 2;
    const int cy = prototype.height / 2;

    CosfireFilter f;
    f.sigma0 = params.sigma0;
    f.alpha = params.alpha;

    const int n = params.circle_samples;
    std::vector<double> values(n);
    for (double rho : radii) {
        if (rho == 0.0) {
            if (resp.at(cx, cy) > threshold)
                f.tuples.push_back({spec.delta, spec.sigma, 0.0, 0.0});
            continue;
        }
        // sample the response on the circle; angles follow the mathematical
        // convention (counterclockwise, y up), so the pixel row is cy - rho*sin
        for (int k = 0; k < n; ++k) {
            const double theta = kTwoPi * k / n;
            values[k] = bilinear(resp, cx + rho * std::cos(theta), cy - rho * std::sin(theta));
        }
        // circular local maxima above threshold
        std::vector<int> candidates;
        for (int k = 0; k < n; ++k) {
            const double v = values[k];
            if (v <= threshold)
                continue;
            if (v >= values[(k + n - 1) % n] && v >= values[(k + 1) % n])
                candidates.push_back(k);
        }
        // strongest first; drop maxima closer than merge_window turns to a keeper
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](int a, int b) { return values[a] > values[b]; });
        const double window = params.merge_window * kTwoPi;
        std::vector<int> kept;
        for (int k : candidates) {
            bool merged = false;
            for (int j : kept) {
                double d = std::fabs(kTwoPi * (k - j) / n);
                d = std::min(d, kTwoPi - d);
                if (d < window) {
                    merged = true;
                    break;
                }
            }
            if (!merged)
                kept.push_back(k);
        }
        for (int k : kept)
            f.tuples.push_back({spec.delta, spec.sigma, rho, wrap_angle(kTwoPi * k / n)});
    }

    if (f.tuples.empty())
        throw ConfigureError("configure: no keypoint above threshold on any circle");
    sort_tuples(f.tuples);
    validate(f);
    return f;
}

CosfireFilter rotate_filter(const CosfireFilter& f, double psi) {
    CosfireFilter out = f;
    for (Tuple4& t : out.tuples)
        t.phi = wrap_angle(t.phi + psi);
    sort_tuples(out.tuples);
    return out;
}

const GrayImage& FeatureBank::dog(const DoGSpec& spec) {
    const DogKey key = dog_key(spec);
    auto it = dog_maps_.find(key);
    if (it == dog_maps_.end()) {
        it = dog_maps_.emplace(key, dog_response(*img_, spec)).first;
        ++dog_count_;
    }
    return it->second;
}

const GrayImage& FeatureBank::blurred(const DoGSpec& spec, double blur_sigma) {
    const BlurKey key{dog_key(spec), static_cast<std::int64_t>(std::llround(blur_sigma * 1e6))};
    auto it = blur_maps_.find(key);
    if (it == blur_maps_.end()) {
        it = blur_maps_.emplace(key, gaussian_blur(dog(spec), blur_sigma)).first;
        ++blur_count_;
    }
    return it->second;
}

void FeatureBank::prepare(const CosfireFilter& f, int jobs) {
    validate(f);
    // distinct blur tasks, keyed the same way the lookups will be
    struct Task {
        DoGSpec spec;
        double blur_sigma;
    };
    std::map<BlurKey, Task> tasks;
    for (const Tuple4& t : f.tuples) {
        const DoGSpec spec{t.delta, t.sigma};
        const double bs = f.blur_sigma(t);
        const BlurKey key{dog_key(spec), static_cast<std::int64_t>(std::llround(bs * 1e6))};
        if (blur_maps_.count(key) == 0)
            tasks.emplace(key, Task{spec, bs});
    }
    // DoG maps first (few of them, typically one), then blurs in parallel
    for (const auto& [key, task] : tasks)
        dog(task.spec);
    std::vector<std::pair<BlurKey, Task>> todo(tasks.begin(), tasks.end());
    std::vector<GrayImage> results(todo.size());
    detail::parallel_for(todo.size(), jobs, [&](std::size_t i) {
        results[i] = gaussian_blur(dog_maps_.at(todo[i].first.dog), todo[i].second.blur_sigma);
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
        blur_maps_.emplace(todo[i].first, std::move(results[i]));
        ++blur_count_;
    }
}

GrayImage response(const CosfireFilter& f, FeatureBank& bank) {
    validate(f);
    const GrayImage& img = bank.image();
    const int w = img.width;
    const int h = img.height;
    const std::size_t npix = img.size();
    const std::size_t n = f.tuples.size();

    // n == 1 degenerates to the single shifted feature map, returned exactly
    if (n == 1) {
        const Tuple4& t = f.tuples.front();
        const GrayImage& b = bank.blurred({t.delta, t.sigma}, f.blur_sigma(t));
        return shift(b, t.rho, std::numbers::pi - t.phi);
    }

    std::vector<double> logsum(npix, 0.0);
    std::vector<unsigned char> zero(npix, 0);
    for (const Tuple4& t : f.tuples) {
        const GrayImage& b = bank.blurred({t.delta, t.sigma}, f.blur_sigma(t));
        const double angle = std::numbers::pi - t.phi;
        const int dx = static_cast<int>(std::lround(t.rho * std::cos(angle)));
        const int dy = static_cast<int>(std::lround(t.rho * std::sin(angle)));
        for (int y = 0; y < h; ++y) {
            double* ls = logsum.data() + static_cast<std::size_t>(y) * w;
            unsigned char* zf = zero.data() + static_cast<std::size_t>(y) * w;
            const int sy = y - dy;
            if (sy < 0 || sy >= h) {
                std::fill(zf, zf + w, static_cast<unsigned char>(1));
                continue;
            }
            const double* src = b.row(sy);
            for (int x = 0; x < w; ++x) {
                const int sx = x - dx;
                const double v = (sx >= 0 && sx < w) ? src[sx] : 0.0;
                if (v > 0.0)
                    ls[x] += std::log(v);
                else
                    zf[x] = 1;
            }
        }
    }

    GrayImage out(w, h);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < npix; ++i) {
        if (zero[i])
            continue;
        const double v = std::exp(logsum[i] * inv_n);
        out.data[i] = v < kResponseFloor ? 0.0 : v;
    }
    return out;
}

GrayImage response(const CosfireFilter& f, const GrayImage& img) {
    FeatureBank bank(img);
    return response(f, bank);
}

GrayImage multi_orientation_response(const CosfireFilter& f,
                                     const std::vector<double>& orientations,
                                     const GrayImage& img, int jobs) {
    if (orientations.empty())
        throw std::invalid_argument("multi_orientation_response: empty orientation set");
    FeatureBank bank(img);
    bank.prepare(f, jobs);
    std::vector<GrayImage> maps(orientations.size());
    detail::parallel_for(orientations.size(), jobs, [&](std::size_t i) {
        maps[i] = response(rotate_filter(f, orientations[i]), bank);
    });
    GrayImage out = std::move(maps.front());
    for (std::size_t i = 1; i < maps.size(); ++i)
        for (std::size_t p = 0; p < out.size(); ++p)
            out.data[p] = std::max(out.data[p], maps[i].data[p]);
    return out;
}

std::vector<double> orientation_set(int n) {
    if (n < 1)
        throw std::invalid_argument("orientation_set: need n >= 1");
    std::vector<double> psis(n);
    for (int k = 0; k < n; ++k)
        psis[k] = std::numbers::pi * k / n;
    return psis;
}

std::string filter_to_json(const CosfireFilter& f) {
    nlohmann::json j;
    j["sigma0"] = f.sigma0;
    j["alpha"] = f.alpha;
    nlohmann::json arr = nlohmann::json::array();
    for (const Tuple4& t : f.tuples) {
        arr.push_back({{"delta", t.delta},
                       {"sigma", t.sigma},
                       {"rho", t.rho},
                       {"phi", round_sig9(t.phi)}});
    }
    j["tuples"] = arr;
    return j.dump(2) + "\n";
}

CosfireFilter filter_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("filter JSON parse error: ") + e.what());
    }
    CosfireFilter f;
    try {
        f.sigma0 = j.at("sigma0").get<double>();
        f.alpha = j.at("alpha").get<double>();
        for (const auto& jt : j.at("tuples")) {
            Tuple4 t;
            t.delta = jt.at("delta").get<int>();
            t.sigma = jt.at("sigma").get<double>();
            t.rho = jt.at("rho").get<double>();
            t.phi = wrap_angle(jt.at("phi").get<double>());
            f.tuples.push_back(t);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("filter JSON missing field: ") + e.what());
    }
    sort_tuples(f.tuples);
    validate(f);
    return f;
}

void save_filter(const CosfireFilter& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << filter_to_json(f);
    if (!out)
        throw IoError("write failed: " + path);
}

CosfireFilter load_filter(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return filter_from_json(ss.str());
}

} // namespace rustico
