#ifndef RUSTICO_RUN_CONFIG_HPP
#define RUSTICO_RUN_CONFIG_HPP

#include <string>
#include <vector>

#include "rustico/datasets.hpp"
#include "rustico/metrics.hpp"

namespace rustico {

/// Everything a reproducible run needs, loaded from one JSON file.
struct RunConfig {
    struct Operator {
        double sigma = 2.5;       // DoG standard deviation of every tuple
        double rho_max = 16.0;    // outermost circle radius
        double rho_step = 2.0;    // circle spacing
        double sigma0 = 3.0;      // blur offset
        double alpha = 0.1;       // blur slope
        double lambda = 1.0;      // inhibitor size factor
        double xi = 0.0;          // inhibition strength; 0 = plain COSFIRE
        int orientations = 12;
        int polarity = +1;
        double fraction = 0.2;       // keypoint threshold, fraction of max response
        int prototype_width = 3;     // bar thickness used for configuration
    } op;

    struct Dataset {
        std::string layout = "tb_roses_1";
        std::string root;
        std::string channel = "luminance";
        bool invert = false;
    } dataset;

    struct Evaluation {
        std::string metric_set = "prf"; // "prf" or "cal_mcc"
        double d_star = 3.0;
        int threshold_grid = 100;
        std::string distance = "euclidean"; // or "chebyshev"
    } eval;

    std::string output = "out";

    std::vector<double> radii() const; // {0, rho_step, ..., rho_max}
};

void validate(const RunConfig& cfg);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

} // namespace rustico

#endif
