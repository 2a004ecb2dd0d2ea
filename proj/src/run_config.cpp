#include "rustico/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rustico/errors.hpp"

namespace rustico {

std::vector<double> RunConfig::radii() const {
    std::vector<double> out;
    for (double rho = 0.0; rho <= op.rho_max + 1e-9; rho += op.rho_step)
        out.push_back(rho);
    return out;
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (!(cfg.op.sigma > 0.0)) fail("operator.sigma must be positive");
    if (cfg.op.rho_max < 0.0) fail("operator.rho_max must be >= 0");
    if (!(cfg.op.rho_step > 0.0)) fail("operator.rho_step must be positive");
    if (cfg.op.sigma0 < 0.0) fail("operator.sigma0 must be >= 0");
    if (cfg.op.alpha < 0.0) fail("operator.alpha must be >= 0");
    if (!(cfg.op.sigma0 > 0.0) && !(cfg.op.alpha > 0.0)) fail("blur sigma0 + alpha*rho must be positive");
    if (!(cfg.op.lambda > 0.0)) fail("operator.lambda must be positive");
    if (cfg.op.xi < 0.0) fail("operator.xi must be >= 0");
    if (cfg.op.orientations < 1) fail("operator.orientations must be >= 1");
    if (cfg.op.polarity != 1 && cfg.op.polarity != -1) fail("operator.polarity must be +1 or -1");
    if (!(cfg.op.fraction > 0.0 && cfg.op.fraction <= 1.0)) fail("operator.fraction must be in (0,1]");
    if (cfg.op.prototype_width < 1) fail("operator.prototype_width must be >= 1");
    layout_from_string(cfg.dataset.layout);
    channel_from_string(cfg.dataset.channel);
    if (cfg.eval.metric_set != "prf" && cfg.eval.metric_set != "cal_mcc")
        fail("evaluation.metric_set must be 'prf' or 'cal_mcc'");
    if (cfg.eval.d_star < 0.0) fail("evaluation.d_star must be >= 0");
    if (cfg.eval.threshold_grid < 1) fail("evaluation.threshold_grid must be >= 1");
    if (cfg.eval.distance != "euclidean" && cfg.eval.distance != "chebyshev")
        fail("evaluation.distance must be 'euclidean' or 'chebyshev'");
    if (cfg.output.empty()) fail("output directory must be set");
}

std::string config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["operator"] = {{"sigma", cfg.op.sigma},
                     {"rho_max", cfg.op.rho_max},
                     {"rho_step", cfg.op.rho_step},
                     {"sigma0", cfg.op.sigma0},
                     {"alpha", cfg.op.alpha},
                     {"lambda", cfg.op.lambda},
                     {"xi", cfg.op.xi},
                     {"orientations", cfg.op.orientations},
                     {"polarity", cfg.op.polarity},
                     {"fraction", cfg.op.fraction},
                     {"prototype_width", cfg.op.prototype_width}};
    j["dataset"] = {{"layout", cfg.dataset.layout},
                    {"root", cfg.dataset.root},
                    {"channel", cfg.dataset.channel},
                    {"invert", cfg.dataset.invert}};
    j["evaluation"] = {{"metric_set", cfg.eval.metric_set},
                       {"d_star", cfg.eval.d_star},
                       {"threshold_grid", cfg.eval.threshold_grid},
                       {"distance", cfg.eval.distance}};
    j["output"] = cfg.output;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("config JSON parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("operator")) {
            const auto& o = j.at("operator");
            if (o.contains("sigma")) cfg.op.sigma = o.at("sigma").get<double>();
            if (o.contains("rho_max")) cfg.op.rho_max = o.at("rho_max").get<double>();
            if (o.contains("rho_step")) cfg.op.rho_step = o.at("rho_step").get<double>();
            if (o.contains("sigma0")) cfg.op.sigma0 = o.at("sigma0").get<double>();
            if (o.contains("alpha")) cfg.op.alpha = o.at("alpha").get<double>();
            if (o.contains("lambda")) cfg.op.lambda = o.at("lambda").get<double>();
            if (o.contains("xi")) cfg.op.xi = o.at("xi").get<double>();
            if (o.contains("orientations")) cfg.op.orientations = o.at("orientations").get<int>();
            if (o.contains("polarity")) cfg.op.polarity = o.at("polarity").get<int>();
            if (o.contains("fraction")) cfg.op.fraction = o.at("fraction").get<double>();
            if (o.contains("prototype_width"))
                cfg.op.prototype_width = o.at("prototype_width").get<int>();
        }
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            if (d.contains("layout")) cfg.dataset.layout = d.at("layout").get<std::string>();
            if (d.contains("root")) cfg.dataset.root = d.at("root").get<std::string>();
            if (d.contains("channel")) cfg.dataset.channel = d.at("channel").get<std::string>();
            if (d.contains("invert")) cfg.dataset.invert = d.at("invert").get<bool>();
        }
        if (j.contains("evaluation")) {
            const auto& e = j.at("evaluation");
            if (e.contains("metric_set")) cfg.eval.metric_set = e.at("metric_set").get<std::string>();
            if (e.contains("d_star")) cfg.eval.d_star = e.at("d_star").get<double>();
            if (e.contains("threshold_grid"))
                cfg.eval.threshold_grid = e.at("threshold_grid").get<int>();
            if (e.contains("distance")) cfg.eval.distance = e.at("distance").get<std::string>();
        }
        if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("config field error: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << config_to_json(cfg);
    if (!out)
        throw IoError("write failed: " + path);
}

} // namespace rustico
