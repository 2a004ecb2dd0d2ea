#include "rustico/rustico.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rustico/errors.hpp"
#include "parallel.hpp"

namespace rustico {

CosfireFilter derive_inhibitor(const CosfireFilter& excitatory, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("derive_inhibitor: lambda must be positive");
    CosfireFilter inh = excitatory;
    for (Tuple4& t : inh.tuples) {
        t.delta = -t.delta;
        t.sigma = lambda * t.sigma;
    }
    sort_tuples(inh.tuples);
    validate(inh);
    return inh;
}

RusticoOperator make_operator(const CosfireFilter& excitatory, double lambda, double xi,
                              std::vector<double> orientations) {
    validate(excitatory);
    if (!(lambda > 0.0))
        throw std::invalid_argument("RusticoOperator: lambda must be positive");
    if (xi < 0.0)
        throw std::invalid_argument("RusticoOperator: xi must be >= 0");
    if (orientations.empty())
        orientations = orientation_set(12);
    for (double psi : orientations)
        if (psi < 0.0 || psi >= std::numbers::pi)
            throw std::invalid_argument("RusticoOperator: orientation offsets must lie in [0, pi)");
    for (std::size_t i = 1; i < orientations.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (orientations[i] == orientations[j])
                throw std::invalid_argument("RusticoOperator: duplicate orientation offset");

    RusticoOperator op;
    op.excitatory = excitatory;
    op.inhibitory = derive_inhibitor(excitatory, lambda);
    op.lambda = lambda;
    op.xi = xi;
    op.orientations = std::move(orientations);
    return op;
}

GrayImage rustico_response(const RusticoOperator& op, double psi, FeatureBank& bank) {
    GrayImage exc = response(rotate_filter(op.excitatory, psi), bank);
    if (op.xi == 0.0) {
        // relu(r - 0*r_inh) == r for the nonnegative excitatory map
        return exc;
    }
    const GrayImage inh = response(rotate_filter(op.inhibitory, psi), bank);
    for (std::size_t i = 0; i < exc.size(); ++i) {
        const double v = exc.data[i] - op.xi * inh.data[i];
        exc.data[i] = v > 0.0 ? v : 0.0;
    }
    return exc;
}

GrayImage rustico_response(const RusticoOperator& op, double psi, const GrayImage& img) {
    FeatureBank bank(img);
    return rustico_response(op, psi, bank);
}

GrayImage multi_orientation_response(const RusticoOperator& op, const GrayImage& img,
                                     int jobs) {
    if (op.orientations.empty())
        throw std::invalid_argument("multi_orientation_response: empty orientation set");
    FeatureBank bank(img);
    bank.prepare(op.excitatory, jobs);
    if (op.xi != 0.0)
        bank.prepare(op.inhibitory, jobs);
    std::vector<GrayImage> maps(op.orientations.size());
    detail::parallel_for(op.orientations.size(), jobs, [&](std::size_t i) {
        maps[i] = rustico_response(op, op.orientations[i], bank);
    });
    GrayImage out = std::move(maps.front());
    for (std::size_t i = 1; i < maps.size(); ++i)
        for (std::size_t p = 0; p < out.size(); ++p)
            out.data[p] = std::max(out.data[p], maps[i].data[p]);
    return out;
}

std::string operator_to_json(const RusticoOperator& op) {
    nlohmann::json j = nlohmann::json::parse(filter_to_json(op.excitatory));
    j["lambda"] = op.lambda;
    j["xi"] = op.xi;
    j["psi_count"] = op.orientations.size();
    return j.dump(2) + "\n";
}

int effective_jobs(int requested) {
    return detail::resolve_jobs(requested);
}

RusticoOperator operator_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("operator JSON parse error: ") + e.what());
    }
    double lambda = 1.0, xi = 0.0;
    int psi_count = 12;
    try {
        lambda = j.at("lambda").get<double>();
        xi = j.at("xi").get<double>();
        psi_count = j.at("psi_count").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("operator JSON missing field: ") + e.what());
    }
    const CosfireFilter exc = filter_from_json(text);
    return make_operator(exc, lambda, xi, orientation_set(psi_count));
}

} // namespace rustico
