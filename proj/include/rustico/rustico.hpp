#ifndef RUSTICO_RUSTICO_HPP
#define RUSTICO_RUSTICO_HPP

#include <string>
#include <vector>

#include "rustico/cosfire.hpp"

namespace rustico {

/// Push-pull operator: an excitatory filter B paired with the inhibitory
/// filter derived from it by flipping polarity and scaling sigma by lambda.
/// xi weighs the inhibitory response; orientations is the offset set Psi.
/// The inhibitor is always re-derived from (excitatory, lambda), never stored
/// independently, so the pairing cannot drift.
struct RusticoOperator {
    CosfireFilter excitatory;
    CosfireFilter inhibitory;
    double lambda = 1.0;
    double xi = 0.0;
    std::vector<double> orientations;
};

/// Polarity flipped, sigma scaled by lambda; rho, phi and the blur
/// hyperparameters are untouched.
CosfireFilter derive_inhibitor(const CosfireFilter& excitatory, double lambda);

/// Builds a validated operator; orientations defaults to 12 offsets over
/// [0, pi) when empty.
RusticoOperator make_operator(const CosfireFilter& excitatory, double lambda, double xi,
                              std::vector<double> orientations = {});

/// Single-orientation push-pull response at offset psi:
/// relu(excitatory response - xi * inhibitory response).
GrayImage rustico_response(const RusticoOperator& op, double psi, FeatureBank& bank);
GrayImage rustico_response(const RusticoOperator& op, double psi, const GrayImage& img);

/// Maximum superposition over all orientation offsets. Raw (unnormalized)
/// map; divide by the global maximum before thresholding.
GrayImage multi_orientation_response(const RusticoOperator& op, const GrayImage& img,
                                     int jobs = 0);

/// Serialized form: the excitatory filter plus {lambda, xi, psi_count}; the
/// inhibitor is re-derived on load.
std::string operator_to_json(const RusticoOperator& op);
RusticoOperator operator_from_json(const std::string& text);

/// Worker count actually used for a requested value: positive requests win,
/// then the RUSTICO_JOBS environment variable, then hardware concurrency.
int effective_jobs(int requested);

} // namespace rustico

#endif
