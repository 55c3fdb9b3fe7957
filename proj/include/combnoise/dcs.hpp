#pragma once

#include <string>
#include <vector>

#include "combnoise/constants.hpp"
#include "combnoise/envelope.hpp"
#include "combnoise/noise_report.hpp"
#include "combnoise/states.hpp"

namespace combnoise::dcs {

// Two combs on a shared index range. Beat n sits at the RF frequency
// omega_offset + n * delta_rep.
struct DcsSetup {
    CombEnvelope signal;
    CombEnvelope lo;
    double omega_offset = constants::two_pi * 100.5e3; // rad/s
    double delta_rep = constants::two_pi * 1e3;        // rad/s
    // Drop every term carrying LO fluctuations (alpha_S^2 terms).
    bool strong_lo = true;
    double charge = constants::elementary_charge;

    double beat_omega(int n) const { return omega_offset + n * delta_rep; }
};

// Throws ContractError for mismatched ranges, DomainError for aliased tones.
void validate(const DcsSetup& setup);

struct SampleResponse {
    int n_min = 0;
    std::vector<double> kappas;
    std::vector<double> thetas;

    int n_max() const { return n_min + static_cast<int>(kappas.size()) - 1; }
    // Lines outside the stored range are transparent.
    double kappa(int n) const;
    double theta(int n) const;

    static SampleResponse transparent(int n_min, int n_max);
};

void validate(const SampleResponse& sample);

// kappa_m = 10^(-depth_db/10) on line m, transparent elsewhere.
SampleResponse localized_absorber(int n_min, int n_max, int m, double depth_db);

// Time-averaged two-sided photocurrent PSD, q_e^2 * (photons/s). The
// reference is the vacuum PSD of the same setup and sample.
NoiseReport photocurrent_psd(const DcsSetup& setup, const QuantumSpec& spec, const SampleResponse& sample);

// Vacuum PSD for the setup: q_e^2 sum (kappa_n alpha_S^2 + alpha_L^2), with
// the alpha_S^2 terms dropped under strong_lo.
double sql_psd(const DcsSetup& setup, const SampleResponse& sample);

struct TransmittanceSnr {
    double snr = 0.0;
    double var_kappa = 0.0;
    // T * delta_rep >> 2 pi and Omega_m T >> 1; false means the single-tone
    // demodulation assumption is not met.
    bool tone_orthogonal = true;
};

TransmittanceSnr transmittance_snr(const DcsSetup& setup, const SampleResponse& sample, const NoiseReport& psd,
                                   int m, double duration);

enum class Strategy { intra_cross, epr };
std::string to_string(Strategy strategy);
Strategy parse_strategy(const std::string& name);

struct AdvantagePoint {
    double depth_db = 0.0;
    Strategy strategy = Strategy::intra_cross;
    int ratio = 0; // intact lines 2N
    double g_db = 0.0;
    double advantage = 1.0;
    double advantage_db = 0.0;
};

// Flat-top combs with 2N+1 lines, uniform gain G on both combs, absorber on
// line +1, closed forms of the single-loss model. depth_db may be +inf.
double advantage_factor(int n_pairs, double depth_db, double gain, double alpha_s, double alpha_l,
                        Strategy strategy);

std::vector<AdvantagePoint> advantage_curve(int n_pairs, const std::vector<double>& depth_db, double gain,
                                            double alpha_s, double alpha_l, Strategy strategy,
                                            unsigned threads = 1);

// Flat-top DCS setup matching the single-loss model, for cross-checks.
DcsSetup flattop_setup(int n_pairs, double alpha_s, double alpha_l, bool strong_lo = false);

} // namespace combnoise::dcs
