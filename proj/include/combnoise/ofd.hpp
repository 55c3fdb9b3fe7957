#pragma once

#include <string>
#include <vector>

#include "combnoise/envelope.hpp"
#include "combnoise/noise_report.hpp"
#include "combnoise/states.hpp"

namespace combnoise::ofd {

// support_only: estimator sums run over the envelope's own index range.
// extended: also the empty neighbours n_min-1 and n_max+1, whose vacuum
// beats against the edge lines.
enum class SumPolicy { support_only, extended };

std::string to_string(SumPolicy policy);
SumPolicy parse_sum_policy(const std::string& name);

// Linearized microwave amplitude/phase estimators of an in-phase comb:
//   dA   = sum_n amp_weights[n]   dq_n
//   dphi = sum_n phase_weights[n] dp_n
struct OfdWeights {
    int n_min = 0; // first index of the weight arrays
    std::vector<double> amp_weights;
    std::vector<double> phase_weights;
    double beat_amp = 0.0;   // |S| = sum alpha_{n-1} alpha_n
    double beat_phase = 0.0; // phi_0
    SumPolicy policy = SumPolicy::support_only;

    int n_max() const { return n_min + static_cast<int>(phase_weights.size()) - 1; }
    double amp_weight(int n) const;
    double phase_weight(int n) const;
};

OfdWeights ofd_weights(const CombEnvelope& env, SumPolicy policy = SumPolicy::support_only);

// Index range the estimator sums run over for a policy.
std::pair<int, int> summation_range(const CombEnvelope& env, SumPolicy policy);

NoiseReport phase_noise_psd(const CombEnvelope& env, const QuantumSpec& spec,
                            SumPolicy policy = SumPolicy::support_only);
NoiseReport amplitude_noise_psd(const CombEnvelope& env, const QuantumSpec& spec,
                                SumPolicy policy = SumPolicy::support_only);

// Two-line CW heterodyne benchmark at the envelope's total flux, through the
// same phase-noise path.
NoiseReport cw_benchmark(double total_flux, CombGrid grid = {});

// R = phase PSD / CW benchmark PSD.
double suppression_ratio(const CombEnvelope& env, const QuantumSpec& spec,
                         SumPolicy policy = SumPolicy::support_only);

// Enhanced over vacuum phase PSD for the same envelope, in (0, 1].
double eta_enhancement(const CombEnvelope& env, const QuantumSpec& spec,
                       SumPolicy policy = SumPolicy::support_only);

// In-phase/quadrature coefficients of a comb with arbitrary line phases,
// in the lab frame where dq_n, dp_n are referenced to the carrier e^{-i w_n t}.
struct GeneralWeights {
    int n_min = 0;
    std::vector<double> amp_q, amp_p;     // dA   = sum amp_q dq + amp_p dp
    std::vector<double> phase_q, phase_p; // dphi = sum phase_q dq + phase_p dp
    double beat_amp = 0.0;
    double beat_phase = 0.0;

    int n_max() const { return n_min + static_cast<int>(phase_q.size()) - 1; }
};

GeneralWeights general_phase_estimator_weights(const PhasedEnvelope& env,
                                               SumPolicy policy = SumPolicy::support_only);

// Vacuum-normalized phase PSD of a phased comb; the lab-frame state is the
// one described by spec (intra / vacuum only).
double general_phase_noise_psd(const PhasedEnvelope& env, const QuantumSpec& spec,
                               SumPolicy policy = SumPolicy::support_only);

// Amplitude transfer from an optical reference phase to the microwave phase
// when every line tracks the reference with dphi_n = (1 + n/N0) dphi_ref.
double classical_transfer(const CombEnvelope& env, int n0);

// PSD suppression of reference phase noise, (Omega_r / omega_0)^2.
double classical_psd_suppression(const CombEnvelope& env);

struct SweepPoint {
    Shape shape = Shape::gaussian;
    double param = 0.0;
    double m_rms = 0.0;
    double ratio = 0.0; // R
    double eta = 1.0;
    SumPolicy policy = SumPolicy::support_only;
};

struct SweepRequest {
    std::vector<Shape> shapes{Shape::gaussian, Shape::sech, Shape::flattop};
    double m_rms_min = 10.0;
    double m_rms_max = 100.0;
    int points = 25; // log-spaced
    double total_flux = 1.0;
    QuantumSpec spec;
    SumPolicy policy = SumPolicy::support_only;
    unsigned threads = 1;
};

// Rows are ordered shape-major, then by grid point.
std::vector<SweepPoint> ratio_sweep(const SweepRequest& request);

// Least-squares slope of log R against log M_rms for one shape's rows.
double loglog_slope(const std::vector<SweepPoint>& rows, Shape shape);

} // namespace combnoise::ofd
