#pragma once

#include <cstdint>
#include <vector>

#include "combnoise/dcs.hpp"

namespace combnoise::stochastic {

struct TraceConfig {
    double sample_rate = 1e6; // Hz
    double duration = 1.0;    // s
    std::uint64_t seed = 0;
    double rbw = 100.0; // Hz
    unsigned threads = 1;

    std::size_t samples() const;
};

// Throws DomainError if the beat notes alias or the record is shorter than 1/rbw.
void validate(const TraceConfig& cfg, const dcs::DcsSetup& setup);

// Analytic mean and variance of the balanced photocurrent at each time.
// variance is normalized by the setup's vacuum PSD and mean by
// 2 q_e sum sqrt(kappa_n) alpha_S alpha_L; the raw scales are kept alongside.
struct VarianceTrace {
    std::vector<double> times;    // s
    std::vector<double> variance; // normalized
    std::vector<double> mean;     // normalized
    double variance_scale = 0.0;  // A^2/Hz per unit
    double mean_scale = 0.0;      // A per unit
};

VarianceTrace variance_trace(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample,
                             const std::vector<double>& times);

// Photocurrent fluctuations sampled at t_k = k / f_s, in units of
// sqrt(vacuum PSD). Each sample has variance f_s * normalized trace(t_k).
struct PhotocurrentSeries {
    double sample_rate = 0.0;
    std::vector<double> values;
    double scale = 0.0; // A*sqrt(s) per unit
};

PhotocurrentSeries sample_photocurrent(const dcs::DcsSetup& setup, const QuantumSpec& spec,
                                       const dcs::SampleResponse& sample, const TraceConfig& cfg);

// Bartlett estimate (rectangular window, no overlap) of the two-sided PSD
// with segment length f_s / rbw, bins 0 .. f_s/2.
struct PsdEstimate {
    std::vector<double> freq; // Hz
    std::vector<double> psd;
    std::vector<double> ci_lo; // 95 % confidence interval
    std::vector<double> ci_hi;
    std::size_t segments = 0;
    double rbw = 0.0;
};

PsdEstimate estimate_psd(const std::vector<double>& series, double sample_rate, double rbw);

// Time-averaged sample variance of a series against its analytic trace.
struct McComparison {
    double sample_variance = 0.0;   // normalized, mean of x_k^2 / f_s
    double analytic_variance = 0.0; // mean of the analytic trace on the same grid
    double standard_error = 0.0;
    double z_score = 0.0;
};

McComparison compare_to_trace(const PhotocurrentSeries& series, const VarianceTrace& trace);

// Uniform time grid t_k = k / f_s, k < count.
std::vector<double> time_grid(double sample_rate, std::size_t count);

// Parameters of the cyclostationary simulation: 1550 nm, 10 mW, 101 lines,
// Gaussian |alpha_n| ~ exp(-n^2 / 2 sigma^2) with sigma = 50/3, self-referred
// amplitude squeezing, strong LO, 1 MHz sampling, 100 Hz RBW.
struct CycloPreset {
    dcs::DcsSetup setup;
    std::vector<double> gains{1.0, 5.0, 10.0};
    TraceConfig trace;
    double trace_duration = 2e-3; // s, span of the analytic trace
};

CycloPreset cyclo_preset();
QuantumSpec cyclo_spec(double gain);

} // namespace combnoise::stochastic
