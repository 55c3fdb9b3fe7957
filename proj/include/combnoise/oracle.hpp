#pragma once

#include "combnoise/dcs.hpp"
#include "combnoise/envelope.hpp"
#include "combnoise/ofd.hpp"
#include "combnoise/states.hpp"

// Brute-force reference implementations. Every quantity is a quadratic form
// w^T Sigma w over an explicitly built covariance, with w read off the
// linearized complex beat operator. Only types are shared with the
// closed-form code.
namespace combnoise::oracle {

struct EstimatorVectors {
    CovarianceModel cov;
    std::vector<double> amplitude; // over cov's quadrature basis
    std::vector<double> phase;
};

// Linearizes e^{-i phi_0} / |S| * sum (alpha*_{n-1} da_n + alpha_{n+1} da_n^dag)
// over the policy's index range.
EstimatorVectors ofd_estimators(const PhasedEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy);

double ofd_phase_psd(const CombEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy);
double ofd_amplitude_psd(const CombEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy);
double ofd_general_phase_psd(const PhasedEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy);

// Projection of the phase estimator onto dp_n = sqrt(2) alpha_n (1 + n/N0),
// in extended precision.
double ofd_classical_transfer(const CombEnvelope& env, int n0);

// Balanced photocurrent noise over signal (comb 0), LO (comb 1) and
// sample-loss vacuum (comb 2) modes, signal covariance pushed through the
// sample map. Time-averaged for the self-referred frame. Units q_e^2 photons/s.
double dcs_psd(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample);

// Instantaneous photocurrent variance at time t, same units.
double dcs_variance_at(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample,
                       double t);

} // namespace combnoise::oracle
