#include <cmath>
#include <complex>

#include "combnoise/errors.hpp"
#include "combnoise/oracle.hpp"

namespace combnoise::oracle {

namespace {

std::complex<double> line_amplitude(const PhasedEnvelope& env, int n)
{
    return std::polar(env.base.amp(n), env.theta(n));
}

PhasedEnvelope in_phase(const CombEnvelope& env)
{
    return with_phases(env, std::vector<double>(env.amps.size(), 0.0));
}

} // namespace

EstimatorVectors ofd_estimators(const PhasedEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy)
{
    const CombEnvelope& base = env.base;
    std::complex<double> beat{0.0, 0.0};
    for (int n = base.n_min - 1; n <= base.n_max + 1; ++n) {
        beat += std::conj(line_amplitude(env, n - 1)) * line_amplitude(env, n);
    }
    if (std::abs(beat) == 0.0) {
        throw DomainError("oracle: no beatnote");
    }
    const std::complex<double> norm = std::conj(beat) / (std::abs(beat) * std::abs(beat)); // e^{-i phi0}/|S|

    const int lo = policy == ofd::SumPolicy::support_only ? base.n_min : base.n_min - 1;
    const int hi = policy == ofd::SumPolicy::support_only ? base.n_max : base.n_max + 1;

    EstimatorVectors out{build_covariance(lo, hi, spec), {}, {}};
    out.amplitude.assign(static_cast<std::size_t>(out.cov.dimension()), 0.0);
    out.phase.assign(out.amplitude.size(), 0.0);
    const double r2 = 1.0 / std::sqrt(2.0);
    for (int n = lo; n <= hi; ++n) {
        // X = c da_n + d da_n^dag with da = (q + i p)/sqrt(2)
        const std::complex<double> c = norm * std::conj(line_amplitude(env, n - 1));
        const std::complex<double> d = norm * line_amplitude(env, n + 1);
        const auto q = static_cast<std::size_t>(out.cov.q_index(n));
        const auto p = static_cast<std::size_t>(out.cov.p_index(n));
        // Hermitian part -> amplitude, anti-Hermitian part / i -> phase.
        out.amplitude[q] = r2 * (c + d).real();
        out.amplitude[p] = -r2 * (c - d).imag();
        out.phase[q] = r2 * (c + d).imag();
        out.phase[p] = r2 * (c - d).real();
    }
    return out;
}

double ofd_phase_psd(const CombEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy)
{
    const auto e = ofd_estimators(in_phase(env), spec, policy);
    return quadratic_form_variance(e.cov, e.phase);
}

double ofd_amplitude_psd(const CombEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy)
{
    const auto e = ofd_estimators(in_phase(env), spec, policy);
    return quadratic_form_variance(e.cov, e.amplitude);
}

double ofd_general_phase_psd(const PhasedEnvelope& env, const QuantumSpec& spec, ofd::SumPolicy policy)
{
    const auto e = ofd_estimators(env, spec, policy);
    return quadratic_form_variance(e.cov, e.phase);
}

double ofd_classical_transfer(const CombEnvelope& env, int n0)
{
    long double beat = 0.0L;
    for (int n = env.n_min; n <= env.n_max + 1; ++n) {
        beat += static_cast<long double>(env.amp(n - 1)) * env.amp(n);
    }
    long double acc = 0.0L;
    for (int n = env.n_min; n <= env.n_max; ++n) {
        const long double w = (static_cast<long double>(env.amp(n - 1)) - env.amp(n + 1)) / beat;
        const long double dp = static_cast<long double>(env.amp(n)) * (1.0L + static_cast<long double>(n) / n0);
        acc += w * dp; // (1/sqrt2) * sqrt2 cancel
    }
    return static_cast<double>(acc);
}

} // namespace combnoise::oracle
