#include "combnoise/dcs.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "combnoise/errors.hpp"

namespace combnoise::dcs {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

LineVariances comb_line(const GainProfile& gains, StateMode mode, SqueezeAxis axis, int n)
{
    return mode == StateMode::vacuum ? LineVariances{} : squeezed_line(gains.at(n), axis);
}

LineVariances signal_line(const QuantumSpec& spec, int n)
{
    auto v = comb_line(spec.gains, spec.mode, spec.axis, n);
    v.qq += spec.classical.qq(n);
    v.pp += spec.classical.pp(n);
    return v;
}

LineVariances lo_line(const QuantumSpec& spec, int n)
{
    return comb_line(spec.lo_gains, spec.mode, spec.axis, n);
}

// Cross-referred contribution of one line, in units of q_e^2.
double cross_line(const DcsSetup& setup, const QuantumSpec& spec, const SampleResponse& sample, int n)
{
    const double k = sample.kappa(n);
    const double c = std::cos(sample.theta(n));
    const double s = std::sin(sample.theta(n));
    const double as = setup.signal.amp(n);
    const double al = setup.lo.amp(n);
    const auto vs = signal_line(spec, n);
    double term = al * al * (2.0 * k * (vs.qq * c * c + vs.pp * s * s) + (1.0 - k));
    if (!setup.strong_lo) {
        term += k * as * as * 2.0 * lo_line(spec, n).qq;
    }
    return term;
}

// Time-averaged self-referred contribution of one line, in units of q_e^2.
double self_line(const DcsSetup& setup, const QuantumSpec& spec, const SampleResponse& sample, int n)
{
    const double k = sample.kappa(n);
    const double as = setup.signal.amp(n);
    const double al = setup.lo.amp(n);
    const auto vs = signal_line(spec, n);
    double term = al * al * (k * (vs.qq + vs.pp) + (1.0 - k));
    if (!setup.strong_lo) {
        const auto vl = lo_line(spec, n);
        term += k * as * as * (vl.qq + vl.pp);
    }
    return term;
}

// Two-mode squeezed pair (+n, -n) of both combs, in units of q_e^2.
double epr_pair(const DcsSetup& setup, const QuantumSpec& spec, const SampleResponse& sample, int n)
{
    const double kp = sample.kappa(n);
    const double km = sample.kappa(-n);
    const double root = std::sqrt(kp * km);
    const double as = setup.signal.amp(n);
    const double al = setup.lo.amp(n);
    const double gs = spec.gains.at(n);
    const double gl = spec.lo_gains.at(n);
    squeezed_line(gs, spec.axis);
    squeezed_line(gl, spec.axis);

    double term = al * al *
                  ((kp + km) * (gs + 1.0 / gs) -
                   2.0 * root * (gs - 1.0 / gs) * std::cos(sample.theta(n) + sample.theta(-n)) + 4.0 -
                   2.0 * (kp + km));
    if (!setup.strong_lo) {
        term += as * as * ((kp + km) * (gl + 1.0 / gl) - 2.0 * root * (gl - 1.0 / gl));
    }
    term *= 0.5;

    for (const int line : {n, -n}) {
        const double k = sample.kappa(line);
        const double c = std::cos(sample.theta(line));
        const double s = std::sin(sample.theta(line));
        term += 2.0 * al * al * k * (spec.classical.qq(line) * c * c + spec.classical.pp(line) * s * s);
    }
    return term;
}

} // namespace

void validate(const DcsSetup& setup)
{
    if (setup.signal.n_min != setup.lo.n_min || setup.signal.n_max != setup.lo.n_max) {
        throw ContractError("DcsSetup: signal and LO combs must share one index range");
    }
    if (setup.signal.size() < 1) {
        throw DomainError("DcsSetup: empty comb");
    }
    if (!(setup.delta_rep > 0.0) || !std::isfinite(setup.omega_offset)) {
        throw DomainError("DcsSetup: repetition-rate difference must be positive");
    }
    const double lowest = setup.beat_omega(setup.signal.n_min);
    const double highest = setup.beat_omega(setup.signal.n_max);
    if (!(lowest > 0.0) || !(highest < 0.5 * setup.signal.grid.omega_rep)) {
        throw DomainError("DcsSetup: RF beat notes must lie in (0, Omega_r/2)");
    }
    if (!(setup.charge > 0.0)) {
        throw DomainError("DcsSetup: charge must be positive");
    }
}

double SampleResponse::kappa(int n) const
{
    return n < n_min || n > n_max() ? 1.0 : kappas[static_cast<std::size_t>(n - n_min)];
}

double SampleResponse::theta(int n) const
{
    return n < n_min || n > n_max() ? 0.0 : thetas[static_cast<std::size_t>(n - n_min)];
}

SampleResponse SampleResponse::transparent(int n_min, int n_max)
{
    const auto size = static_cast<std::size_t>(std::max(0, n_max - n_min + 1));
    return SampleResponse{n_min, std::vector<double>(size, 1.0), std::vector<double>(size, 0.0)};
}

void validate(const SampleResponse& sample)
{
    if (sample.kappas.size() != sample.thetas.size()) {
        throw ContractError("SampleResponse: kappas and thetas differ in length");
    }
    for (std::size_t i = 0; i < sample.kappas.size(); ++i) {
        if (!(sample.kappas[i] >= 0.0 && sample.kappas[i] <= 1.0)) {
            throw DomainError("SampleResponse: transmittance must lie in [0, 1]");
        }
        if (!std::isfinite(sample.thetas[i])) {
            throw DomainError("SampleResponse: phase delays must be finite");
        }
    }
}

SampleResponse localized_absorber(int n_min, int n_max, int m, double depth_db)
{
    if (m < n_min || m > n_max) {
        throw DomainError("localized_absorber: absorbed line outside the index range");
    }
    if (!(depth_db >= 0.0)) {
        throw DomainError("localized_absorber: depth must be >= 0 dB");
    }
    auto sample = SampleResponse::transparent(n_min, n_max);
    sample.kappas[static_cast<std::size_t>(m - n_min)] = std::pow(10.0, -depth_db / 10.0);
    return sample;
}

double sql_psd(const DcsSetup& setup, const SampleResponse& sample)
{
    validate(setup);
    validate(sample);
    double sum = 0.0;
    for (int n = setup.signal.n_min; n <= setup.signal.n_max; ++n) {
        const double as = setup.signal.amp(n);
        const double al = setup.lo.amp(n);
        sum += al * al + (setup.strong_lo ? 0.0 : sample.kappa(n) * as * as);
    }
    return setup.charge * setup.charge * sum;
}

NoiseReport photocurrent_psd(const DcsSetup& setup, const QuantumSpec& spec, const SampleResponse& sample)
{
    validate(setup);
    validate(sample);
    validate(spec);
    const int lo = setup.signal.n_min;
    const int hi = setup.signal.n_max;

    double sum = 0.0;
    if (spec.mode == StateMode::epr) {
        if (spec.frame == Frame::self_referred) {
            throw DomainError("photocurrent_psd: EPR pairing is only modeled in the cross-referred frame");
        }
        if (lo != -hi || !setup.signal.is_symmetric(kSymmetryTolerance) ||
            !setup.lo.is_symmetric(kSymmetryTolerance)) {
            throw DomainError("photocurrent_psd: EPR pairing requires symmetric combs");
        }
        sum = cross_line(setup, spec, sample, 0);
        for (int n = 1; n <= hi; ++n) {
            sum += epr_pair(setup, spec, sample, n);
        }
    } else if (spec.frame == Frame::self_referred) {
        for (int n = lo; n <= hi; ++n) {
            sum += self_line(setup, spec, sample, n);
        }
    } else {
        for (int n = lo; n <= hi; ++n) {
            sum += cross_line(setup, spec, sample, n);
        }
    }

    NoiseReport r;
    r.charge = setup.charge;
    r.value = setup.charge * setup.charge * sum;
    r.reference = sql_psd(setup, sample);
    r.normalized = r.value / r.reference;
    r.units = "A^2/Hz";
    r.reference_name = "sql";
    r.band_lo = 0.0;
    r.band_hi = 0.5 * setup.signal.grid.omega_rep;
    return r;
}

TransmittanceSnr transmittance_snr(const DcsSetup& setup, const SampleResponse& sample, const NoiseReport& psd,
                                   int m, double duration)
{
    validate(setup);
    validate(sample);
    if (!(duration > 0.0)) {
        throw DomainError("transmittance_snr: integration time must be positive");
    }
    if (!setup.signal.contains(m)) {
        throw DomainError("transmittance_snr: line m outside the comb");
    }
    if (!(psd.value > 0.0)) {
        throw DomainError("transmittance_snr: PSD must be positive");
    }
    const double q2 = setup.charge * setup.charge;
    const double as = setup.signal.amp(m);
    const double al = setup.lo.amp(m);
    const double k = sample.kappa(m);
    TransmittanceSnr out;
    out.snr = k * q2 * as * as * al * al * duration / (2.0 * psd.value);
    out.var_kappa = k / (q2 * as * as * al * al) * 2.0 * psd.value / duration;
    out.tone_orthogonal =
        duration * setup.delta_rep >= 10.0 * constants::two_pi && setup.beat_omega(m) * duration >= 10.0;
    return out;
}

std::string to_string(Strategy strategy)
{
    return strategy == Strategy::intra_cross ? "intra-cross" : "epr";
}

Strategy parse_strategy(const std::string& name)
{
    if (name == "intra-cross" || name == "intra_cross" || name == "intra") return Strategy::intra_cross;
    if (name == "epr") return Strategy::epr;
    throw DomainError("unknown DCS strategy '" + name + "'");
}

double advantage_factor(int n_pairs, double depth_db, double gain, double alpha_s, double alpha_l,
                        Strategy strategy)
{
    if (n_pairs < 1) {
        throw DomainError("advantage_factor: need at least one line pair");
    }
    if (!(gain >= 1.0) || !std::isfinite(gain)) {
        throw DomainError("advantage_factor: gain must be finite and >= 1");
    }
    if (!(depth_db >= 0.0)) {
        throw DomainError("advantage_factor: depth must be >= 0 dB");
    }
    if (!(alpha_s >= 0.0) || !(alpha_l > 0.0)) {
        throw DomainError("advantage_factor: comb amplitudes must be non-negative, LO positive");
    }
    const double k = std::pow(10.0, -depth_db / 10.0);
    const double n2 = 2.0 * n_pairs;
    const double s2 = alpha_s * alpha_s;
    const double l2 = alpha_l * alpha_l;
    const double squeezed = s2 / gain + l2 / gain;
    const double baseline = (n2 + k) * s2 + (n2 + 1.0) * l2;

    double enhanced = 0.0;
    if (strategy == Strategy::intra_cross) {
        enhanced = (n2 + k) * squeezed + (1.0 - k) * l2;
    } else {
        const double rk = std::sqrt(k);
        enhanced = 0.5 * (2.0 * n2 - 2.0 + (1.0 + rk) * (1.0 + rk)) * squeezed +
                   0.5 * (1.0 - rk) * (1.0 - rk) * (s2 * gain + l2 * gain) + (1.0 - k) * l2;
    }
    return baseline / enhanced;
}

std::vector<AdvantagePoint> advantage_curve(int n_pairs, const std::vector<double>& depth_db, double gain,
                                            double alpha_s, double alpha_l, Strategy strategy, unsigned threads)
{
    std::vector<AdvantagePoint> rows(depth_db.size());
    const auto evaluate = [&](std::size_t i) {
        const double a = advantage_factor(n_pairs, depth_db[i], gain, alpha_s, alpha_l, strategy);
        rows[i] = AdvantagePoint{depth_db[i], strategy, 2 * n_pairs, 10.0 * std::log10(gain), a,
                                 10.0 * std::log10(a)};
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            evaluate(i);
        }
        return rows;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < rows.size(); i += threads) {
                        evaluate(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return rows;
}

DcsSetup flattop_setup(int n_pairs, double alpha_s, double alpha_l, bool strong_lo)
{
    if (n_pairs < 0) {
        throw DomainError("flattop_setup: negative half-width");
    }
    const auto size = static_cast<std::size_t>(2 * n_pairs + 1);
    DcsSetup setup;
    setup.signal = make_raw_envelope(-n_pairs, std::vector<double>(size, alpha_s));
    setup.lo = make_raw_envelope(-n_pairs, std::vector<double>(size, alpha_l));
    setup.strong_lo = strong_lo;
    return setup;
}

} // namespace combnoise::dcs
