#include "combnoise/ofd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include "combnoise/errors.hpp"

namespace combnoise::ofd {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

double beat_amplitude(const CombEnvelope& env)
{
    double s = 0.0;
    for (int n = env.n_min + 1; n <= env.n_max; ++n) {
        s += env.amp(n - 1) * env.amp(n);
    }
    if (!(s > 0.0)) {
        throw DomainError("OFD: envelope needs two adjacent populated lines to form a beatnote");
    }
    return s;
}

void require_symmetric(const CombEnvelope& env, const char* where)
{
    if (!env.is_symmetric(kSymmetryTolerance)) {
        throw DomainError(std::string(where) + ": EPR pairing requires a symmetric envelope");
    }
}

// Quadrature variances of line n for block-diagonal (vacuum / intra) states.
LineVariances line_variances(const QuantumSpec& spec, int n)
{
    LineVariances v;
    if (spec.mode == StateMode::intra) {
        v = squeezed_line(spec.gains.at(n), spec.axis);
    }
    v.qq += spec.classical.qq(n);
    v.pp += spec.classical.pp(n);
    return v;
}

// Variances of the EPR combinations of pair n >= 1 (Q+ and P- are squeezed).
struct PairVariances {
    double q_plus = 0.5;
    double p_minus = 0.5;
};

PairVariances pair_variances(const QuantumSpec& spec, int n)
{
    const double g = spec.gains.at(n);
    squeezed_line(g, spec.axis); // validates g
    return {0.5 / g + 0.5 * (spec.classical.qq(n) + spec.classical.qq(-n)),
            0.5 / g + 0.5 * (spec.classical.pp(n) + spec.classical.pp(-n))};
}

double phase_psd_value(const CombEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    validate(spec);
    const double s = beat_amplitude(env);
    const auto [lo, hi] = summation_range(env, policy);
    const auto slope = [&env](int n) { return env.amp(n - 1) - env.amp(n + 1); };

    if (spec.mode == StateMode::epr) {
        require_symmetric(env, "phase_noise_psd");
        const double d0 = slope(0);
        const double v0 = squeezed_line(spec.gains.at(0), spec.axis).pp + spec.classical.pp(0);
        double folded = 0.0;
        for (int n = 1; n <= hi; ++n) {
            const double d = slope(n);
            folded += d * d * pair_variances(spec, n).p_minus;
        }
        return d0 * d0 * v0 / (2.0 * s * s) + folded / (s * s);
    }

    double sum = 0.0;
    for (int n = lo; n <= hi; ++n) {
        const double d = slope(n);
        sum += d * d * line_variances(spec, n).pp;
    }
    return sum / (2.0 * s * s);
}

double amplitude_psd_value(const CombEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    validate(spec);
    const double s = beat_amplitude(env);
    const auto [lo, hi] = summation_range(env, policy);
    const auto sum_weight = [&env](int n) { return env.amp(n - 1) + env.amp(n + 1); };

    if (spec.mode == StateMode::epr) {
        require_symmetric(env, "amplitude_noise_psd");
        const double s0 = sum_weight(0);
        const double v0 = squeezed_line(spec.gains.at(0), spec.axis).qq + spec.classical.qq(0);
        double folded = 0.0;
        for (int n = 1; n <= hi; ++n) {
            const double w = sum_weight(n);
            folded += w * w * pair_variances(spec, n).q_plus;
        }
        return s0 * s0 * v0 / (2.0 * s * s) + folded / (s * s);
    }

    double sum = 0.0;
    for (int n = lo; n <= hi; ++n) {
        const double w = sum_weight(n);
        sum += w * w * line_variances(spec, n).qq;
    }
    return sum / (2.0 * s * s);
}

NoiseReport make_report(double value, const CombEnvelope& env, double reference)
{
    NoiseReport r;
    r.value = value;
    r.reference = reference;
    r.normalized = value / reference;
    r.units = "rad^2/Hz";
    r.reference_name = "cw_heterodyne";
    r.band_lo = 0.0;
    r.band_hi = 0.5 * env.grid.omega_rep;
    return r;
}

} // namespace

std::string to_string(SumPolicy policy)
{
    return policy == SumPolicy::support_only ? "support-only" : "extended";
}

SumPolicy parse_sum_policy(const std::string& name)
{
    if (name == "support-only" || name == "support_only") return SumPolicy::support_only;
    if (name == "extended") return SumPolicy::extended;
    throw DomainError("unknown summation policy '" + name + "'");
}

double OfdWeights::amp_weight(int n) const
{
    return n < n_min || n > n_max() ? 0.0 : amp_weights[static_cast<std::size_t>(n - n_min)];
}

double OfdWeights::phase_weight(int n) const
{
    return n < n_min || n > n_max() ? 0.0 : phase_weights[static_cast<std::size_t>(n - n_min)];
}

std::pair<int, int> summation_range(const CombEnvelope& env, SumPolicy policy)
{
    return policy == SumPolicy::support_only ? std::pair{env.n_min, env.n_max}
                                             : std::pair{env.n_min - 1, env.n_max + 1};
}

OfdWeights ofd_weights(const CombEnvelope& env, SumPolicy policy)
{
    const double s = beat_amplitude(env);
    const auto [lo, hi] = summation_range(env, policy);
    const double norm = 1.0 / (std::sqrt(2.0) * s);
    OfdWeights w;
    w.n_min = lo;
    w.beat_amp = s;
    w.beat_phase = 0.0;
    w.policy = policy;
    for (int n = lo; n <= hi; ++n) {
        w.amp_weights.push_back((env.amp(n - 1) + env.amp(n + 1)) * norm);
        w.phase_weights.push_back((env.amp(n - 1) - env.amp(n + 1)) * norm);
    }
    return w;
}

NoiseReport cw_benchmark(double total_flux, CombGrid grid)
{
    if (!(total_flux > 0.0)) {
        throw DomainError("cw_benchmark: total flux must be positive");
    }
    const double a = std::sqrt(0.5 * total_flux);
    const auto pair = make_raw_envelope(-1, {a, a}, grid);
    const double value = phase_psd_value(pair, QuantumSpec::vacuum(), SumPolicy::support_only);
    return make_report(value, pair, value);
}

NoiseReport phase_noise_psd(const CombEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    const double value = phase_psd_value(env, spec, policy);
    return make_report(value, env, cw_benchmark(env.total_flux(), env.grid).value);
}

NoiseReport amplitude_noise_psd(const CombEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    const double value = amplitude_psd_value(env, spec, policy);
    const double a = std::sqrt(0.5 * env.total_flux());
    const double cw = amplitude_psd_value(make_raw_envelope(-1, {a, a}, env.grid), QuantumSpec::vacuum(),
                                          SumPolicy::support_only);
    return make_report(value, env, cw);
}

double suppression_ratio(const CombEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    return phase_noise_psd(env, spec, policy).normalized;
}

double eta_enhancement(const CombEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    QuantumSpec vacuum;
    vacuum.classical = spec.classical;
    return phase_psd_value(env, spec, policy) / phase_psd_value(env, vacuum, policy);
}

GeneralWeights general_phase_estimator_weights(const PhasedEnvelope& env, SumPolicy policy)
{
    const CombEnvelope& base = env.base;
    std::complex<double> beat{0.0, 0.0};
    for (int n = base.n_min + 1; n <= base.n_max; ++n) {
        beat += std::polar(base.amp(n - 1) * base.amp(n), env.theta(n) - env.theta(n - 1));
    }
    const double s = std::abs(beat);
    if (!(s > 0.0)) {
        throw DomainError("general_phase_estimator_weights: no beatnote at the repetition rate");
    }
    const double phi0 = std::arg(beat);
    const double norm = 1.0 / (std::sqrt(2.0) * s);
    const auto [lo, hi] = summation_range(base, policy);

    GeneralWeights w;
    w.n_min = lo;
    w.beat_amp = s;
    w.beat_phase = phi0;
    for (int n = lo; n <= hi; ++n) {
        const double below = base.amp(n - 1);
        const double above = base.amp(n + 1);
        const double dm = env.theta(n - 1) + phi0; // Delta theta_n^(-)
        const double dp = env.theta(n + 1) - phi0; // Delta theta_n^(+)
        w.amp_q.push_back(norm * (below * std::cos(dm) + above * std::cos(dp)));
        w.amp_p.push_back(norm * (below * std::sin(dm) + above * std::sin(dp)));
        w.phase_q.push_back(norm * (-below * std::sin(dm) + above * std::sin(dp)));
        w.phase_p.push_back(norm * (below * std::cos(dm) - above * std::cos(dp)));
    }
    return w;
}

double general_phase_noise_psd(const PhasedEnvelope& env, const QuantumSpec& spec, SumPolicy policy)
{
    if (spec.mode == StateMode::epr) {
        throw DomainError("general_phase_noise_psd: EPR states are only modeled for in-phase combs");
    }
    validate(spec);
    const auto w = general_phase_estimator_weights(env, policy);
    double sum = 0.0;
    for (int n = w.n_min; n <= w.n_max(); ++n) {
        const auto i = static_cast<std::size_t>(n - w.n_min);
        const auto v = line_variances(spec, n);
        sum += w.phase_q[i] * w.phase_q[i] * v.qq + w.phase_p[i] * w.phase_p[i] * v.pp;
    }
    return sum;
}

double classical_transfer(const CombEnvelope& env, int n0)
{
    if (n0 < 1) {
        throw DomainError("classical_transfer: carrier index N0 must be >= 1");
    }
    const double s = beat_amplitude(env);
    // Substitute dp_n = sqrt(2) alpha_n (1 + n/N0) dphi_ref into the phase
    // estimator. Each weight is a difference of two beat products; the
    // common (1) part cancels product by product, so it is accumulated per
    // product rather than through the rounded differences.
    double lower = 0.0;
    double upper = 0.0;
    double differential = 0.0;
    for (int n = env.n_min; n <= env.n_max; ++n) {
        const double a = env.amp(n);
        lower += env.amp(n - 1) * a;
        upper += env.amp(n + 1) * a;
        differential += (env.amp(n - 1) - env.amp(n + 1)) * a * static_cast<double>(n);
    }
    return ((lower - upper) + differential / static_cast<double>(n0)) / s;
}

double classical_psd_suppression(const CombEnvelope& env)
{
    const double ratio = env.grid.omega_rep / env.grid.omega0;
    const double n0 = std::round(1.0 / ratio);
    if (n0 > static_cast<double>(std::numeric_limits<int>::max())) {
        throw DomainError("classical_psd_suppression: carrier index out of range");
    }
    const double t = classical_transfer(env, static_cast<int>(n0));
    return t * t;
}

std::vector<SweepPoint> ratio_sweep(const SweepRequest& request)
{
    if (request.shapes.empty()) {
        throw DomainError("ratio_sweep: no shapes requested");
    }
    if (request.points < 1 || !(request.m_rms_min > 0.0) || request.m_rms_max < request.m_rms_min) {
        throw DomainError("ratio_sweep: invalid M_rms grid");
    }
    validate(request.spec);

    const auto points = static_cast<std::size_t>(request.points);
    std::vector<SweepPoint> rows(request.shapes.size() * points);
    const auto evaluate = [&](std::size_t k) {
        const Shape shape = request.shapes[k / points];
        const auto i = static_cast<double>(k % points);
        const double t = points == 1 ? 0.0 : i / static_cast<double>(points - 1);
        const double target = request.m_rms_min * std::pow(request.m_rms_max / request.m_rms_min, t);
        const auto fit = solve_shape_param(shape, target);
        const auto env = make_envelope(shape, fit.param, request.total_flux);
        rows[k] = SweepPoint{shape,
                             fit.param,
                             rms_modal_bandwidth(env),
                             suppression_ratio(env, request.spec, request.policy),
                             eta_enhancement(env, request.spec, request.policy),
                             request.policy};
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(request.threads, static_cast<unsigned>(rows.size())));
    if (threads == 1) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            evaluate(k);
        }
        return rows;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t k = t; k < rows.size(); k += threads) {
                        evaluate(k);
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

double loglog_slope(const std::vector<SweepPoint>& rows, Shape shape)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const auto& r : rows) {
        if (r.shape != shape) {
            continue;
        }
        const double x = std::log(r.m_rms);
        const double y = std::log(r.ratio);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 2 || !(std::abs(denom) > 0.0)) {
        throw NumericError("loglog_slope: need at least two distinct M_rms values");
    }
    return (count * sxy - sx * sy) / denom;
}

} // namespace combnoise::ofd
