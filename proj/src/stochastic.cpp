#include "combnoise/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "combnoise/errors.hpp"
#include "combnoise/philox.hpp"

namespace combnoise::stochastic {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

// Counter words 2 and 3: draw kind and line stream.
enum Block : std::uint32_t { signal_block = 0, loss_block = 1, lo_block = 2 };

std::uint32_t stream_of(int line)
{
    return static_cast<std::uint32_t>(static_cast<std::int64_t>(line) + (std::int64_t{1} << 31));
}

std::pair<double, double> draw(std::uint64_t k, Block block, int line, const rng::Key& key)
{
    return rng::gaussian_pair(
        {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32), block, stream_of(line)}, key);
}

// Per-line constants shared by the analytic trace and the sampler. Photon-flux
// units; q_e cancels in every normalized quantity.
struct Line {
    int n = 0;
    double omega = 0.0;
    double as = 0.0;
    double al = 0.0;
    double kappa = 1.0;
    double c = 1.0; // cos theta_n
    double s = 0.0; // sin theta_n
    double theta = 0.0;
    LineVariances sig; // signal before the sample, classical noise included
    LineVariances lo;
};

std::vector<Line> build_lines(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample)
{
    std::vector<Line> lines;
    for (int n = setup.signal.n_min; n <= setup.signal.n_max; ++n) {
        Line l;
        l.n = n;
        l.omega = setup.beat_omega(n);
        l.as = setup.signal.amp(n);
        l.al = setup.lo.amp(n);
        l.kappa = sample.kappa(n);
        l.theta = sample.theta(n);
        l.c = std::cos(l.theta);
        l.s = std::sin(l.theta);
        if (spec.mode == StateMode::intra) {
            l.sig = squeezed_line(spec.gains.at(n), spec.axis);
            l.lo = squeezed_line(spec.lo_gains.at(n), spec.axis);
        } else if (spec.mode == StateMode::epr && n == 0) {
            l.sig = squeezed_line(spec.gains.at(0), spec.axis);
            l.lo = squeezed_line(spec.lo_gains.at(0), spec.axis);
        }
        l.sig.qq += spec.classical.qq(n);
        l.sig.pp += spec.classical.pp(n);
        lines.push_back(l);
    }
    return lines;
}

void check_model(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample)
{
    dcs::validate(setup);
    dcs::validate(sample);
    validate(spec);
    if (spec.mode == StateMode::epr) {
        if (spec.frame == Frame::self_referred) {
            throw DomainError("stochastic: EPR pairing is only modeled in the cross-referred frame");
        }
        if (setup.signal.n_min != -setup.signal.n_max || !setup.signal.is_symmetric(kSymmetryTolerance) ||
            !setup.lo.is_symmetric(kSymmetryTolerance)) {
            throw DomainError("stochastic: EPR pairing requires symmetric combs");
        }
    }
}

double sql_flux(const dcs::DcsSetup& setup, const dcs::SampleResponse& sample)
{
    return dcs::sql_psd(setup, sample) / (setup.charge * setup.charge);
}

// Cholesky factor of a 2x2 covariance [[a, c], [c, b]].
struct Chol2 {
    double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

Chol2 cholesky2(double a, double c, double b)
{
    Chol2 f;
    f.l11 = std::sqrt(a);
    f.l21 = c / f.l11;
    f.l22 = std::sqrt(std::max(0.0, b - f.l21 * f.l21));
    return f;
}

struct Quadratures {
    double q = 0.0, p = 0.0;
};

} // namespace

std::size_t TraceConfig::samples() const
{
    return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

void validate(const TraceConfig& cfg, const dcs::DcsSetup& setup)
{
    if (!(cfg.sample_rate > 0.0) || !(cfg.duration > 0.0) || !(cfg.rbw > 0.0)) {
        throw DomainError("TraceConfig: sample rate, duration and rbw must be positive");
    }
    if (cfg.duration * cfg.rbw < 1.0 - 1e-9) {
        throw DomainError("TraceConfig: duration must cover at least one resolution bandwidth period");
    }
    dcs::validate(setup);
    const double f_max = std::max(std::abs(setup.beat_omega(setup.signal.n_min)),
                                  std::abs(setup.beat_omega(setup.signal.n_max))) /
                         constants::two_pi;
    if (!(cfg.sample_rate > 2.0 * f_max)) {
        throw DomainError("TraceConfig: sample rate aliases the highest beat note");
    }
}

std::vector<double> time_grid(double sample_rate, std::size_t count)
{
    if (!(sample_rate > 0.0)) {
        throw DomainError("time_grid: sample rate must be positive");
    }
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) {
        t[k] = static_cast<double>(k) / sample_rate;
    }
    return t;
}

VarianceTrace variance_trace(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample,
                             const std::vector<double>& times)
{
    if (times.empty()) {
        throw DomainError("variance_trace: empty time grid");
    }
    check_model(setup, spec, sample);
    const auto lines = build_lines(setup, spec, sample);
    const double sql = sql_flux(setup, sample);
    const double q = setup.charge;

    double mean_norm = 0.0;
    for (const auto& l : lines) {
        mean_norm += std::sqrt(l.kappa) * l.as * l.al;
    }

    VarianceTrace out;
    out.times = times;
    out.variance.resize(times.size());
    out.mean.resize(times.size());
    out.variance_scale = q * q * sql;
    out.mean_scale = 2.0 * q * mean_norm;

    const bool self = spec.frame == Frame::self_referred;
    double constant = 0.0;
    if (spec.mode == StateMode::epr) {
        constant = dcs::photocurrent_psd(setup, spec, sample).normalized;
    }

    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        double var = 0.0;
        double mean = 0.0;
        for (const auto& l : lines) {
            // Signal covariance after the sample map.
            const double k = l.kappa;
            const double sqq = k * (l.c * l.c * l.sig.qq + l.s * l.s * l.sig.pp) + 0.5 * (1.0 - k);
            const double spp = k * (l.s * l.s * l.sig.qq + l.c * l.c * l.sig.pp) + 0.5 * (1.0 - k);
            const double sqp = k * l.c * l.s * (l.sig.qq - l.sig.pp);
            const double phase = l.omega * t;
            if (spec.mode != StateMode::epr) {
                if (self) {
                    const double cp = std::cos(phase);
                    const double sp = std::sin(phase);
                    var += 2.0 * l.al * l.al * (sqq * cp * cp + spp * sp * sp - 2.0 * sqp * cp * sp);
                    if (!setup.strong_lo) {
                        var += 2.0 * k * l.as * l.as * (l.lo.qq * cp * cp + l.lo.pp * sp * sp);
                    }
                } else {
                    var += 2.0 * l.al * l.al * sqq;
                    if (!setup.strong_lo) {
                        var += 2.0 * k * l.as * l.as * l.lo.qq;
                    }
                }
            }
            mean += std::sqrt(k) * l.as * l.al * std::cos(phase - l.theta);
        }
        out.variance[i] = spec.mode == StateMode::epr ? constant : var / sql;
        out.mean[i] = mean_norm > 0.0 ? mean / mean_norm : 0.0;
    }
    return out;
}

PhotocurrentSeries sample_photocurrent(const dcs::DcsSetup& setup, const QuantumSpec& spec,
                                       const dcs::SampleResponse& sample, const TraceConfig& cfg)
{
    validate(cfg, setup);
    check_model(setup, spec, sample);
    const auto lines = build_lines(setup, spec, sample);
    const std::size_t count = cfg.samples();
    const auto key = rng::key_from_seed(cfg.seed);
    const double sql = sql_flux(setup, sample);
    const double unit = std::sqrt(2.0 * cfg.sample_rate / sql);
    const bool self = spec.frame == Frame::self_referred;
    const bool epr = spec.mode == StateMode::epr;
    const int n_min = setup.signal.n_min;

    // EPR pair factors for the signal and LO combs, indexed by pair n >= 1.
    struct PairFactors {
        Chol2 sq, sp, lq, lp;
    };
    std::vector<PairFactors> pairs;
    if (epr) {
        pairs.resize(static_cast<std::size_t>(setup.signal.n_max + 1));
        for (int n = 1; n <= setup.signal.n_max; ++n) {
            const double gs = spec.gains.at(n);
            const double gl = spec.lo_gains.at(n);
            squeezed_line(gs, spec.axis);
            squeezed_line(gl, spec.axis);
            const auto var = [](double g) { return 0.5 * (0.5 / g + 0.5 * g); };
            const auto cov = [](double g) { return 0.5 * (0.5 / g - 0.5 * g); };
            auto& f = pairs[static_cast<std::size_t>(n)];
            f.sq = cholesky2(var(gs) + spec.classical.qq(n), cov(gs), var(gs) + spec.classical.qq(-n));
            f.sp = cholesky2(var(gs) + spec.classical.pp(n), -cov(gs), var(gs) + spec.classical.pp(-n));
            f.lq = cholesky2(var(gl), cov(gl), var(gl));
            f.lp = cholesky2(var(gl), -cov(gl), var(gl));
        }
    }

    PhotocurrentSeries out;
    out.sample_rate = cfg.sample_rate;
    out.values.resize(count);
    out.scale = std::sqrt(dcs::sql_psd(setup, sample));

    // Beat phases advance by a fixed rotation per sample; they are recomputed
    // exactly at every multiple of kResync so values do not depend on where a
    // worker's chunk starts.
    constexpr std::size_t kResync = 4096;
    std::vector<double> step_c(lines.size()), step_s(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        step_c[i] = std::cos(lines[i].omega / cfg.sample_rate);
        step_s[i] = std::sin(lines[i].omega / cfg.sample_rate);
    }

    const auto fill = [&](std::size_t begin, std::size_t end) {
        std::vector<Quadratures> sig(lines.size());
        std::vector<Quadratures> lo(lines.size());
        std::vector<double> rot_c(lines.size()), rot_s(lines.size());
        const auto advance = [&] {
            for (std::size_t i = 0; i < lines.size(); ++i) {
                const double c = rot_c[i] * step_c[i] - rot_s[i] * step_s[i];
                rot_s[i] = rot_s[i] * step_c[i] + rot_c[i] * step_s[i];
                rot_c[i] = c;
            }
        };
        const auto resync = [&](std::size_t k) {
            const double t = static_cast<double>(k) / cfg.sample_rate;
            for (std::size_t i = 0; i < lines.size(); ++i) {
                rot_c[i] = std::cos(lines[i].omega * t);
                rot_s[i] = std::sin(lines[i].omega * t);
            }
        };
        if (self && begin < end) {
            const std::size_t base = begin - begin % kResync;
            resync(base);
            for (std::size_t k = base; k < begin; ++k) advance();
        }
        for (std::size_t k = begin; k < end; ++k) {
            if (self && k != begin) {
                if (k % kResync == 0) {
                    resync(k);
                } else {
                    advance();
                }
            }
            // Signal and LO quadratures before the sample.
            for (std::size_t i = 0; i < lines.size(); ++i) {
                const auto& l = lines[i];
                if (epr && l.n != 0) {
                    if (l.n < 0) {
                        continue;
                    }
                    const auto& f = pairs[static_cast<std::size_t>(l.n)];
                    const auto [ap, aq] = draw(k, signal_block, l.n, key);
                    const auto [bp, bq] = draw(k, signal_block, -l.n, key);
                    const std::size_t j = static_cast<std::size_t>(-l.n - n_min);
                    sig[i] = {f.sq.l11 * ap, f.sp.l11 * aq};
                    sig[j] = {f.sq.l21 * ap + f.sq.l22 * bp, f.sp.l21 * aq + f.sp.l22 * bq};
                    if (!setup.strong_lo) {
                        const auto [cp, cq] = draw(k, lo_block, l.n, key);
                        const auto [dp, dq] = draw(k, lo_block, -l.n, key);
                        lo[i] = {f.lq.l11 * cp, f.lp.l11 * cq};
                        lo[j] = {f.lq.l21 * cp + f.lq.l22 * dp, f.lp.l21 * cq + f.lp.l22 * dq};
                    }
                    continue;
                }
                const auto [zq, zp] = draw(k, signal_block, l.n, key);
                sig[i] = {std::sqrt(l.sig.qq) * zq, std::sqrt(l.sig.pp) * zp};
                if (!setup.strong_lo) {
                    const auto [lq, lp] = draw(k, lo_block, l.n, key);
                    lo[i] = {std::sqrt(l.lo.qq) * lq, std::sqrt(l.lo.pp) * lp};
                }
            }
            // Sample map, then the balanced photocurrent in the chosen frame.
            double current = 0.0;
            for (std::size_t i = 0; i < lines.size(); ++i) {
                const auto& l = lines[i];
                const double rk = std::sqrt(l.kappa);
                double q = rk * (l.c * sig[i].q - l.s * sig[i].p);
                double p = rk * (l.s * sig[i].q + l.c * sig[i].p);
                if (l.kappa < 1.0) {
                    const auto [vq, vp] = draw(k, loss_block, l.n, key);
                    const double loss = std::sqrt(0.5 * (1.0 - l.kappa));
                    q += loss * vq;
                    p += loss * vp;
                }
                if (self) {
                    const double cp = rot_c[i];
                    const double sp = rot_s[i];
                    current += l.al * (q * cp - p * sp);
                    if (!setup.strong_lo) {
                        current += rk * l.as * (lo[i].q * cp + lo[i].p * sp);
                    }
                } else {
                    current += l.al * q;
                    if (!setup.strong_lo) {
                        current += rk * l.as * lo[i].q;
                    }
                }
            }
            out.values[k] = unit * current;
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(count / 1024 + 1)));
    if (threads == 1) {
        fill(0, count);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(count, t * chunk);
            const std::size_t end = std::min(count, begin + chunk);
            pool.emplace_back([&, t, begin, end] {
                try {
                    fill(begin, end);
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
    return out;
}

McComparison compare_to_trace(const PhotocurrentSeries& series, const VarianceTrace& trace)
{
    if (series.values.size() != trace.variance.size() || series.values.empty()) {
        throw ContractError("compare_to_trace: series and trace lengths differ");
    }
    const auto count = static_cast<double>(series.values.size());
    double sum_sq = 0.0;
    double analytic = 0.0;
    double spread = 0.0;
    for (std::size_t k = 0; k < series.values.size(); ++k) {
        sum_sq += series.values[k] * series.values[k];
        analytic += trace.variance[k];
        spread += 2.0 * trace.variance[k] * trace.variance[k];
    }
    McComparison c;
    c.sample_variance = sum_sq / (count * series.sample_rate);
    c.analytic_variance = analytic / count;
    c.standard_error = std::sqrt(spread) / count;
    c.z_score = (c.sample_variance - c.analytic_variance) / c.standard_error;
    return c;
}

CycloPreset cyclo_preset()
{
    constexpr int half = 50;
    const double sigma = half / 3.0;
    const CombGrid grid{constants::two_pi * constants::speed_of_light / 1550e-9, constants::two_pi * 1e9};
    const double flux = 10e-3 / (constants::hbar * grid.omega0);

    std::vector<double> amps;
    for (int n = -half; n <= half; ++n) {
        const double x = static_cast<double>(n);
        amps.push_back(std::exp(-x * x / (2.0 * sigma * sigma)));
    }
    double sum = 0.0;
    for (double a : amps) {
        sum += a * a;
    }
    for (double& a : amps) {
        a *= std::sqrt(flux / sum);
    }

    CycloPreset preset;
    preset.setup.signal = make_raw_envelope(-half, amps, grid);
    preset.setup.lo = preset.setup.signal;
    preset.setup.strong_lo = true;
    preset.setup.omega_offset = constants::two_pi * 100.5e3;
    preset.setup.delta_rep = constants::two_pi * 1e3;
    preset.trace.sample_rate = 1e6;
    preset.trace.duration = 1.0;
    preset.trace.rbw = 100.0;
    return preset;
}

QuantumSpec cyclo_spec(double gain)
{
    return QuantumSpec::dcs(StateMode::intra, Frame::self_referred, GainProfile::constant(gain),
                            GainProfile::constant(1.0));
}

} // namespace combnoise::stochastic
