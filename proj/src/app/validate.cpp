#include "combnoise/app/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "combnoise/oracle.hpp"
#include "combnoise/stochastic.hpp"

namespace combnoise::app {

namespace {

using nlohmann::json;

constexpr double kOracleTolerance = 1e-10;
constexpr double kExactTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-9;
constexpr double kMcSigmas = 5.0;

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5)
{
    return std::bernoulli_distribution(p)(rng);
}

GainProfile random_gains(Rng& rng, int lo, int hi)
{
    GainProfile g;
    g.uniform = coin(rng, 0.2) ? 1.0 : uniform(rng, 1.0, 20.0);
    if (coin(rng)) {
        for (int n = lo; n <= hi; ++n) {
            if (coin(rng, 0.4)) g.overrides[n] = uniform(rng, 1.0, 40.0);
        }
    }
    return g;
}

ClassicalNoise random_classical(Rng& rng, int lo, int hi)
{
    ClassicalNoise c;
    if (coin(rng, 0.7)) return c;
    for (int n = lo; n <= hi; ++n) {
        if (coin(rng, 0.3)) c.s_qq[n] = uniform(rng, 0.0, 0.5);
        if (coin(rng, 0.3)) c.s_pp[n] = uniform(rng, 0.0, 0.5);
    }
    return c;
}

// Updates a running maximum; NaN counts as a failure.
void track(double& worst, double err)
{
    worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : std::max(worst, err);
}

CheckResult ofd_oracle_check(const RunConfig& cfg, const ValidationOptions& options)
{
    Rng rng(cfg.seed ^ 0x0fd0fd0fdULL);
    double worst_phase = 0.0, worst_amp = 0.0, worst_general = 0.0;
    int epr_cases = 0;
    for (int i = 0; i < cfg.validate.oracle_instances; ++i) {
        const auto inst = random_ofd_instance(rng);
        const double closed_phase = ofd::phase_noise_psd(inst.env, inst.spec, inst.policy).value;
        const double closed_amp = ofd::amplitude_noise_psd(inst.env, inst.spec, inst.policy).value;

        auto vectors = oracle::ofd_estimators(with_phases(inst.env, std::vector<double>(inst.env.amps.size(), 0.0)),
                                              inst.spec, inst.policy);
        if (inst.spec.mode == StateMode::epr) {
            ++epr_cases;
            if (options.inject_epr_sign_flip) {
                for (const auto& m : vectors.cov.modes()) {
                    if (m.line < 0) vectors.phase[static_cast<std::size_t>(vectors.cov.p_index(m.line))] *= -1.0;
                }
            }
        }
        track(worst_phase, relative_error(closed_phase, quadratic_form_variance(vectors.cov, vectors.phase)));
        track(worst_amp, relative_error(closed_amp, quadratic_form_variance(vectors.cov, vectors.amplitude)));

        if (inst.spec.mode != StateMode::epr) {
            const auto phased = random_phases(rng, inst.env);
            track(worst_general, relative_error(ofd::general_phase_noise_psd(phased, inst.spec, inst.policy),
                                                oracle::ofd_general_phase_psd(phased, inst.spec, inst.policy)));
        }
    }
    const double worst = std::max({worst_phase, worst_amp, worst_general});
    return {"ofd_oracle_equivalence",
            worst <= kOracleTolerance,
            {{"instances", cfg.validate.oracle_instances},
             {"epr_instances", epr_cases},
             {"max_rel_error_phase", worst_phase},
             {"max_rel_error_amplitude", worst_amp},
             {"max_rel_error_general_phase", worst_general},
             {"tolerance", kOracleTolerance}}};
}

CheckResult dcs_oracle_check(const RunConfig& cfg)
{
    Rng rng(cfg.seed ^ 0xdc5dc5dc5ULL);
    double worst = 0.0;
    json by_kind = json::object();
    for (int i = 0; i < cfg.validate.oracle_instances; ++i) {
        const auto inst = random_dcs_instance(rng);
        const double closed = dcs::photocurrent_psd(inst.setup, inst.spec, inst.sample).value;
        const double brute = oracle::dcs_psd(inst.setup, inst.spec, inst.sample);
        const double err = relative_error(closed, brute);
        track(worst, err);
        const auto kind = to_string(inst.spec.mode) + "/" + to_string(inst.spec.frame);
        by_kind[kind] = by_kind.value(kind, 0) + 1;
    }
    return {"dcs_oracle_equivalence",
            worst <= kOracleTolerance,
            {{"instances", cfg.validate.oracle_instances},
             {"configurations", by_kind},
             {"max_rel_error", worst},
             {"tolerance", kOracleTolerance}}};
}

CheckResult trace_oracle_check(const RunConfig& cfg)
{
    Rng rng(cfg.seed ^ 0x7ace7ace7ULL);
    double worst = 0.0;
    const int instances = std::max(1, cfg.validate.oracle_instances / 10);
    for (int i = 0; i < instances; ++i) {
        auto inst = random_dcs_instance(rng, 5);
        if (inst.spec.mode == StateMode::epr) {
            inst.spec.mode = StateMode::intra;
        }
        inst.spec.frame = coin(rng) ? Frame::self_referred : Frame::cross_referred;
        std::vector<double> times;
        for (int k = 0; k < 5; ++k) times.push_back(uniform(rng, 0.0, 1e-3));
        const auto trace = stochastic::variance_trace(inst.setup, inst.spec, inst.sample, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double brute = oracle::dcs_variance_at(inst.setup, inst.spec, inst.sample, times[k]);
            track(worst, relative_error(trace.variance[k] * trace.variance_scale, brute));
        }
    }
    return {"trace_oracle_equivalence",
            worst <= kOracleTolerance,
            {{"instances", instances}, {"max_rel_error", worst}, {"tolerance", kOracleTolerance}}};
}

CheckResult reductions_check(const RunConfig& cfg)
{
    Rng rng(cfg.seed ^ 0x4ed4ed4edULL);
    double cw = 0.0, flattop = 0.0, eta = 0.0, transfer = 0.0, dcs_sql = 0.0, dcs_self = 0.0, dcs_cross = 0.0;

    for (double flux : {1.0, 2.5, 1e3, 7.8e16}) {
        track(cw, relative_error(ofd::cw_benchmark(flux).value, 1.0 / flux));
    }
    for (int n = 1; n <= 20; ++n) {
        const auto env = make_envelope(Shape::flattop, n, 1.0);
        const double expect = (2.0 * n + 1.0) / (8.0 * n * n);
        track(flattop, relative_error(ofd::suppression_ratio(env, QuantumSpec::vacuum()), expect));
    }
    for (double g : {2.0, 10.0, 31.62}) {
        for (const auto& env : {make_envelope(Shape::gaussian, 4.0, 1.0), make_envelope(Shape::sech, 2.5, 1.0),
                                make_envelope(Shape::flattop, 7, 1.0)}) {
            track(eta, relative_error(ofd::eta_enhancement(env, QuantumSpec::ofd_intra(GainProfile::constant(g))),
                                      1.0 / g));
            track(eta, relative_error(ofd::eta_enhancement(env, QuantumSpec::ofd_epr(GainProfile::constant(g))),
                                      1.0 / g));
        }
    }
    for (int i = 0; i < 100; ++i) {
        const auto env = random_envelope(rng, coin(rng));
        for (int n0 : {1000, 100000}) {
            track(transfer, std::abs(ofd::classical_transfer(env, n0) * n0 - 1.0));
        }
    }

    for (int i = 0; i < 20; ++i) {
        const int h = uniform_int(rng, 0, 8);
        std::vector<double> as, al;
        for (int n = 0; n <= h; ++n) {
            as.push_back(uniform(rng, 0.1, 1.0));
            al.push_back(uniform(rng, 1.0, 10.0));
        }
        const auto mirror = [h](const std::vector<double>& half) {
            std::vector<double> full;
            for (int n = -h; n <= h; ++n) full.push_back(half[static_cast<std::size_t>(std::abs(n))]);
            return full;
        };
        dcs::DcsSetup setup;
        setup.signal = make_raw_envelope(-h, mirror(as));
        setup.lo = make_raw_envelope(-h, mirror(al));
        setup.strong_lo = coin(rng);
        const auto clear = dcs::SampleResponse::transparent(-h, h);
        const double sql = dcs::sql_psd(setup, clear);
        const auto unit = GainProfile::constant(1.0);
        for (auto mode : {StateMode::vacuum, StateMode::intra, StateMode::epr}) {
            for (auto frame : {Frame::self_referred, Frame::cross_referred}) {
                if (mode == StateMode::epr && frame == Frame::self_referred) continue;
                track(dcs_sql, relative_error(dcs::photocurrent_psd(setup, QuantumSpec::dcs(mode, frame, unit, unit),
                                                                    clear).value,
                                              sql));
            }
        }
        const double g = uniform(rng, 1.0, 40.0);
        const auto gain = GainProfile::constant(g);
        double sig = 0.0, lo = 0.0;
        for (int n = -h; n <= h; ++n) {
            sig += setup.signal.amp(n) * setup.signal.amp(n);
            lo += setup.lo.amp(n) * setup.lo.amp(n);
        }
        const double q2 = setup.charge * setup.charge;
        const double penalty = 0.5 * (g + 1.0 / g);
        const double self_expect = q2 * penalty * (lo + (setup.strong_lo ? 0.0 : sig));
        track(dcs_self, relative_error(
                            dcs::photocurrent_psd(setup, QuantumSpec::dcs(StateMode::intra, Frame::self_referred, gain, gain),
                                                  clear)
                                .value,
                            self_expect));
        const double cross_expect = q2 * (lo + (setup.strong_lo ? 0.0 : sig)) / g;
        for (auto mode : {StateMode::intra, StateMode::epr}) {
            track(dcs_cross, relative_error(
                                 dcs::photocurrent_psd(setup, QuantumSpec::dcs(mode, Frame::cross_referred, gain, gain),
                                                       clear)
                                     .value,
                                 cross_expect));
        }
    }

    const double worst = std::max({cw, flattop, eta, transfer, dcs_sql, dcs_self, dcs_cross});
    return {"closed_form_reductions",
            worst <= kExactTolerance,
            {{"cw_benchmark", cw},
             {"flattop_ratio", flattop},
             {"eta_uniform", eta},
             {"classical_transfer", transfer},
             {"dcs_unit_gain_sql", dcs_sql},
             {"dcs_self_penalty", dcs_self},
             {"dcs_cross_reduction", dcs_cross},
             {"tolerance", kExactTolerance}}};
}

CheckResult slope_check(const ValidationOptions& options)
{
    ofd::SweepRequest req;
    req.threads = options.threads;
    const auto rows = ofd::ratio_sweep(req);
    json slopes = json::object();
    bool pass = true;
    for (Shape s : req.shapes) {
        const double slope = ofd::loglog_slope(rows, s);
        const double target = s == Shape::flattop ? -1.0 : -2.0;
        slopes[std::string(to_string(s))] = slope;
        pass = pass && std::abs(slope - target) <= 0.1;
    }
    double max_r = 0.0;
    for (const auto& r : rows) max_r = std::max(max_r, r.ratio);
    pass = pass && max_r < 1.0;
    return {"ofd_sweep_slopes", pass, {{"slopes", slopes}, {"max_ratio", max_r}}};
}

CheckResult advantage_check()
{
    const double g = 31.62;
    const double as = std::sqrt(1e-4);
    const double inf = std::numeric_limits<double>::infinity();
    const auto db = [&](int ratio, double depth, dcs::Strategy s) {
        return 10.0 * std::log10(dcs::advantage_factor(ratio / 2, depth, g, as, 1.0, s));
    };
    const double d0_intra = db(10, 0.0, dcs::Strategy::intra_cross);
    const double d0_epr = db(10, 0.0, dcs::Strategy::epr);
    const double r10_intra = db(10, inf, dcs::Strategy::intra_cross);
    const double r10_epr = db(10, inf, dcs::Strategy::epr);
    const double r100_intra = db(100, inf, dcs::Strategy::intra_cross);
    const bool pass = std::abs(d0_intra - 15.0) <= 0.05 && std::abs(d0_epr - 15.0) <= 0.05 &&
                      std::abs(r10_intra - 9.2) <= 0.1 && std::abs(r10_epr + 1.9) <= 0.1 &&
                      std::abs(r100_intra - 13.8497) <= 1e-3;
    return {"dcs_advantage_endpoints",
            pass,
            {{"depth0_intra_db", d0_intra},
             {"depth0_epr_db", d0_epr},
             {"ratio10_intra_db", r10_intra},
             {"ratio10_epr_db", r10_epr},
             {"ratio100_intra_db", r100_intra}}};
}

CheckResult mc_check(const RunConfig& cfg, const ValidationOptions& options)
{
    Rng rng(cfg.seed ^ 0x3c3c3c3c3ULL);
    double worst = 0.0;
    json cases = json::array();
    for (int i = 0; i < cfg.validate.mc_configs; ++i) {
        auto inst = random_dcs_instance(rng, 3);
        stochastic::TraceConfig tc;
        tc.sample_rate = 1e6;
        tc.duration = cfg.validate.mc_duration_s;
        tc.rbw = std::max(100.0, 1.0 / tc.duration);
        tc.seed = cfg.seed + static_cast<std::uint64_t>(i);
        tc.threads = options.threads;
        const auto series = stochastic::sample_photocurrent(inst.setup, inst.spec, inst.sample, tc);
        const auto trace = stochastic::variance_trace(inst.setup, inst.spec, inst.sample,
                                                      stochastic::time_grid(tc.sample_rate, tc.samples()));
        const auto cmp = stochastic::compare_to_trace(series, trace);
        worst = std::max(worst, std::abs(cmp.z_score));
        cases.push_back({{"mode", to_string(inst.spec.mode)},
                         {"frame", to_string(inst.spec.frame)},
                         {"sample_variance", cmp.sample_variance},
                         {"analytic_variance", cmp.analytic_variance},
                         {"z", cmp.z_score}});
    }
    return {"mc_analytic_agreement", worst <= kMcSigmas, {{"max_abs_z", worst}, {"limit", kMcSigmas}, {"cases", cases}}};
}

CheckResult cyclo_check(const RunConfig& cfg, const ValidationOptions& options)
{
    auto preset = stochastic::cyclo_preset();
    const auto times = stochastic::time_grid(preset.trace.sample_rate,
                                             static_cast<std::size_t>(std::llround(
                                                 preset.trace_duration * preset.trace.sample_rate)));
    bool pass = true;
    json per_gain = json::array();
    for (std::size_t i = 0; i < preset.gains.size(); ++i) {
        const double g = preset.gains[i];
        const auto spec = stochastic::cyclo_spec(g);
        const auto clear = dcs::SampleResponse::transparent(preset.setup.signal.n_min, preset.setup.signal.n_max);
        const auto trace = stochastic::variance_trace(preset.setup, spec, clear, times);
        const auto [lo, hi] = std::minmax_element(trace.variance.begin(), trace.variance.end());
        double avg = 0.0;
        for (double v : trace.variance) avg += v;
        avg /= static_cast<double>(trace.variance.size());
        const double e_min = std::abs(*lo - 1.0 / g);
        const double e_max = std::abs(*hi - g);
        const double e_avg = std::abs(avg - 0.5 * (g + 1.0 / g));

        auto tc = preset.trace;
        tc.duration = cfg.validate.cyclo_mc_duration_s;
        tc.seed = cfg.seed + 1000 + i;
        tc.threads = options.threads;
        tc.rbw = std::max(tc.rbw, 1.0 / tc.duration);
        const auto series = stochastic::sample_photocurrent(preset.setup, spec, clear, tc);
        const auto cmp = stochastic::compare_to_trace(
            series, stochastic::variance_trace(preset.setup, spec, clear,
                                               stochastic::time_grid(tc.sample_rate, tc.samples())));
        pass = pass && e_min <= kTraceTolerance && e_max <= kTraceTolerance && e_avg <= kTraceTolerance &&
               std::abs(cmp.z_score) <= kMcSigmas;
        per_gain.push_back({{"gain", g},
                            {"trace_min", *lo},
                            {"trace_max", *hi},
                            {"trace_mean", avg},
                            {"mc_sample_variance", cmp.sample_variance},
                            {"mc_analytic_variance", cmp.analytic_variance},
                            {"mc_z", cmp.z_score}});
    }
    return {"cyclostationary_preset", pass, {{"gains", per_gain}, {"trace_tolerance", kTraceTolerance}}};
}

CheckResult determinism_check(const RunConfig& cfg, const ValidationOptions& options)
{
    Rng rng(cfg.seed ^ 0xde7de7de7ULL);
    bool pass = true;
    for (int i = 0; i < 3; ++i) {
        const auto inst = random_dcs_instance(rng, 4);
        stochastic::TraceConfig tc;
        tc.duration = 0.01;
        tc.seed = cfg.seed + static_cast<std::uint64_t>(i);
        tc.threads = 1;
        const auto a = stochastic::sample_photocurrent(inst.setup, inst.spec, inst.sample, tc);
        const auto b = stochastic::sample_photocurrent(inst.setup, inst.spec, inst.sample, tc);
        tc.threads = std::max(4u, options.threads);
        const auto c = stochastic::sample_photocurrent(inst.setup, inst.spec, inst.sample, tc);
        pass = pass && a.values == b.values && a.values == c.values;
    }
    return {"mc_determinism", pass, {{"runs", 3}}};
}

} // namespace

double relative_error(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

CombEnvelope random_envelope(Rng& rng, bool symmetric)
{
    const double flux = std::pow(10.0, uniform(rng, -2.0, 6.0));
    if (symmetric) {
        switch (uniform_int(rng, 0, 2)) {
        case 0: return make_envelope(Shape::gaussian, uniform(rng, 0.3, 8.0), flux);
        case 1: return make_envelope(Shape::sech, uniform(rng, 0.3, 6.0), flux);
        default: return make_envelope(Shape::flattop, uniform_int(rng, 1, 12), flux);
        }
    }
    const int size = uniform_int(rng, 2, 30);
    const int n_min = uniform_int(rng, -20, 5);
    std::vector<double> amps;
    for (int i = 0; i < size; ++i) amps.push_back(uniform(rng, 0.05, 1.0) * std::sqrt(flux));
    return make_raw_envelope(n_min, amps);
}

OfdInstance random_ofd_instance(Rng& rng)
{
    OfdInstance inst;
    const int kind = uniform_int(rng, 0, 2);
    const bool symmetric = kind == 2 || coin(rng);
    inst.env = random_envelope(rng, symmetric);
    inst.policy = coin(rng) ? ofd::SumPolicy::support_only : ofd::SumPolicy::extended;
    const auto [lo, hi] = ofd::summation_range(inst.env, inst.policy);
    inst.spec.mode = kind == 0 ? StateMode::vacuum : kind == 1 ? StateMode::intra : StateMode::epr;
    inst.spec.axis = coin(rng, 0.8) ? SqueezeAxis::phase : SqueezeAxis::amplitude;
    if (inst.spec.mode != StateMode::vacuum) {
        inst.spec.gains = random_gains(rng, inst.spec.mode == StateMode::epr ? 0 : lo, hi);
    }
    inst.spec.classical = random_classical(rng, lo, hi);
    return inst;
}

PhasedEnvelope random_phases(Rng& rng, const CombEnvelope& env)
{
    std::vector<double> thetas;
    for (std::size_t i = 0; i < env.amps.size(); ++i) thetas.push_back(uniform(rng, -constants::pi, constants::pi));
    return with_phases(env, std::move(thetas));
}

DcsInstance random_dcs_instance(Rng& rng, int max_half_width)
{
    DcsInstance inst;
    const int kind = uniform_int(rng, 0, 2);
    const auto mode = kind == 0 ? StateMode::vacuum : kind == 1 ? StateMode::intra : StateMode::epr;
    const bool symmetric = mode == StateMode::epr || coin(rng, 0.3);
    const int h = uniform_int(rng, 0, max_half_width);
    const int n_min = symmetric ? -h : uniform_int(rng, -max_half_width, 0);
    const int n_max = symmetric ? h : uniform_int(rng, n_min, max_half_width);

    std::vector<double> as, al;
    const double s_scale = std::pow(10.0, uniform(rng, -2.0, 1.0));
    const double l_scale = std::pow(10.0, uniform(rng, 0.0, 2.0));
    for (int n = n_min; n <= n_max; ++n) {
        if (symmetric && n > 0) {
            as.push_back(as[static_cast<std::size_t>(-n - n_min)]);
            al.push_back(al[static_cast<std::size_t>(-n - n_min)]);
        } else {
            as.push_back(s_scale * uniform(rng, 0.1, 1.0));
            al.push_back(l_scale * uniform(rng, 0.1, 1.0));
        }
    }
    inst.setup.signal = make_raw_envelope(n_min, as);
    inst.setup.lo = make_raw_envelope(n_min, al);
    inst.setup.strong_lo = coin(rng);

    const auto frame = mode == StateMode::epr || coin(rng) ? Frame::cross_referred : Frame::self_referred;
    const int key_lo = mode == StateMode::epr ? 0 : n_min;
    inst.spec = QuantumSpec::dcs(mode, frame, random_gains(rng, key_lo, n_max), random_gains(rng, key_lo, n_max));
    if (coin(rng, 0.2)) inst.spec.axis = SqueezeAxis::phase;
    inst.spec.classical = random_classical(rng, n_min, n_max);

    inst.sample = dcs::SampleResponse::transparent(n_min, n_max);
    for (std::size_t i = 0; i < inst.sample.kappas.size(); ++i) {
        const double r = uniform(rng, 0.0, 1.0);
        inst.sample.kappas[i] = r < 0.1 ? 0.0 : r < 0.3 ? 1.0 : uniform(rng, 0.0, 1.0);
        inst.sample.thetas[i] = coin(rng, 0.3) ? 0.0 : uniform(rng, -constants::pi, constants::pi);
    }
    return inst;
}

bool ValidationReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* ValidationReport::find(const std::string& name) const
{
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

nlohmann::json ValidationReport::to_json() const
{
    auto list = json::array();
    for (const auto& c : checks) {
        list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    return {{"schema_version", kSchemaVersion}, {"all_pass", all_pass()}, {"checks", list}};
}

ValidationReport run_validation(const RunConfig& cfg, const ValidationOptions& options)
{
    ValidationReport report;
    report.checks.push_back(ofd_oracle_check(cfg, options));
    report.checks.push_back(dcs_oracle_check(cfg));
    report.checks.push_back(trace_oracle_check(cfg));
    report.checks.push_back(reductions_check(cfg));
    report.checks.push_back(slope_check(options));
    report.checks.push_back(advantage_check());
    report.checks.push_back(mc_check(cfg, options));
    report.checks.push_back(cyclo_check(cfg, options));
    report.checks.push_back(determinism_check(cfg, options));
    return report;
}

} // namespace combnoise::app
