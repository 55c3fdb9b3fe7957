#include "combnoise/app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "combnoise/app/output.hpp"
#include "combnoise/dcs.hpp"
#include "combnoise/errors.hpp"
#include "combnoise/ofd.hpp"
#include "combnoise/stochastic.hpp"

namespace combnoise::app {

namespace {

using nlohmann::json;

json manifest(const std::string& command, const RunConfig& cfg, const OutputSink& sink, json results)
{
    return json{{"schema_version", kSchemaVersion},
                {"command", command},
                {"resolved_config", to_json(cfg)},
                {"outputs", sink.written()},
                {"results", std::move(results)}};
}

CommandResult finish(const std::string& command, const RunConfig& cfg, OutputSink& sink, json results,
                     int exit_code = exit_ok)
{
    CommandResult r;
    r.exit_code = exit_code;
    r.manifest = manifest(command, cfg, sink, std::move(results));
    sink.write_json("manifest.json", r.manifest);
    r.files = sink.written();
    return r;
}

QuantumSpec ofd_spec(const OfdSweepConfig& c)
{
    switch (c.mode) {
    case StateMode::intra: return QuantumSpec::ofd_intra(GainProfile::constant(c.gain));
    case StateMode::epr: return QuantumSpec::ofd_epr(GainProfile::constant(c.gain));
    default: return QuantumSpec::vacuum();
    }
}

std::vector<double> linspace(double lo, double hi, int points)
{
    std::vector<double> v;
    for (int i = 0; i < points; ++i) {
        v.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
    }
    return v;
}

std::string gain_label(double g)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", g);
    return buf;
}

dcs::DcsSetup cyclo_setup(const CycloConfig& c)
{
    dcs::DcsSetup setup;
    if (c.preset == "standard") {
        setup = stochastic::cyclo_preset().setup;
    } else {
        const CombGrid grid{constants::two_pi * constants::speed_of_light / c.wavelength_m, constants::two_pi * 1e9};
        const double flux = c.power_w / (constants::hbar * grid.omega0);
        std::vector<double> amps;
        double sum = 0.0;
        for (int n = -c.half_width; n <= c.half_width; ++n) {
            const double x = static_cast<double>(n);
            amps.push_back(std::exp(-x * x / (2.0 * c.sigma_lines * c.sigma_lines)));
            sum += amps.back() * amps.back();
        }
        for (double& a : amps) a *= std::sqrt(flux / sum);
        setup.signal = make_raw_envelope(-c.half_width, amps, grid);
        setup.lo = setup.signal;
        setup.strong_lo = true;
    }
    setup.omega_offset = constants::two_pi * c.beat_offset_hz;
    setup.delta_rep = constants::two_pi * c.delta_rep_hz;
    return setup;
}

} // namespace

CommandResult run_ofd_sweep(const RunConfig& cfg, const CommandOptions& options)
{
    const auto& c = cfg.ofd_sweep;
    ofd::SweepRequest req;
    req.shapes = c.shapes;
    req.m_rms_min = c.m_rms_min;
    req.m_rms_max = c.m_rms_max;
    req.points = c.points;
    req.total_flux = c.total_flux_photons_per_s;
    req.spec = ofd_spec(c);
    req.policy = c.policy;
    req.threads = options.threads;
    const auto rows = ofd::ratio_sweep(req);

    Table table{{"shape", "param", "M_rms", "R", "eta", "policy"}, {}};
    double max_r = 0.0;
    for (const auto& r : rows) {
        table.rows.push_back({std::string(to_string(r.shape)), r.param, r.m_rms, r.ratio, r.eta,
                              ofd::to_string(r.policy)});
        max_r = std::max(max_r, r.ratio);
    }
    json slopes = json::object();
    for (Shape s : c.shapes) {
        try {
            slopes[std::string(to_string(s))] = ofd::loglog_slope(rows, s);
        } catch (const NumericError&) {
            slopes[std::string(to_string(s))] = nullptr; // single distinct grid point
        }
    }

    OutputSink sink(options.out_dir, cfg.format);
    sink.write_table("sweep", table);
    return finish("ofd-sweep", cfg, sink,
                  {{"slopes", slopes}, {"max_ratio", max_r}, {"all_ratios_below_one", max_r < 1.0}});
}

CommandResult run_dcs_advantage(const RunConfig& cfg, const CommandOptions& options)
{
    const auto& c = cfg.dcs_advantage;
    const double al = std::sqrt(c.lo_flux_per_line_photons_per_s);
    const double as = std::sqrt(c.signal_to_lo_flux_ratio * c.lo_flux_per_line_photons_per_s);
    const auto depths = linspace(c.depth_min_db, c.depth_max_db, c.depth_points);
    const double inf = std::numeric_limits<double>::infinity();

    Table table{{"depth_db", "strategy", "ratio", "G_db", "advantage_db"}, {}};
    json summary = json::array();
    double worst_crosscheck = 0.0;
    for (int ratio : c.ratios) {
        const int pairs = ratio / 2;
        for (const auto& name : c.strategies) {
            const auto strategy = dcs::parse_strategy(name);
            for (const auto& p : dcs::advantage_curve(pairs, depths, c.gain, as, al, strategy, options.threads)) {
                table.rows.push_back({p.depth_db, dcs::to_string(p.strategy), static_cast<long long>(p.ratio), p.g_db,
                                      p.advantage_db});
            }
            // The closed forms against the full photocurrent PSD of the same
            // flat-top setup with the absorber on line +1.
            const auto setup = dcs::flattop_setup(pairs, as, al, false);
            const auto mode = strategy == dcs::Strategy::epr ? StateMode::epr : StateMode::intra;
            const auto gain = GainProfile::constant(c.gain);
            for (double depth : {0.0, 10.0, inf}) {
                const auto sample = dcs::localized_absorber(-pairs, pairs, 1, depth);
                const double base = dcs::photocurrent_psd(setup, QuantumSpec::vacuum(), sample).value;
                const double enhanced =
                    dcs::photocurrent_psd(setup, QuantumSpec::dcs(mode, Frame::cross_referred, gain, gain), sample)
                        .value;
                const double closed = dcs::advantage_factor(pairs, depth, c.gain, as, al, strategy);
                worst_crosscheck = std::max(worst_crosscheck, std::abs(base / enhanced - closed) / closed);
            }
            summary.push_back(
                {{"ratio", ratio},
                 {"strategy", dcs::to_string(strategy)},
                 {"depth0_advantage_db", 10.0 * std::log10(dcs::advantage_factor(pairs, 0.0, c.gain, as, al, strategy))},
                 {"full_absorption_advantage_db",
                  10.0 * std::log10(dcs::advantage_factor(pairs, inf, c.gain, as, al, strategy))}});
        }
    }

    OutputSink sink(options.out_dir, cfg.format);
    sink.write_table("advantage", table);
    return finish("dcs-advantage", cfg, sink,
                  {{"curves", summary}, {"gain_db", 10.0 * std::log10(c.gain)},
                   {"psd_crosscheck_max_rel", worst_crosscheck}});
}

CommandResult run_cyclo_trace(const RunConfig& cfg, const CommandOptions& options)
{
    const auto& c = cfg.cyclo_trace;
    const auto setup = cyclo_setup(c);
    const auto frame = parse_frame(c.frame);
    const auto clear = dcs::SampleResponse::transparent(setup.signal.n_min, setup.signal.n_max);
    const auto count = static_cast<std::size_t>(std::llround(c.trace_duration_s * c.sample_rate_hz));
    if (count == 0) {
        throw UsageError("cyclo_trace: trace shorter than one sample");
    }
    const auto times = stochastic::time_grid(c.sample_rate_hz, count);

    OutputSink sink(options.out_dir, cfg.format);
    json per_gain = json::array();
    for (std::size_t i = 0; i < c.gains.size(); ++i) {
        const double g = c.gains[i];
        const auto spec =
            QuantumSpec::dcs(StateMode::intra, frame, GainProfile::constant(g), GainProfile::constant(1.0));
        const auto trace = stochastic::variance_trace(setup, spec, clear, times);
        Table t{{"t_us", "mean_I", "var_I"}, {}};
        double lo = trace.variance.front(), hi = lo, sum = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            t.rows.push_back({times[k] * 1e6, trace.mean[k], trace.variance[k]});
            lo = std::min(lo, trace.variance[k]);
            hi = std::max(hi, trace.variance[k]);
            sum += trace.variance[k];
        }
        const auto label = gain_label(g);
        sink.write_table("trace_G" + label, t);

        json entry{{"gain", g},
                   {"trace_min", lo},
                   {"trace_max", hi},
                   {"trace_mean", sum / static_cast<double>(count)},
                   {"expected_bounds", {1.0 / g, g}},
                   {"expected_mean", frame == Frame::self_referred ? 0.5 * (g + 1.0 / g) : 1.0 / g},
                   {"variance_scale_a2_per_hz", trace.variance_scale},
                   {"mean_scale_a", trace.mean_scale}};

        if (c.mc_duration_s > 0.0) {
            stochastic::TraceConfig tc;
            tc.sample_rate = c.sample_rate_hz;
            tc.duration = c.mc_duration_s;
            tc.rbw = c.rbw_hz;
            tc.seed = cfg.seed + i;
            tc.threads = options.threads;
            const auto series = stochastic::sample_photocurrent(setup, spec, clear, tc);
            const auto psd = stochastic::estimate_psd(series.values, tc.sample_rate, tc.rbw);
            Table p{{"f_hz", "psd", "ci_lo", "ci_hi"}, {}};
            for (std::size_t b = 0; b < psd.freq.size(); ++b) {
                p.rows.push_back({psd.freq[b], psd.psd[b], psd.ci_lo[b], psd.ci_hi[b]});
            }
            sink.write_table("psd_G" + label, p);
            const auto full = stochastic::variance_trace(setup, spec, clear,
                                                         stochastic::time_grid(tc.sample_rate, tc.samples()));
            const auto cmp = stochastic::compare_to_trace(series, full);
            entry["mc"] = {{"seed", tc.seed},
                           {"samples", tc.samples()},
                           {"segments", psd.segments},
                           {"sample_variance", cmp.sample_variance},
                           {"analytic_variance", cmp.analytic_variance},
                           {"standard_error", cmp.standard_error},
                           {"z", cmp.z_score}};
        }
        per_gain.push_back(entry);
    }
    return finish("cyclo-trace", cfg, sink,
                  {{"gains", per_gain}, {"units", "variance normalized to the vacuum PSD, mean to 2 q_e sum alpha_S alpha_L"}});
}

CommandResult run_validate(const RunConfig& cfg, const CommandOptions& options)
{
    auto vopts = options.validation;
    vopts.threads = options.threads;
    const auto report = run_validation(cfg, vopts);
    OutputSink sink(options.out_dir, cfg.format);
    sink.write_json("validation_report.json", report.to_json());
    json summary = json::object();
    for (const auto& c : report.checks) summary[c.name] = c.pass;
    return finish("validate", cfg, sink, {{"all_pass", report.all_pass()}, {"checks", summary}},
                  report.all_pass() ? exit_ok : exit_validation);
}

int run_command(const std::string& command, const RunConfig& cfg, const CommandOptions& options)
{
    try {
        CommandResult r;
        if (command == "ofd-sweep") {
            r = run_ofd_sweep(cfg, options);
        } else if (command == "dcs-advantage") {
            r = run_dcs_advantage(cfg, options);
        } else if (command == "cyclo-trace") {
            r = run_cyclo_trace(cfg, options);
        } else if (command == "validate") {
            r = run_validate(cfg, options);
            if (r.exit_code != exit_ok) {
                std::cerr << "combnoise: validation failed, see validation_report.json\n";
            }
        } else {
            std::cerr << "combnoise: unknown command '" << command << "'\n";
            return exit_usage;
        }
        return r.exit_code;
    } catch (const UsageError& e) {
        std::cerr << "combnoise: " << e.what() << '\n';
        return exit_usage;
    } catch (const DomainError& e) {
        std::cerr << "combnoise: " << e.what() << '\n';
        return exit_usage;
    } catch (const ContractError& e) {
        std::cerr << "combnoise: " << e.what() << '\n';
        return exit_usage;
    } catch (const NumericError& e) {
        std::cerr << "combnoise: numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "combnoise: " << e.what() << '\n';
        return exit_io;
    }
}

} // namespace combnoise::app
