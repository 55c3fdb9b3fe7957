#include "combnoise/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "combnoise/dcs.hpp"
#include "combnoise/errors.hpp"

namespace combnoise::app {

namespace {

using nlohmann::json;

// Reads the keys of one config block and rejects anything it does not know.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw UsageError(path_ + ": expected a JSON object");
        }
    }

    template <class T>
    void read(const char* key, T& out)
    {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) {
            return;
        }
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw UsageError(path_ + "." + key + ": " + e.what());
        }
    }

    const json* child(const char* key)
    {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw UsageError(path_ + ": unknown key '" + key + "'");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw UsageError(message);
    }
}

template <class F>
auto translate(F&& f)
{
    try {
        return f();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

void parse(const json& j, OfdSweepConfig& c)
{
    Block b(j, "ofd_sweep");
    std::vector<std::string> shapes;
    for (auto s : c.shapes) shapes.emplace_back(to_string(s));
    b.read("shapes", shapes);
    std::string policy = ofd::to_string(c.policy);
    std::string mode = to_string(c.mode);
    b.read("m_rms_min", c.m_rms_min);
    b.read("m_rms_max", c.m_rms_max);
    b.read("points", c.points);
    b.read("total_flux_photons_per_s", c.total_flux_photons_per_s);
    b.read("policy", policy);
    b.read("mode", mode);
    b.read("gain", c.gain);
    b.finish();

    c.shapes.clear();
    for (const auto& s : shapes) {
        const Shape shape = translate([&] { return parse_shape(s); });
        require(shape != Shape::raw, "ofd_sweep.shapes: 'raw' is not a sweepable family");
        c.shapes.push_back(shape);
    }
    c.policy = translate([&] { return ofd::parse_sum_policy(policy); });
    c.mode = translate([&] { return parse_state_mode(mode); });
    require(!c.shapes.empty(), "ofd_sweep.shapes: empty shape list");
    require(c.points >= 1, "ofd_sweep.points must be >= 1");
    require(c.m_rms_min > 0.0 && c.m_rms_max >= c.m_rms_min && std::isfinite(c.m_rms_max),
            "ofd_sweep: need 0 < m_rms_min <= m_rms_max");
    require(c.total_flux_photons_per_s > 0.0, "ofd_sweep.total_flux_photons_per_s must be positive");
    require(c.gain >= 1.0 && std::isfinite(c.gain), "ofd_sweep.gain must be >= 1");
}

void parse(const json& j, DcsAdvantageConfig& c)
{
    Block b(j, "dcs_advantage");
    b.read("ratios", c.ratios);
    b.read("strategies", c.strategies);
    b.read("gain", c.gain);
    b.read("depth_min_db", c.depth_min_db);
    b.read("depth_max_db", c.depth_max_db);
    b.read("depth_points", c.depth_points);
    b.read("signal_to_lo_flux_ratio", c.signal_to_lo_flux_ratio);
    b.read("lo_flux_per_line_photons_per_s", c.lo_flux_per_line_photons_per_s);
    b.finish();

    require(!c.ratios.empty(), "dcs_advantage.ratios: empty list");
    for (int r : c.ratios) {
        require(r >= 2 && r % 2 == 0, "dcs_advantage.ratios: intact-line counts must be even and >= 2");
    }
    require(!c.strategies.empty(), "dcs_advantage.strategies: empty list");
    for (const auto& s : c.strategies) {
        translate([&] { return dcs::parse_strategy(s); });
    }
    require(c.gain >= 1.0 && std::isfinite(c.gain), "dcs_advantage.gain must be >= 1");
    require(c.depth_min_db >= 0.0 && c.depth_max_db >= c.depth_min_db && std::isfinite(c.depth_max_db),
            "dcs_advantage: need 0 <= depth_min_db <= depth_max_db");
    require(c.depth_points >= 1, "dcs_advantage.depth_points must be >= 1");
    require(c.signal_to_lo_flux_ratio > 0.0, "dcs_advantage.signal_to_lo_flux_ratio must be positive");
    require(c.lo_flux_per_line_photons_per_s > 0.0, "dcs_advantage.lo_flux_per_line_photons_per_s must be positive");
}

void parse(const json& j, CycloConfig& c)
{
    Block b(j, "cyclo_trace");
    b.read("preset", c.preset);
    require(c.preset == "standard" || c.preset == "none", "cyclo_trace.preset must be 'standard' or 'none'");
    const CycloConfig preset;
    const auto fixed = [&](const char* key, auto& field) {
        const auto before = field;
        b.read(key, field);
        if (c.preset == "standard" && field != before) {
            throw UsageError(std::string("cyclo_trace.") + key + " conflicts with preset 'standard'");
        }
    };
    fixed("wavelength_m", c.wavelength_m);
    fixed("power_w", c.power_w);
    fixed("half_width", c.half_width);
    fixed("sigma_lines", c.sigma_lines);
    b.read("gains", c.gains);
    b.read("beat_offset_hz", c.beat_offset_hz);
    b.read("delta_rep_hz", c.delta_rep_hz);
    b.read("sample_rate_hz", c.sample_rate_hz);
    b.read("rbw_hz", c.rbw_hz);
    b.read("trace_duration_s", c.trace_duration_s);
    b.read("mc_duration_s", c.mc_duration_s);
    b.read("frame", c.frame);
    b.finish();

    require(!c.gains.empty(), "cyclo_trace.gains: empty list");
    for (double g : c.gains) {
        require(g >= 1.0 && std::isfinite(g), "cyclo_trace.gains must be >= 1");
    }
    translate([&] { return parse_frame(c.frame); });
    require(c.wavelength_m > 0.0 && c.power_w > 0.0 && c.half_width >= 1 && c.sigma_lines > 0.0,
            "cyclo_trace: comb parameters must be positive");
    require(c.sample_rate_hz > 0.0 && c.rbw_hz > 0.0 && c.trace_duration_s > 0.0 && c.mc_duration_s >= 0.0,
            "cyclo_trace: sampling parameters must be positive");
    require(c.delta_rep_hz > 0.0, "cyclo_trace.delta_rep_hz must be positive");
}

void parse(const json& j, ValidateConfig& c)
{
    Block b(j, "validate");
    b.read("oracle_instances", c.oracle_instances);
    b.read("mc_configs", c.mc_configs);
    b.read("mc_duration_s", c.mc_duration_s);
    b.read("cyclo_mc_duration_s", c.cyclo_mc_duration_s);
    b.finish();
    require(c.oracle_instances >= 1 && c.mc_configs >= 1, "validate: instance counts must be >= 1");
    require(c.mc_duration_s > 0.0 && c.cyclo_mc_duration_s > 0.0, "validate: MC durations must be positive");
}

} // namespace

nlohmann::json to_json(const RunConfig& cfg)
{
    json shapes = json::array();
    for (auto s : cfg.ofd_sweep.shapes) shapes.push_back(std::string(to_string(s)));
    const auto& o = cfg.ofd_sweep;
    const auto& d = cfg.dcs_advantage;
    const auto& c = cfg.cyclo_trace;
    const auto& v = cfg.validate;
    return json{
        {"schema_version", kSchemaVersion},
        {"seed", cfg.seed},
        {"format", cfg.format},
        {"ofd_sweep",
         {{"shapes", shapes},
          {"m_rms_min", o.m_rms_min},
          {"m_rms_max", o.m_rms_max},
          {"points", o.points},
          {"total_flux_photons_per_s", o.total_flux_photons_per_s},
          {"policy", ofd::to_string(o.policy)},
          {"mode", to_string(o.mode)},
          {"gain", o.gain}}},
        {"dcs_advantage",
         {{"ratios", d.ratios},
          {"strategies", d.strategies},
          {"gain", d.gain},
          {"depth_min_db", d.depth_min_db},
          {"depth_max_db", d.depth_max_db},
          {"depth_points", d.depth_points},
          {"signal_to_lo_flux_ratio", d.signal_to_lo_flux_ratio},
          {"lo_flux_per_line_photons_per_s", d.lo_flux_per_line_photons_per_s}}},
        {"cyclo_trace",
         {{"preset", c.preset},
          {"gains", c.gains},
          {"wavelength_m", c.wavelength_m},
          {"power_w", c.power_w},
          {"half_width", c.half_width},
          {"sigma_lines", c.sigma_lines},
          {"beat_offset_hz", c.beat_offset_hz},
          {"delta_rep_hz", c.delta_rep_hz},
          {"sample_rate_hz", c.sample_rate_hz},
          {"rbw_hz", c.rbw_hz},
          {"trace_duration_s", c.trace_duration_s},
          {"mc_duration_s", c.mc_duration_s},
          {"frame", c.frame}}},
        {"validate",
         {{"oracle_instances", v.oracle_instances},
          {"mc_configs", v.mc_configs},
          {"mc_duration_s", v.mc_duration_s},
          {"cyclo_mc_duration_s", v.cyclo_mc_duration_s}}},
    };
}

RunConfig config_from_json(const nlohmann::json& input)
{
    const json& j = input.contains("resolved_config") ? input.at("resolved_config") : input;
    RunConfig cfg;
    Block b(j, "config");
    int version = kSchemaVersion;
    b.read("schema_version", version);
    require(version == kSchemaVersion, "config: unsupported schema_version " + std::to_string(version));
    b.read("seed", cfg.seed);
    b.read("format", cfg.format);
    require(cfg.format == "csv" || cfg.format == "json", "config.format must be 'csv' or 'json'");
    if (const auto* x = b.child("ofd_sweep")) parse(*x, cfg.ofd_sweep);
    if (const auto* x = b.child("dcs_advantage")) parse(*x, cfg.dcs_advantage);
    if (const auto* x = b.child("cyclo_trace")) parse(*x, cfg.cyclo_trace);
    if (const auto* x = b.child("validate")) parse(*x, cfg.validate);
    // Manifest-only keys.
    b.child("command");
    b.child("outputs");
    b.child("results");
    b.child("resolved_config");
    b.finish();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace combnoise::app
