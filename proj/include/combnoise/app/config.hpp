#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "combnoise/envelope.hpp"
#include "combnoise/ofd.hpp"
#include "combnoise/states.hpp"

namespace combnoise::app {

inline constexpr int kSchemaVersion = 1;

// Bad configuration or command line; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct OfdSweepConfig {
    std::vector<Shape> shapes{Shape::gaussian, Shape::sech, Shape::flattop};
    double m_rms_min = 10.0;
    double m_rms_max = 100.0;
    int points = 25;
    double total_flux_photons_per_s = 1.0;
    ofd::SumPolicy policy = ofd::SumPolicy::support_only;
    StateMode mode = StateMode::vacuum;
    double gain = 1.0;
};

struct DcsAdvantageConfig {
    std::vector<int> ratios{10, 100}; // intact lines 2N
    std::vector<std::string> strategies{"intra-cross", "epr"};
    double gain = 31.62;
    double depth_min_db = 0.0;
    double depth_max_db = 30.0;
    int depth_points = 61;
    double signal_to_lo_flux_ratio = 1e-4; // alpha_S^2 / alpha_L^2
    double lo_flux_per_line_photons_per_s = 1.0;
};

struct CycloConfig {
    std::string preset = "standard"; // "standard" or "none"
    std::vector<double> gains{1.0, 5.0, 10.0};
    double wavelength_m = 1550e-9;
    double power_w = 10e-3;
    int half_width = 50;
    double sigma_lines = 50.0 / 3.0;
    double beat_offset_hz = 100.5e3;
    double delta_rep_hz = 1e3;
    double sample_rate_hz = 1e6;
    double rbw_hz = 100.0;
    double trace_duration_s = 2e-3;
    double mc_duration_s = 1.0;
    std::string frame = "self";
};

struct ValidateConfig {
    int oracle_instances = 1000;
    int mc_configs = 20;
    double mc_duration_s = 0.02;
    double cyclo_mc_duration_s = 0.1;
};

struct RunConfig {
    std::uint64_t seed = 20240601;
    std::string format = "csv";
    OfdSweepConfig ofd_sweep;
    DcsAdvantageConfig dcs_advantage;
    CycloConfig cyclo_trace;
    ValidateConfig validate;
};

nlohmann::json to_json(const RunConfig& cfg);

// Missing keys take defaults, unknown keys are rejected. A manifest written
// by a previous run is accepted too (its resolved_config block is used).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

} // namespace combnoise::app
