#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "combnoise/constants.hpp"

namespace combnoise {

enum class Shape { gaussian, sech, flattop, raw };

std::string_view to_string(Shape shape);
Shape parse_shape(std::string_view name);

// Relative flux allowed in the discarded tails of a truncated envelope.
inline constexpr double kTailTolerance = 1e-12;

struct CombGrid {
    double omega0 = constants::default_omega0;       // optical carrier (rad/s)
    double omega_rep = constants::default_omega_rep; // line spacing (rad/s)
};

// Classical comb: real line amplitudes alpha_n (sqrt(photons/s)) on the
// contiguous index range [n_min, n_max]. Lines outside the range are empty.
struct CombEnvelope {
    int n_min = 0;
    int n_max = -1;
    std::vector<double> amps;
    CombGrid grid;
    Shape shape = Shape::raw;
    double param = 0.0;

    int size() const { return n_max - n_min + 1; }
    bool contains(int n) const { return n >= n_min && n <= n_max; }
    // alpha_n, zero outside the stored range.
    double amp(int n) const { return contains(n) ? amps[static_cast<std::size_t>(n - n_min)] : 0.0; }
    double total_flux() const;
    // amps[n] == amps[-n] on a range centred on n = 0, up to rel_tol.
    bool is_symmetric(double rel_tol = 0.0) const;
};

// Per-line phases on top of an in-phase envelope; alpha_n = |alpha_n| e^{i theta_n}.
struct PhasedEnvelope {
    CombEnvelope base;
    std::vector<double> thetas; // same indexing as base.amps

    double theta(int n) const { return base.contains(n) ? thetas[static_cast<std::size_t>(n - base.n_min)] : 0.0; }
};

PhasedEnvelope with_phases(CombEnvelope base, std::vector<double> thetas);

// Builds a symmetric archetypal envelope normalized to total_flux.
//   gaussian: alpha_n ~ exp(-n^2 / 4 sigma^2), param = sigma
//   sech:     alpha_n ~ sech(n / Delta),       param = Delta
//   flattop:  alpha_n = const for |n| <= N,    param = N (integer)
// n_cut = 0 picks the smallest cutoff whose discarded tail is below the
// tolerance; an explicit n_cut must itself satisfy it.
CombEnvelope make_envelope(Shape shape, double param, double total_flux, int n_cut = 0,
                           CombGrid grid = {});

// Arbitrary non-negative amplitudes starting at index n_min.
CombEnvelope make_raw_envelope(int n_min, std::vector<double> amps, CombGrid grid = {});

// sqrt(sum n^2 alpha_n^2 / sum alpha_n^2)
double rms_modal_bandwidth(const CombEnvelope& env);

struct ShapeFit {
    double param = 0.0;
    double m_rms = 0.0; // achieved value
};

// Inverts param -> M_rms for a shape family. Continuous families are solved by
// bisection; flat-top returns the integer N with the nearest achievable M_rms.
ShapeFit solve_shape_param(Shape shape, double m_rms_target);

nlohmann::json to_json(const CombEnvelope& env);
CombEnvelope envelope_from_json(const nlohmann::json& j);

} // namespace combnoise
