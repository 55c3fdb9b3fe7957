#include "combnoise/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "combnoise/errors.hpp"

namespace combnoise {

namespace {

// Hard ceiling on the half-width of a generated envelope.
constexpr int kMaxHalfWidth = 20'000'000;

// Auto-selected cutoffs leave a tail a decade below the public tolerance.
constexpr double kAutoTailTarget = 0.1 * kTailTolerance;

constexpr double kMinContinuousParam = 1e-3;
constexpr double kMaxContinuousParam = 1e5;

double profile(Shape shape, double param, int n)
{
    const double x = static_cast<double>(n);
    switch (shape) {
    case Shape::gaussian:
        return std::exp(-x * x / (4.0 * param * param));
    case Shape::sech:
        return 1.0 / std::cosh(x / param);
    default:
        throw ContractError("profile: not a continuous shape");
    }
}

void check_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string("make_envelope: ") + what + " must be positive and finite");
    }
}

CombEnvelope finish(int n_min, std::vector<double> amps, double total_flux, CombGrid grid,
                    Shape shape, double param)
{
    const double sum = std::accumulate(amps.begin(), amps.end(), 0.0,
                                       [](double acc, double a) { return acc + a * a; });
    const double scale = std::sqrt(total_flux / sum);
    for (double& a : amps) {
        a *= scale;
    }
    CombEnvelope env;
    env.n_min = n_min;
    env.n_max = n_min + static_cast<int>(amps.size()) - 1;
    env.amps = std::move(amps);
    env.grid = grid;
    env.shape = shape;
    env.param = param;
    return env;
}

// One-sided samples f_0, f_1, ... of the unnormalized profile, stopped once the
// remaining terms are negligible against the double-precision total.
std::vector<double> half_profile(Shape shape, double param)
{
    std::vector<double> half;
    const double f0 = profile(shape, param, 0);
    half.push_back(f0);
    for (int n = 1;; ++n) {
        if (n > kMaxHalfWidth) {
            throw NumericError("make_envelope: envelope wider than supported range");
        }
        const double f = profile(shape, param, n);
        if (f * f < 1e-40 * f0 * f0) {
            break;
        }
        half.push_back(f);
    }
    return half;
}

} // namespace

std::string_view to_string(Shape shape)
{
    switch (shape) {
    case Shape::gaussian: return "gaussian";
    case Shape::sech: return "sech";
    case Shape::flattop: return "flattop";
    case Shape::raw: return "raw";
    }
    return "raw";
}

Shape parse_shape(std::string_view name)
{
    if (name == "gaussian") return Shape::gaussian;
    if (name == "sech") return Shape::sech;
    if (name == "flattop" || name == "flat-top") return Shape::flattop;
    if (name == "raw") return Shape::raw;
    throw DomainError("unknown envelope shape '" + std::string(name) + "'");
}

double CombEnvelope::total_flux() const
{
    double sum = 0.0;
    for (double a : amps) {
        sum += a * a;
    }
    return sum;
}

bool CombEnvelope::is_symmetric(double rel_tol) const
{
    if (n_min != -n_max) {
        return false;
    }
    for (int n = 1; n <= n_max; ++n) {
        const double a = amp(n);
        const double b = amp(-n);
        if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) {
            return false;
        }
    }
    return true;
}

PhasedEnvelope with_phases(CombEnvelope base, std::vector<double> thetas)
{
    if (static_cast<int>(thetas.size()) != base.size()) {
        throw ContractError("with_phases: one phase per line required");
    }
    return PhasedEnvelope{std::move(base), std::move(thetas)};
}

CombEnvelope make_envelope(Shape shape, double param, double total_flux, int n_cut, CombGrid grid)
{
    check_positive(param, "shape parameter");
    check_positive(total_flux, "total flux");
    if (n_cut < 0) {
        throw DomainError("make_envelope: n_cut must be non-negative");
    }

    if (shape == Shape::flattop) {
        if (param != std::floor(param) || param > kMaxHalfWidth) {
            throw DomainError("make_envelope: flat-top half-width must be an integer");
        }
        const int half = static_cast<int>(param);
        if (n_cut != 0 && n_cut < half) {
            throw DomainError("make_envelope: n_cut truncates the flat-top support");
        }
        return finish(-half, std::vector<double>(static_cast<std::size_t>(2 * half + 1), 1.0),
                      total_flux, grid, shape, param);
    }
    if (shape == Shape::raw) {
        throw DomainError("make_envelope: use make_raw_envelope for raw amplitudes");
    }

    const std::vector<double> half = half_profile(shape, param);
    // tail[n] = flux carried by lines with |k| > n
    std::vector<double> tail(half.size(), 0.0);
    for (std::size_t k = half.size() - 1; k > 0; --k) {
        tail[k - 1] = tail[k] + 2.0 * half[k] * half[k];
    }
    const double total = half[0] * half[0] + tail[0];

    int cut = n_cut;
    if (cut == 0) {
        cut = static_cast<int>(half.size()) - 1;
        for (std::size_t k = 0; k < half.size(); ++k) {
            if (tail[k] < kAutoTailTarget * total) {
                cut = static_cast<int>(k);
                break;
            }
        }
    } else {
        const double discarded = static_cast<std::size_t>(cut) < tail.size()
                                     ? tail[static_cast<std::size_t>(cut)]
                                     : 0.0;
        if (discarded >= kTailTolerance * total) {
            throw DomainError("make_envelope: n_cut discards more than the tail tolerance");
        }
    }

    std::vector<double> amps(static_cast<std::size_t>(2 * cut + 1), 0.0);
    for (int n = 0; n <= cut; ++n) {
        const double f = static_cast<std::size_t>(n) < half.size() ? half[static_cast<std::size_t>(n)] : 0.0;
        amps[static_cast<std::size_t>(cut + n)] = f;
        amps[static_cast<std::size_t>(cut - n)] = f;
    }
    return finish(-cut, std::move(amps), total_flux, grid, shape, param);
}

CombEnvelope make_raw_envelope(int n_min, std::vector<double> amps, CombGrid grid)
{
    if (amps.empty()) {
        throw DomainError("make_raw_envelope: no lines");
    }
    double flux = 0.0;
    for (double a : amps) {
        if (!std::isfinite(a) || a < 0.0) {
            throw DomainError("make_raw_envelope: amplitudes must be finite and non-negative");
        }
        flux += a * a;
    }
    if (!(flux > 0.0) || !std::isfinite(flux)) {
        throw DomainError("make_raw_envelope: total flux must be positive and finite");
    }
    CombEnvelope env;
    env.n_min = n_min;
    env.n_max = n_min + static_cast<int>(amps.size()) - 1;
    env.amps = std::move(amps);
    env.grid = grid;
    env.shape = Shape::raw;
    env.param = 0.0;
    return env;
}

double rms_modal_bandwidth(const CombEnvelope& env)
{
    double weighted = 0.0;
    double flux = 0.0;
    for (int n = env.n_min; n <= env.n_max; ++n) {
        const double a2 = env.amp(n) * env.amp(n);
        weighted += static_cast<double>(n) * static_cast<double>(n) * a2;
        flux += a2;
    }
    if (!(flux > 0.0)) {
        throw DomainError("rms_modal_bandwidth: envelope carries no flux");
    }
    return std::sqrt(weighted / flux);
}

ShapeFit solve_shape_param(Shape shape, double m_rms_target)
{
    if (!(m_rms_target > 0.0) || !std::isfinite(m_rms_target)) {
        throw DomainError("solve_shape_param: target M_rms must be positive");
    }

    if (shape == Shape::flattop) {
        const auto m_of = [](int n) { return std::sqrt(n * (n + 1.0) / 3.0); };
        const double real_n = 0.5 * (std::sqrt(1.0 + 12.0 * m_rms_target * m_rms_target) - 1.0);
        if (real_n > kMaxHalfWidth) {
            throw NumericError("solve_shape_param: flat-top target out of range");
        }
        const int lo = std::max(1, static_cast<int>(std::floor(real_n)));
        const int hi = std::max(1, static_cast<int>(std::ceil(real_n)));
        const int best =
            std::abs(m_of(hi) - m_rms_target) < std::abs(m_of(lo) - m_rms_target) ? hi : lo;
        return {static_cast<double>(best), m_of(best)};
    }
    if (shape != Shape::gaussian && shape != Shape::sech) {
        throw DomainError("solve_shape_param: shape has no parameter family");
    }

    const auto m_of = [shape](double p) { return rms_modal_bandwidth(make_envelope(shape, p, 1.0)); };

    double lo = kMinContinuousParam;
    double hi = 1.0;
    if (m_rms_target <= m_of(lo)) {
        return {lo, m_of(lo)};
    }
    while (m_of(hi) < m_rms_target) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxContinuousParam) {
            throw NumericError("solve_shape_param: no bracketing interval for target");
        }
    }
    // Bisect to the resolution of double precision (well below 1e-9 absolute).
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (m_of(mid) < m_rms_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double m_lo = m_of(lo);
    const double m_hi = m_of(hi);
    return std::abs(m_hi - m_rms_target) < std::abs(m_lo - m_rms_target) ? ShapeFit{hi, m_hi}
                                                                         : ShapeFit{lo, m_lo};
}

nlohmann::json to_json(const CombEnvelope& env)
{
    return nlohmann::json{
        {"shape", std::string(to_string(env.shape))},
        {"param", env.param},
        {"n_min", env.n_min},
        {"n_max", env.n_max},
        {"omega0", env.grid.omega0},
        {"omega_rep", env.grid.omega_rep},
        {"amps", env.amps},
    };
}

CombEnvelope envelope_from_json(const nlohmann::json& j)
{
    CombGrid grid{j.at("omega0").get<double>(), j.at("omega_rep").get<double>()};
    auto env = make_raw_envelope(j.at("n_min").get<int>(), j.at("amps").get<std::vector<double>>(), grid);
    if (env.n_max != j.at("n_max").get<int>()) {
        throw ContractError("envelope_from_json: n_max inconsistent with amps");
    }
    env.shape = parse_shape(j.at("shape").get<std::string>());
    env.param = j.at("param").get<double>();
    return env;
}

} // namespace combnoise
