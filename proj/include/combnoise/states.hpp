#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace combnoise {

enum class StateMode { vacuum, intra, epr };

// Quadrature reference frame for DCS: relative to each comb's own carriers
// (self) or co-rotating with the other comb at the beat frequencies (cross).
enum class Frame { self_referred, cross_referred };

// Which single-line quadrature a squeezer reduces. OFD reads the phase
// quadrature, DCS reads the (cross-referred) amplitude quadrature.
enum class SqueezeAxis { phase, amplitude };

std::string to_string(StateMode mode);
std::string to_string(Frame frame);
std::string to_string(SqueezeAxis axis);
StateMode parse_state_mode(const std::string& name);
Frame parse_frame(const std::string& name);
SqueezeAxis parse_squeeze_axis(const std::string& name);

// Power squeezing gains G >= 1 keyed by line index (intra) or pair index (epr,
// where key 0 is the central line). Keys not listed take the uniform value.
struct GainProfile {
    double uniform = 1.0;
    std::map<int, double> overrides;

    double at(int key) const
    {
        const auto it = overrides.find(key);
        return it == overrides.end() ? uniform : it->second;
    }
    static GainProfile constant(double g) { return GainProfile{g, {}}; }
};

// White classical quadrature noise added per line, in the same
// symmetrized-PSD units as the quantum variances (vacuum = 1/2).
struct ClassicalNoise {
    std::map<int, double> s_qq;
    std::map<int, double> s_pp;

    double qq(int n) const
    {
        const auto it = s_qq.find(n);
        return it == s_qq.end() ? 0.0 : it->second;
    }
    double pp(int n) const
    {
        const auto it = s_pp.find(n);
        return it == s_pp.end() ? 0.0 : it->second;
    }
    bool empty() const { return s_qq.empty() && s_pp.empty(); }
};

struct QuantumSpec {
    StateMode mode = StateMode::vacuum;
    Frame frame = Frame::cross_referred;
    SqueezeAxis axis = SqueezeAxis::phase;
    GainProfile gains;
    // Gains of the DCS local-oscillator comb; same mode as the signal comb.
    GainProfile lo_gains;
    ClassicalNoise classical;

    static QuantumSpec vacuum() { return {}; }
    static QuantumSpec ofd_intra(GainProfile g);
    static QuantumSpec ofd_epr(GainProfile g);
    static QuantumSpec dcs(StateMode mode, Frame frame, GainProfile signal, GainProfile lo = {});
};

// Throws DomainError for gains < 1 or negative classical PSDs.
void validate(const QuantumSpec& spec);

// Single-line quadrature variances (symmetrized PSD, vacuum = 1/2) of a line
// squeezed with gain g along the given axis.
struct LineVariances {
    double qq = 0.5;
    double pp = 0.5;
};
LineVariances squeezed_line(double g, SqueezeAxis axis);

struct ModeLabel {
    int comb = 0; // 0 = single comb / DCS signal, 1 = DCS local oscillator
    int line = 0;
    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

// Covariance of the quadrature fluctuations over a list of modes, basis
// (q_0, p_0, q_1, p_1, ...) in mode order. Entries are symmetrized PSDs.
class CovarianceModel {
public:
    CovarianceModel() = default;
    CovarianceModel(std::vector<ModeLabel> modes, Eigen::MatrixXd matrix);

    const std::vector<ModeLabel>& modes() const { return modes_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    Eigen::MatrixXd& matrix() { return matrix_; }
    Eigen::Index dimension() const { return matrix_.rows(); }

    bool has(int comb, int line) const;
    Eigen::Index q_index(int line, int comb = 0) const;
    Eigen::Index p_index(int line, int comb = 0) const { return q_index(line, comb) + 1; }

    double min_eigenvalue() const;
    // det of the 2x2 block of one mode; >= 1/4 for a physical state.
    double block_determinant(int line, int comb = 0) const;

    // Block-diagonal concatenation (independent subsystems).
    static CovarianceModel direct_sum(const CovarianceModel& a, const CovarianceModel& b);

    // Debug dump: header row of labels, then one row per matrix row.
    void write_csv(const std::string& path) const;

private:
    std::vector<ModeLabel> modes_;
    Eigen::MatrixXd matrix_;
};

// Covariance of a comb prepared according to spec over lines [n_min, n_max].
// comb tags the modes (0 signal, 1 local oscillator).
CovarianceModel build_covariance(int n_min, int n_max, const QuantumSpec& spec, int comb = 0);

// Local-oscillator counterpart of spec: same mode and axis, lo_gains, no classical noise.
QuantumSpec lo_state(const QuantumSpec& spec);

// w^T Sigma w
double quadratic_form_variance(const CovarianceModel& cov, std::span<const double> weights);

// Adds white classical PSDs to the diagonal blocks of comb 0.
CovarianceModel add_classical_noise(const CovarianceModel& cov, const ClassicalNoise& noise);

// Adds a fully correlated classical fluctuation: Sigma += psd * v v^T.
CovarianceModel add_correlated_noise(const CovarianceModel& cov, std::span<const double> direction,
                                     double psd);

} // namespace combnoise
