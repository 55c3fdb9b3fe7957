#include "combnoise/states.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "combnoise/errors.hpp"

namespace combnoise {

namespace {

void check_gain(double g, const char* where)
{
    if (!(g >= 1.0) || !std::isfinite(g)) {
        throw DomainError(std::string(where) + ": squeezing gains must be finite and >= 1");
    }
}

void check_profile(const GainProfile& profile, const char* where)
{
    check_gain(profile.uniform, where);
    for (const auto& [key, g] : profile.overrides) {
        check_gain(g, where);
    }
}

} // namespace

std::string to_string(StateMode mode)
{
    switch (mode) {
    case StateMode::vacuum: return "vacuum";
    case StateMode::intra: return "intra";
    case StateMode::epr: return "epr";
    }
    return "vacuum";
}

std::string to_string(Frame frame)
{
    return frame == Frame::self_referred ? "self" : "cross";
}

std::string to_string(SqueezeAxis axis)
{
    return axis == SqueezeAxis::phase ? "phase" : "amplitude";
}

StateMode parse_state_mode(const std::string& name)
{
    if (name == "vacuum") return StateMode::vacuum;
    if (name == "intra") return StateMode::intra;
    if (name == "epr") return StateMode::epr;
    throw DomainError("unknown state mode '" + name + "'");
}

Frame parse_frame(const std::string& name)
{
    if (name == "self") return Frame::self_referred;
    if (name == "cross") return Frame::cross_referred;
    throw DomainError("unknown reference frame '" + name + "'");
}

SqueezeAxis parse_squeeze_axis(const std::string& name)
{
    if (name == "phase") return SqueezeAxis::phase;
    if (name == "amplitude") return SqueezeAxis::amplitude;
    throw DomainError("unknown squeezing axis '" + name + "'");
}

QuantumSpec QuantumSpec::ofd_intra(GainProfile g)
{
    QuantumSpec spec;
    spec.mode = StateMode::intra;
    spec.axis = SqueezeAxis::phase;
    spec.gains = std::move(g);
    return spec;
}

QuantumSpec QuantumSpec::ofd_epr(GainProfile g)
{
    QuantumSpec spec;
    spec.mode = StateMode::epr;
    spec.axis = SqueezeAxis::phase;
    spec.gains = std::move(g);
    return spec;
}

QuantumSpec QuantumSpec::dcs(StateMode mode, Frame frame, GainProfile signal, GainProfile lo)
{
    QuantumSpec spec;
    spec.mode = mode;
    spec.frame = frame;
    spec.axis = SqueezeAxis::amplitude;
    spec.gains = std::move(signal);
    spec.lo_gains = std::move(lo);
    return spec;
}

void validate(const QuantumSpec& spec)
{
    check_profile(spec.gains, "QuantumSpec");
    check_profile(spec.lo_gains, "QuantumSpec");
    for (const auto* table : {&spec.classical.s_qq, &spec.classical.s_pp}) {
        for (const auto& [n, s] : *table) {
            if (!(s >= 0.0) || !std::isfinite(s)) {
                throw DomainError("QuantumSpec: classical noise PSDs must be finite and >= 0");
            }
        }
    }
}

LineVariances squeezed_line(double g, SqueezeAxis axis)
{
    check_gain(g, "squeezed_line");
    const double low = 0.5 / g;
    const double high = 0.5 * g;
    return axis == SqueezeAxis::phase ? LineVariances{high, low} : LineVariances{low, high};
}

CovarianceModel::CovarianceModel(std::vector<ModeLabel> modes, Eigen::MatrixXd matrix)
    : modes_(std::move(modes)), matrix_(std::move(matrix))
{
    const auto dim = static_cast<Eigen::Index>(2 * modes_.size());
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        throw ContractError("CovarianceModel: matrix dimension does not match mode list");
    }
}

bool CovarianceModel::has(int comb, int line) const
{
    for (const auto& m : modes_) {
        if (m.comb == comb && m.line == line) {
            return true;
        }
    }
    return false;
}

Eigen::Index CovarianceModel::q_index(int line, int comb) const
{
    // Modes of one comb are stored contiguously and in increasing line order.
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].comb == comb) {
            const int offset = line - modes_[i].line;
            const std::size_t k = i + static_cast<std::size_t>(offset);
            if (offset >= 0 && k < modes_.size() && modes_[k] == ModeLabel{comb, line}) {
                return static_cast<Eigen::Index>(2 * k);
            }
            break;
        }
    }
    throw ContractError("CovarianceModel: mode (comb " + std::to_string(comb) + ", line " +
                        std::to_string(line) + ") not in basis");
}

double CovarianceModel::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double CovarianceModel::block_determinant(int line, int comb) const
{
    const auto i = q_index(line, comb);
    return matrix_.block(i, i, 2, 2).determinant();
}

CovarianceModel CovarianceModel::direct_sum(const CovarianceModel& a, const CovarianceModel& b)
{
    std::vector<ModeLabel> modes = a.modes_;
    modes.insert(modes.end(), b.modes_.begin(), b.modes_.end());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.dimension() + b.dimension(), a.dimension() + b.dimension());
    m.topLeftCorner(a.dimension(), a.dimension()) = a.matrix_;
    m.bottomRightCorner(b.dimension(), b.dimension()) = b.matrix_;
    return CovarianceModel(std::move(modes), std::move(m));
}

void CovarianceModel::write_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path);
    }
    out.precision(15);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const auto tag = "c" + std::to_string(modes_[i].comb) + "_n" + std::to_string(modes_[i].line);
        out << (i ? "," : "") << "q_" << tag << ",p_" << tag;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix_.cols(); ++c) {
            out << (c ? "," : "") << std::scientific << matrix_(r, c);
        }
        out << '\n';
    }
}

CovarianceModel build_covariance(int n_min, int n_max, const QuantumSpec& spec, int comb)
{
    if (n_max < n_min) {
        throw DomainError("build_covariance: empty index range");
    }
    validate(spec);
    const auto lines = static_cast<std::size_t>(n_max - n_min + 1);
    std::vector<ModeLabel> modes;
    modes.reserve(lines);
    for (int n = n_min; n <= n_max; ++n) {
        modes.push_back({comb, n});
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * lines),
                                              static_cast<Eigen::Index>(2 * lines));
    const auto q = [n_min](int n) { return static_cast<Eigen::Index>(2 * (n - n_min)); };

    switch (spec.mode) {
    case StateMode::vacuum:
        m.diagonal().setConstant(0.5);
        break;
    case StateMode::intra:
        for (int n = n_min; n <= n_max; ++n) {
            const auto v = squeezed_line(spec.gains.at(n), spec.axis);
            m(q(n), q(n)) = v.qq;
            m(q(n) + 1, q(n) + 1) = v.pp;
        }
        break;
    case StateMode::epr: {
        if (n_min != -n_max) {
            throw DomainError("build_covariance: EPR pairing needs a range symmetric about n = 0");
        }
        const auto v0 = squeezed_line(spec.gains.at(0), spec.axis);
        m(q(0), q(0)) = v0.qq;
        m(q(0) + 1, q(0) + 1) = v0.pp;
        for (int n = 1; n <= n_max; ++n) {
            // Q+ and P- squeezed to 1/(2G); Q- and P+ anti-squeezed to G/2.
            const double g = spec.gains.at(n);
            check_gain(g, "build_covariance");
            const double var = 0.5 * (0.5 / g + 0.5 * g);
            const double cov = 0.5 * (0.5 / g - 0.5 * g);
            const auto a = q(n);
            const auto b = q(-n);
            m(a, a) = m(b, b) = var;
            m(a, b) = m(b, a) = cov;
            m(a + 1, a + 1) = m(b + 1, b + 1) = var;
            m(a + 1, b + 1) = m(b + 1, a + 1) = -cov;
        }
        break;
    }
    }

    CovarianceModel model(std::move(modes), std::move(m));
    if (!spec.classical.empty() && comb == 0) {
        return add_classical_noise(model, spec.classical);
    }
    return model;
}

QuantumSpec lo_state(const QuantumSpec& spec)
{
    QuantumSpec lo;
    lo.mode = spec.mode;
    lo.frame = spec.frame;
    lo.axis = spec.axis;
    lo.gains = spec.lo_gains;
    return lo;
}

double quadratic_form_variance(const CovarianceModel& cov, std::span<const double> weights)
{
    if (static_cast<Eigen::Index>(weights.size()) != cov.dimension()) {
        throw ContractError("quadratic_form_variance: weight vector has " + std::to_string(weights.size()) +
                            " entries, covariance dimension is " + std::to_string(cov.dimension()));
    }
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return w.dot(cov.matrix() * w);
}

CovarianceModel add_classical_noise(const CovarianceModel& cov, const ClassicalNoise& noise)
{
    CovarianceModel out = cov;
    for (const auto* table : {&noise.s_qq, &noise.s_pp}) {
        for (const auto& [n, s] : *table) {
            if (!(s >= 0.0) || !std::isfinite(s)) {
                throw DomainError("add_classical_noise: additions must be finite and >= 0");
            }
        }
    }
    for (const auto& [n, s] : noise.s_qq) {
        if (cov.has(0, n)) {
            const auto i = cov.q_index(n);
            out.matrix()(i, i) += s;
        }
    }
    for (const auto& [n, s] : noise.s_pp) {
        if (cov.has(0, n)) {
            const auto i = cov.p_index(n);
            out.matrix()(i, i) += s;
        }
    }
    return out;
}

CovarianceModel add_correlated_noise(const CovarianceModel& cov, std::span<const double> direction, double psd)
{
    if (static_cast<Eigen::Index>(direction.size()) != cov.dimension()) {
        throw ContractError("add_correlated_noise: direction has wrong dimension");
    }
    if (!(psd >= 0.0)) {
        throw DomainError("add_correlated_noise: psd must be >= 0");
    }
    CovarianceModel out = cov;
    const Eigen::Map<const Eigen::VectorXd> v(direction.data(), static_cast<Eigen::Index>(direction.size()));
    out.matrix() += psd * v * v.transpose();
    return out;
}

} // namespace combnoise
