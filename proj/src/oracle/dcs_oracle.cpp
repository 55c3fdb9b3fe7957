#include <cmath>

#include "combnoise/errors.hpp"
#include "combnoise/oracle.hpp"

namespace combnoise::oracle {

namespace {

struct DcsModel {
    CovarianceModel cov; // after the sample map
    int lo = 0;
    int hi = 0;
};

DcsModel transformed_covariance(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample)
{
    DcsModel m;
    m.lo = setup.signal.n_min;
    m.hi = setup.signal.n_max;
    QuantumSpec vacuum;
    const auto signal = build_covariance(m.lo, m.hi, spec, 0);
    const auto local = build_covariance(m.lo, m.hi, lo_state(spec), 1);
    const auto loss = build_covariance(m.lo, m.hi, vacuum, 2);
    const auto full = CovarianceModel::direct_sum(CovarianceModel::direct_sum(signal, local), loss);

    // Signal line n -> sqrt(kappa) R(theta) (q, p) + sqrt(1 - kappa) (v_q, v_p).
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(full.dimension(), full.dimension());
    for (int n = m.lo; n <= m.hi; ++n) {
        const double kappa = sample.kappa(n);
        const double c = std::cos(sample.theta(n));
        const double s = std::sin(sample.theta(n));
        const auto q = full.q_index(n, 0);
        const auto vq = full.q_index(n, 2);
        const double rk = std::sqrt(kappa);
        const double rl = std::sqrt(1.0 - kappa);
        k(q, q) = rk * c;
        k(q, q + 1) = -rk * s;
        k(q + 1, q) = rk * s;
        k(q + 1, q + 1) = rk * c;
        k(q, vq) = rl;
        k(q + 1, vq + 1) = rl;
    }
    m.cov = CovarianceModel(full.modes(), k * full.matrix() * k.transpose());
    return m;
}

// Photocurrent weights: cosine (amplitude-like) and sine parts per line.
void line_weights(const dcs::DcsSetup& setup, const dcs::SampleResponse& sample, const DcsModel& m, int n,
                  double cw, double sw, std::vector<double>& w)
{
    const double r2 = std::sqrt(2.0);
    const double al = setup.lo.amp(n);
    const double as = setup.signal.amp(n) * std::sqrt(sample.kappa(n));
    const auto qs = static_cast<std::size_t>(m.cov.q_index(n, 0));
    const auto ql = static_cast<std::size_t>(m.cov.q_index(n, 1));
    w[qs] += r2 * al * cw;
    w[qs + 1] += -r2 * al * sw;
    if (!setup.strong_lo) {
        w[ql] += r2 * as * cw;
        w[ql + 1] += r2 * as * sw;
    }
}

void check(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample)
{
    dcs::validate(setup);
    dcs::validate(sample);
    if (spec.mode == StateMode::epr && spec.frame == Frame::self_referred) {
        throw DomainError("oracle: self-referred EPR not modeled");
    }
}

} // namespace

double dcs_psd(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample)
{
    check(setup, spec, sample);
    const auto m = transformed_covariance(setup, spec, sample);
    const auto dim = static_cast<std::size_t>(m.cov.dimension());
    double total = 0.0;
    if (spec.frame == Frame::cross_referred) {
        std::vector<double> w(dim, 0.0);
        for (int n = m.lo; n <= m.hi; ++n) {
            line_weights(setup, sample, m, n, 1.0, 0.0, w);
        }
        total = quadratic_form_variance(m.cov, w);
    } else {
        // Beats at distinct frequencies average out against each other; within
        // one line cos^2 and sin^2 each average to 1/2.
        for (int n = m.lo; n <= m.hi; ++n) {
            std::vector<double> wc(dim, 0.0);
            std::vector<double> ws(dim, 0.0);
            line_weights(setup, sample, m, n, 1.0, 0.0, wc);
            line_weights(setup, sample, m, n, 0.0, 1.0, ws);
            total += 0.5 * (quadratic_form_variance(m.cov, wc) + quadratic_form_variance(m.cov, ws));
        }
    }
    return setup.charge * setup.charge * total;
}

double dcs_variance_at(const dcs::DcsSetup& setup, const QuantumSpec& spec, const dcs::SampleResponse& sample,
                       double t)
{
    check(setup, spec, sample);
    const auto m = transformed_covariance(setup, spec, sample);
    std::vector<double> w(static_cast<std::size_t>(m.cov.dimension()), 0.0);
    for (int n = m.lo; n <= m.hi; ++n) {
        if (spec.frame == Frame::cross_referred) {
            line_weights(setup, sample, m, n, 1.0, 0.0, w);
        } else {
            const double phase = setup.beat_omega(n) * t;
            line_weights(setup, sample, m, n, std::cos(phase), std::sin(phase), w);
        }
    }
    return setup.charge * setup.charge * quadratic_form_variance(m.cov, w);
}

} // namespace combnoise::oracle
