#include <cmath>

#include <doctest.h>

#include "combnoise/errors.hpp"
#include "combnoise/states.hpp"

using namespace combnoise;

TEST_CASE("single-line squeezing along each axis")
{
    const auto ph = squeezed_line(4.0, SqueezeAxis::phase);
    CHECK(ph.pp == doctest::Approx(0.125));
    CHECK(ph.qq == doctest::Approx(2.0));
    const auto am = squeezed_line(4.0, SqueezeAxis::amplitude);
    CHECK(am.qq == doctest::Approx(0.125));
    CHECK(am.pp == doctest::Approx(2.0));
    CHECK(ph.qq * ph.pp == doctest::Approx(0.25));
}

TEST_CASE("vacuum covariance is half the identity")
{
    const auto cov = build_covariance(-3, 3, QuantumSpec::vacuum());
    CHECK(cov.dimension() == 14);
    CHECK(cov.matrix().isApprox(0.5 * Eigen::MatrixXd::Identity(14, 14)));
    CHECK(cov.block_determinant(2) == doctest::Approx(0.25));
}

TEST_CASE("two-mode squeezing reduces Q+ and P-")
{
    const double g = 7.0;
    const auto cov = build_covariance(-2, 2, QuantumSpec::ofd_epr(GainProfile::constant(g)));
    std::vector<double> w(static_cast<std::size_t>(cov.dimension()), 0.0);
    const double r = 1.0 / std::sqrt(2.0);

    w[static_cast<std::size_t>(cov.q_index(1))] = r;
    w[static_cast<std::size_t>(cov.q_index(-1))] = r;
    CHECK(quadratic_form_variance(cov, w) == doctest::Approx(0.5 / g));

    std::fill(w.begin(), w.end(), 0.0);
    w[static_cast<std::size_t>(cov.p_index(2))] = r;
    w[static_cast<std::size_t>(cov.p_index(-2))] = -r;
    CHECK(quadratic_form_variance(cov, w) == doctest::Approx(0.5 / g));

    std::fill(w.begin(), w.end(), 0.0);
    w[static_cast<std::size_t>(cov.p_index(1))] = r;
    w[static_cast<std::size_t>(cov.p_index(-1))] = r;
    CHECK(quadratic_form_variance(cov, w) == doctest::Approx(0.5 * g));

    // each half of a pair alone is thermal, the central line is single-mode squeezed
    CHECK(cov.block_determinant(1) > 0.25);
    CHECK(cov.matrix()(cov.p_index(0), cov.p_index(0)) == doctest::Approx(0.5 / g));
    CHECK(cov.min_eigenvalue() > 0.0);
}

TEST_CASE("gain overrides and classical noise")
{
    GainProfile g = GainProfile::constant(2.0);
    g.overrides[1] = 10.0;
    auto spec = QuantumSpec::ofd_intra(g);
    spec.classical.s_pp[1] = 0.3;
    const auto cov = build_covariance(0, 2, spec);
    CHECK(cov.matrix()(cov.p_index(0), cov.p_index(0)) == doctest::Approx(0.25));
    CHECK(cov.matrix()(cov.p_index(1), cov.p_index(1)) == doctest::Approx(0.05 + 0.3));
}

TEST_CASE("correlated noise adds a rank-one term")
{
    const auto cov = build_covariance(0, 1, QuantumSpec::vacuum());
    const std::vector<double> v{1.0, 0.0, 2.0, 0.0};
    const auto noisy = add_correlated_noise(cov, v, 0.5);
    CHECK(noisy.matrix()(0, 2) == doctest::Approx(1.0));
    CHECK(noisy.matrix()(2, 2) == doctest::Approx(2.5));
}

TEST_CASE("invalid specs are rejected")
{
    CHECK_THROWS_AS(validate(QuantumSpec::ofd_intra(GainProfile::constant(0.5))), DomainError);
    auto spec = QuantumSpec::vacuum();
    spec.classical.s_qq[0] = -1.0;
    CHECK_THROWS_AS(validate(spec), DomainError);
    CHECK_THROWS_AS(parse_state_mode("thermal"), DomainError);
}

TEST_CASE("enum names round trip")
{
    for (auto m : {StateMode::vacuum, StateMode::intra, StateMode::epr}) CHECK(parse_state_mode(to_string(m)) == m);
    for (auto f : {Frame::self_referred, Frame::cross_referred}) CHECK(parse_frame(to_string(f)) == f);
    for (auto a : {SqueezeAxis::phase, SqueezeAxis::amplitude}) CHECK(parse_squeeze_axis(to_string(a)) == a);
}
