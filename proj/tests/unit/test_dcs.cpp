#include <cmath>
#include <limits>

#include <doctest.h>

#include "combnoise/dcs.hpp"
#include "combnoise/errors.hpp"

using namespace combnoise;
using dcs::Strategy;

namespace {

dcs::DcsSetup small_setup(bool strong_lo)
{
    dcs::DcsSetup s;
    s.signal = make_raw_envelope(-1, {0.2, 0.5, 0.3});
    s.lo = make_raw_envelope(-1, {3.0, 4.0, 2.0});
    s.strong_lo = strong_lo;
    return s;
}

} // namespace

TEST_CASE("vacuum photocurrent PSD equals the SQL")
{
    for (bool strong : {true, false}) {
        const auto setup = small_setup(strong);
        const auto clear = dcs::SampleResponse::transparent(-1, 1);
        const auto r = dcs::photocurrent_psd(setup, QuantumSpec::vacuum(), clear);
        CHECK(r.normalized == doctest::Approx(1.0).epsilon(1e-14));
        const double q2 = setup.charge * setup.charge;
        const double expect = q2 * (29.0 + (strong ? 0.0 : 0.38));
        CHECK(dcs::sql_psd(setup, clear) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(r.units == "A^2/Hz");
    }
}

TEST_CASE("SQL counts the transmitted signal")
{
    const auto setup = small_setup(false);
    const auto abs = dcs::localized_absorber(-1, 1, 0, 10.0);
    CHECK(abs.kappa(0) == doctest::Approx(0.1));
    CHECK(abs.kappa(1) == 1.0);
    CHECK(abs.kappa(7) == 1.0);
    const double q2 = setup.charge * setup.charge;
    CHECK(dcs::sql_psd(setup, abs) == doctest::Approx(q2 * (29.0 + 0.04 + 0.025 + 0.09)).epsilon(1e-14));
}

TEST_CASE("cross-referred squeezing lowers the transparent PSD by G")
{
    const auto setup = small_setup(false);
    const auto clear = dcs::SampleResponse::transparent(-1, 1);
    const auto g = GainProfile::constant(5.0);
    const auto r = dcs::photocurrent_psd(setup, QuantumSpec::dcs(StateMode::intra, Frame::cross_referred, g, g), clear);
    CHECK(r.normalized == doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("self-referred squeezing pays the averaged penalty")
{
    const auto setup = small_setup(true);
    const auto clear = dcs::SampleResponse::transparent(-1, 1);
    const auto g = GainProfile::constant(5.0);
    const auto r = dcs::photocurrent_psd(setup, QuantumSpec::dcs(StateMode::intra, Frame::self_referred, g, g), clear);
    CHECK(r.normalized == doctest::Approx(0.5 * (5.0 + 0.2)).epsilon(1e-13));
    CHECK_THROWS_AS(
        dcs::photocurrent_psd(setup, QuantumSpec::dcs(StateMode::epr, Frame::self_referred, g, g), clear),
        DomainError);
}

TEST_CASE("loss on one line lets vacuum back in")
{
    const auto setup = small_setup(true);
    const auto g = GainProfile::constant(10.0);
    const auto spec = QuantumSpec::dcs(StateMode::intra, Frame::cross_referred, g, g);
    const double clear = dcs::photocurrent_psd(setup, spec, dcs::SampleResponse::transparent(-1, 1)).normalized;
    const double lossy = dcs::photocurrent_psd(setup, spec, dcs::localized_absorber(-1, 1, 1, 30.0)).normalized;
    CHECK(lossy > clear);
    CHECK(lossy < 1.0);
}

TEST_CASE("setup validation")
{
    auto setup = small_setup(true);
    setup.lo = make_raw_envelope(-2, {1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(dcs::validate(setup), ContractError);
    setup = small_setup(true);
    setup.omega_offset = 0.5 * setup.delta_rep;
    CHECK_THROWS_AS(dcs::validate(setup), DomainError);

    dcs::SampleResponse s{0, {1.5}, {0.0}};
    CHECK_THROWS_AS(dcs::validate(s), DomainError);
}

TEST_CASE("transmittance SNR")
{
    const auto setup = small_setup(true);
    const auto abs = dcs::localized_absorber(-1, 1, 0, 3.0);
    const auto psd = dcs::photocurrent_psd(setup, QuantumSpec::vacuum(), abs);
    const auto a = dcs::transmittance_snr(setup, abs, psd, 0, 1.0);
    const auto b = dcs::transmittance_snr(setup, abs, psd, 0, 4.0);
    CHECK(a.snr > 0.0);
    CHECK(b.var_kappa == doctest::Approx(a.var_kappa / 4.0).epsilon(1e-12));
    CHECK(a.tone_orthogonal);
    CHECK_FALSE(dcs::transmittance_snr(setup, abs, psd, 0, 1e-5).tone_orthogonal);
}

TEST_CASE("advantage closed forms")
{
    const double g = 31.62;
    const double as = 1e-2;
    const double inf = std::numeric_limits<double>::infinity();
    for (auto s : {Strategy::intra_cross, Strategy::epr}) {
        CHECK(10 * std::log10(dcs::advantage_factor(5, 0.0, g, as, 1.0, s)) ==
              doctest::Approx(10 * std::log10(g)).epsilon(1e-3));
    }
    CHECK(10 * std::log10(dcs::advantage_factor(5, inf, g, as, 1.0, Strategy::intra_cross)) ==
          doctest::Approx(9.22082).epsilon(1e-5));
    CHECK(10 * std::log10(dcs::advantage_factor(5, inf, g, as, 1.0, Strategy::epr)) ==
          doctest::Approx(-1.91870).epsilon(1e-4));
    CHECK(dcs::advantage_factor(5, 0.0, 1.0, as, 1.0, Strategy::epr) == doctest::Approx(1.0));
    CHECK(dcs::parse_strategy(dcs::to_string(Strategy::epr)) == Strategy::epr);
}

TEST_CASE("advantage closed forms agree with the general PSD")
{
    const double g = 31.62;
    const double as = 1e-2;
    for (double depth : {0.0, 3.0, 20.0}) {
        for (auto s : {Strategy::intra_cross, Strategy::epr}) {
            const auto setup = dcs::flattop_setup(5, as, 1.0);
            const auto abs = dcs::localized_absorber(-5, 5, 1, depth);
            const auto mode = s == Strategy::epr ? StateMode::epr : StateMode::intra;
            const auto gain = GainProfile::constant(g);
            const double base = dcs::photocurrent_psd(setup, QuantumSpec::vacuum(), abs).value;
            const double enh =
                dcs::photocurrent_psd(setup, QuantumSpec::dcs(mode, Frame::cross_referred, gain, gain), abs).value;
            CHECK(base / enh == doctest::Approx(dcs::advantage_factor(5, depth, g, as, 1.0, s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("advantage curve is ordered and thread independent")
{
    const std::vector<double> depths{0.0, 5.0, 10.0, 30.0};
    const auto a = dcs::advantage_curve(50, depths, 31.62, 1e-2, 1.0, Strategy::intra_cross, 1);
    const auto b = dcs::advantage_curve(50, depths, 31.62, 1e-2, 1.0, Strategy::intra_cross, 3);
    REQUIRE(a.size() == depths.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].depth_db == depths[i]);
        CHECK(a[i].ratio == 100);
        CHECK(a[i].advantage == b[i].advantage);
    }
    CHECK(a.back().advantage < a.front().advantage);
}
