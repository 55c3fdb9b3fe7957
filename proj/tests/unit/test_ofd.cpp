#include <cmath>

#include <doctest.h>

#include "combnoise/errors.hpp"
#include "combnoise/ofd.hpp"

using namespace combnoise;
using ofd::SumPolicy;

TEST_CASE("CW benchmark is one over the total flux")
{
    for (double flux : {1.0, 3.0, 1e12}) {
        const auto r = ofd::cw_benchmark(flux);
        CHECK(r.value == doctest::Approx(1.0 / flux).epsilon(1e-13));
        CHECK(r.units == "rad^2/Hz");
    }
}

TEST_CASE("two-line envelope through the comb path matches the benchmark")
{
    const auto env = make_raw_envelope(0, {std::sqrt(2.0), std::sqrt(2.0)});
    const auto r = ofd::phase_noise_psd(env, QuantumSpec::vacuum());
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(ofd::suppression_ratio(env, QuantumSpec::vacuum()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flat-top suppression ratio")
{
    for (int n : {1, 2, 5, 30}) {
        const auto env = make_envelope(Shape::flattop, n, 1.0);
        CHECK(ofd::suppression_ratio(env, QuantumSpec::vacuum()) ==
              doctest::Approx((2.0 * n + 1.0) / (8.0 * n * n)).epsilon(1e-13));
    }
}

TEST_CASE("weights of a flat-top comb")
{
    const auto env = make_envelope(Shape::flattop, 2, 5.0);
    const auto w = ofd::ofd_weights(env);
    CHECK(w.beat_amp == doctest::Approx(4.0));
    CHECK(w.n_min == -2);
    CHECK(w.phase_weight(0) == doctest::Approx(0.0));
    CHECK(w.phase_weight(-2) == doctest::Approx(-1.0 / (std::sqrt(2.0) * 4.0)));
    CHECK(w.phase_weight(2) == doctest::Approx(1.0 / (std::sqrt(2.0) * 4.0)));
    CHECK(w.amp_weight(0) == doctest::Approx(2.0 / (std::sqrt(2.0) * 4.0)));

    const auto ext = ofd::ofd_weights(env, SumPolicy::extended);
    CHECK(ext.n_min == -3);
    CHECK(ext.n_max() == 3);
    CHECK(ext.phase_weight(3) == doctest::Approx(1.0 / (std::sqrt(2.0) * 4.0)));
    CHECK(ofd::summation_range(env, SumPolicy::extended) == std::pair{-3, 3});
}

TEST_CASE("extended policy adds the empty neighbours' vacuum")
{
    const auto env = make_envelope(Shape::flattop, 3, 1.0);
    const double s = ofd::phase_noise_psd(env, QuantumSpec::vacuum()).value;
    const double e = ofd::phase_noise_psd(env, QuantumSpec::vacuum(), SumPolicy::extended).value;
    CHECK(e > s);
}

TEST_CASE("uniform squeezing and entanglement scale the phase PSD by 1/G")
{
    const auto env = make_envelope(Shape::gaussian, 5.0, 1.0);
    for (double g : {2.0, 10.0}) {
        CHECK(ofd::eta_enhancement(env, QuantumSpec::ofd_intra(GainProfile::constant(g))) ==
              doctest::Approx(1.0 / g).epsilon(1e-13));
        CHECK(ofd::eta_enhancement(env, QuantumSpec::ofd_epr(GainProfile::constant(g))) ==
              doctest::Approx(1.0 / g).epsilon(1e-13));
    }
}

TEST_CASE("squeezing one line only helps partially")
{
    const auto env = make_envelope(Shape::flattop, 4, 1.0);
    GainProfile g;
    g.overrides[4] = 100.0;
    const double eta = ofd::eta_enhancement(env, QuantumSpec::ofd_intra(g));
    CHECK(eta < 1.0);
    CHECK(eta > 0.01);
}

TEST_CASE("classical phase noise in the phase quadrature adds to the PSD")
{
    const auto env = make_envelope(Shape::flattop, 2, 1.0);
    auto spec = QuantumSpec::vacuum();
    const double base = ofd::phase_noise_psd(env, spec).value;
    spec.classical.s_pp[2] = 0.5;
    CHECK(ofd::phase_noise_psd(env, spec).value > base);
    // the centre line carries no phase weight on a flat top
    auto centre = QuantumSpec::vacuum();
    centre.classical.s_pp[0] = 0.5;
    CHECK(ofd::phase_noise_psd(env, centre).value == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("EPR needs a symmetric envelope")
{
    const auto env = make_raw_envelope(-1, {1.0, 2.0, 0.5});
    CHECK_THROWS_AS(ofd::phase_noise_psd(env, QuantumSpec::ofd_epr(GainProfile::constant(2.0))), DomainError);
}

TEST_CASE("general weights reduce to in-phase weights at zero phase")
{
    const auto env = make_envelope(Shape::sech, 1.7, 2.0);
    const auto w = ofd::ofd_weights(env);
    const auto gw = ofd::general_phase_estimator_weights(with_phases(env, std::vector<double>(env.amps.size(), 0.0)));
    for (int n = env.n_min; n <= env.n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - gw.n_min);
        CHECK(gw.phase_p[i] == doctest::Approx(w.phase_weight(n)).epsilon(1e-14));
        CHECK(gw.amp_q[i] == doctest::Approx(w.amp_weight(n)).epsilon(1e-14));
        CHECK(std::abs(gw.phase_q[i]) < 1e-15);
        CHECK(std::abs(gw.amp_p[i]) < 1e-15);
    }
}

TEST_CASE("general phase PSD is invariant under linear spectral phase in vacuum")
{
    const auto env = make_envelope(Shape::gaussian, 2.0, 1.0);
    std::vector<double> th;
    for (int n = env.n_min; n <= env.n_max; ++n) th.push_back(0.37 * n + 1.1);
    const auto spec = QuantumSpec::vacuum();
    CHECK(ofd::general_phase_noise_psd(with_phases(env, th), spec) ==
          doctest::Approx(ofd::phase_noise_psd(env, spec).value).epsilon(1e-12));
    CHECK_THROWS_AS(ofd::general_phase_noise_psd(with_phases(env, th), QuantumSpec::ofd_epr(GainProfile::constant(2.0))),
                    DomainError);
}

TEST_CASE("classical reference transfer")
{
    const auto env = make_envelope(Shape::gaussian, 8.0, 1.0);
    CHECK(ofd::classical_transfer(env, 1000) * 1000 == doctest::Approx(1.0).epsilon(1e-12));
    const auto psd = ofd::classical_psd_suppression(env);
    const double ratio = env.grid.omega_rep / env.grid.omega0;
    CHECK(psd == doctest::Approx(ratio * ratio));
}

TEST_CASE("ratio sweep rows and slopes")
{
    ofd::SweepRequest req;
    req.points = 9;
    const auto rows = ofd::ratio_sweep(req);
    CHECK(rows.size() == 27);
    CHECK(rows.front().m_rms == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(ofd::loglog_slope(rows, Shape::gaussian) == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(ofd::loglog_slope(rows, Shape::flattop) == doctest::Approx(-1.0).epsilon(0.1));

    req.threads = 4;
    const auto again = ofd::ratio_sweep(req);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].ratio == again[i].ratio);
    }
}

TEST_CASE("zero beat amplitude is a domain error")
{
    const auto env = make_raw_envelope(0, {1.0, 0.0, 1.0});
    CHECK_THROWS_AS(ofd::phase_noise_psd(env, QuantumSpec::vacuum()), DomainError);
}
