#include <cmath>
#include <numeric>

#include <doctest.h>

#include "combnoise/errors.hpp"
#include "combnoise/philox.hpp"
#include "combnoise/stochastic.hpp"

using namespace combnoise;
using namespace combnoise::stochastic;

TEST_CASE("philox known-answer vectors")
{
    using rng::Counter;
    using rng::Key;
    CHECK(rng::philox4x32(Counter{0, 0, 0, 0}, Key{0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(rng::philox4x32(Counter{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, Key{0xffffffff, 0xffffffff}) ==
          Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(rng::philox4x32(Counter{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, Key{0xa4093822, 0x299f31d0}) ==
          Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("gaussian pairs have unit moments")
{
    const auto key = rng::key_from_seed(12345);
    double s1 = 0, s2 = 0, s12 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = rng::gaussian_pair({static_cast<std::uint32_t>(i), 0, 0, 0}, key);
        REQUIRE(std::isfinite(a));
        s1 += a;
        s2 += a * a + b * b;
        s12 += a * b;
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / (2.0 * n) - 1.0) < 5.0 * std::sqrt(2.0 / (2.0 * n)));
    CHECK(std::abs(s12 / n) < 5.0 / std::sqrt(n));
}

TEST_CASE("PSD of a sinusoid integrates to its power")
{
    const double fs = 1e4, rbw = 10.0, f = 1230.0, amp = 3.0;
    std::vector<double> x(static_cast<std::size_t>(fs * 2));
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = amp * std::cos(2 * M_PI * f * k / fs);
    const auto est = estimate_psd(x, fs, rbw);
    CHECK(est.segments == 20);
    CHECK(est.rbw == doctest::Approx(rbw));
    const auto bin = static_cast<std::size_t>(f / rbw);
    CHECK(est.freq[bin] == doctest::Approx(f));
    // two-sided: the positive-frequency half carries A^2/4
    CHECK(est.psd[bin] * rbw == doctest::Approx(amp * amp / 4).epsilon(0.01));
    CHECK(est.psd[bin + 3] * rbw < 1e-20);
}

TEST_CASE("PSD of white noise is its variance over the sample rate")
{
    const double fs = 1e4, sigma = 2.0;
    std::vector<double> x(200000);
    const auto key = rng::key_from_seed(7);
    for (std::size_t k = 0; k < x.size(); k += 2) {
        const auto [a, b] = rng::gaussian_pair({static_cast<std::uint32_t>(k), 1, 0, 0}, key);
        x[k] = sigma * a;
        x[k + 1] = sigma * b;
    }
    const auto est = estimate_psd(x, fs, 50.0);
    double mean = 0.0;
    int inside = 0;
    const std::size_t bins = est.psd.size();
    for (std::size_t b = 1; b + 1 < bins; ++b) {
        mean += est.psd[b];
        if (est.ci_lo[b] <= sigma * sigma / fs && sigma * sigma / fs <= est.ci_hi[b]) ++inside;
    }
    mean /= static_cast<double>(bins - 2);
    CHECK(mean == doctest::Approx(sigma * sigma / fs).epsilon(0.01));
    CHECK(static_cast<double>(inside) / static_cast<double>(bins - 2) > 0.9);
    CHECK_THROWS_AS(estimate_psd(x, fs, 0.01), DomainError);
}

namespace {

dcs::DcsSetup small_setup()
{
    dcs::DcsSetup s;
    s.signal = make_raw_envelope(-2, {0.1, 0.3, 0.4, 0.3, 0.1});
    s.lo = make_raw_envelope(-2, {1.0, 2.0, 2.5, 2.0, 1.0});
    s.omega_offset = 2 * M_PI * 100.5e3;
    s.delta_rep = 2 * M_PI * 10e3;
    return s;
}

} // namespace

TEST_CASE("vacuum trace is flat at one")
{
    const auto setup = small_setup();
    const auto clear = dcs::SampleResponse::transparent(-2, 2);
    const auto trace = variance_trace(setup, QuantumSpec::vacuum(), clear, time_grid(1e6, 100));
    for (double v : trace.variance) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(trace.times[10] == doctest::Approx(1e-5));
}

TEST_CASE("self-referred squeezing makes the variance oscillate")
{
    const auto setup = small_setup();
    const auto clear = dcs::SampleResponse::transparent(-2, 2);
    const double g = 4.0;
    const auto spec = QuantumSpec::dcs(StateMode::intra, Frame::self_referred, GainProfile::constant(g),
                                       GainProfile::constant(g));
    const auto trace = variance_trace(setup, spec, clear, time_grid(1e6, 1000));
    const double avg = std::accumulate(trace.variance.begin(), trace.variance.end(), 0.0) / 1000.0;
    CHECK(avg == doctest::Approx(0.5 * (g + 1 / g)).epsilon(1e-3));
    CHECK(*std::max_element(trace.variance.begin(), trace.variance.end()) <= g + 1e-12);
    CHECK(*std::min_element(trace.variance.begin(), trace.variance.end()) >= 1 / g - 1e-12);
}

TEST_CASE("sampled vacuum photocurrent is white at the SQL")
{
    const auto setup = small_setup();
    const auto clear = dcs::SampleResponse::transparent(-2, 2);
    TraceConfig cfg;
    cfg.duration = 0.2;
    cfg.seed = 99;
    const auto series = sample_photocurrent(setup, QuantumSpec::vacuum(), clear, cfg);
    CHECK(series.values.size() == 200000);
    const auto est = estimate_psd(series.values, cfg.sample_rate, cfg.rbw);
    double mean = 0.0;
    for (std::size_t b = 1; b + 1 < est.psd.size(); ++b) mean += est.psd[b];
    mean /= static_cast<double>(est.psd.size() - 2);
    // K = 20 segments over ~5000 bins: the mean has relative SE ~ 3e-3
    CHECK(mean == doctest::Approx(1.0).epsilon(0.015));
}

TEST_CASE("cross-referred squeezed photocurrent sits at 1/G within the CI")
{
    const auto setup = small_setup();
    const auto clear = dcs::SampleResponse::transparent(-2, 2);
    const double g = 5.0;
    const auto spec = QuantumSpec::dcs(StateMode::epr, Frame::cross_referred, GainProfile::constant(g),
                                       GainProfile::constant(g));
    TraceConfig cfg;
    cfg.duration = 0.2;
    cfg.seed = 3;
    const auto series = sample_photocurrent(setup, spec, clear, cfg);
    const auto est = estimate_psd(series.values, cfg.sample_rate, cfg.rbw);
    int inside = 0;
    double mean = 0.0;
    const std::size_t bins = est.psd.size();
    for (std::size_t b = 1; b + 1 < bins; ++b) {
        mean += est.psd[b];
        if (est.ci_lo[b] <= 1 / g && 1 / g <= est.ci_hi[b]) ++inside;
    }
    mean /= static_cast<double>(bins - 2);
    CHECK(mean == doctest::Approx(1 / g).epsilon(0.015));
    CHECK(static_cast<double>(inside) / static_cast<double>(bins - 2) > 0.9);

    const auto cmp = compare_to_trace(series, variance_trace(setup, spec, clear, time_grid(cfg.sample_rate, cfg.samples())));
    CHECK(cmp.analytic_variance == doctest::Approx(1 / g).epsilon(1e-12));
    CHECK(std::abs(cmp.z_score) < 5.0);
}

TEST_CASE("sampling is deterministic in the seed and the thread count")
{
    const auto setup = small_setup();
    const auto clear = dcs::SampleResponse::transparent(-2, 2);
    const auto spec = QuantumSpec::dcs(StateMode::intra, Frame::self_referred, GainProfile::constant(3.0),
                                       GainProfile::constant(2.0));
    TraceConfig cfg;
    cfg.duration = 0.03;
    cfg.seed = 11;
    const auto a = sample_photocurrent(setup, spec, clear, cfg);
    cfg.threads = 3;
    const auto b = sample_photocurrent(setup, spec, clear, cfg);
    CHECK(a.values == b.values);
    cfg.seed = 12;
    const auto c = sample_photocurrent(setup, spec, clear, cfg);
    CHECK(a.values != c.values);
}

TEST_CASE("aliased tone plans are rejected")
{
    auto setup = small_setup();
    TraceConfig cfg;
    cfg.sample_rate = 2e5;
    CHECK_THROWS_AS(validate(cfg, setup), DomainError);
}

TEST_CASE("cyclostationary preset tone plan")
{
    const auto p = cyclo_preset();
    CHECK(p.setup.signal.size() == 101);
    CHECK(p.setup.strong_lo);
    CHECK(p.setup.signal.amp(0) / p.setup.signal.amp(0) == 1.0);
    const double sigma = 50.0 / 3.0;
    CHECK(p.setup.signal.amp(10) / p.setup.signal.amp(0) ==
          doctest::Approx(std::exp(-100 / (2 * sigma * sigma))).epsilon(1e-12));
    const double ph_per_s = 10e-3 / (6.62607015e-34 * 299792458.0 / 1550e-9);
    CHECK(p.setup.signal.total_flux() == doctest::Approx(ph_per_s).epsilon(1e-12));

    const auto clear = dcs::SampleResponse::transparent(-50, 50);
    const auto trace = variance_trace(p.setup, cyclo_spec(10.0), clear, {0.0, 0.5e-3});
    CHECK(trace.variance[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(trace.variance[1] == doctest::Approx(10.0).epsilon(1e-12));
}
