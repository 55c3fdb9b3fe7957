#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/distributions/chi_squared.hpp>
#include <fftw3.h>

#include "combnoise/errors.hpp"
#include "combnoise/stochastic.hpp"

namespace combnoise::stochastic {

namespace {

// FFTW planning is not thread-safe; execution on a finished plan is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftBuffers {
    double* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;

    explicit FftBuffers(std::size_t length)
    {
        {
            std::lock_guard lock(planner_mutex());
            in = fftw_alloc_real(length);
            out = fftw_alloc_complex(length / 2 + 1);
            plan = fftw_plan_dft_r2c_1d(static_cast<int>(length), in, out, FFTW_ESTIMATE);
        }
        if (!in || !out || !plan) {
            release();
            throw NumericError("estimate_psd: FFT setup failed");
        }
    }
    ~FftBuffers() { release(); }
    FftBuffers(const FftBuffers&) = delete;
    FftBuffers& operator=(const FftBuffers&) = delete;

    void release()
    {
        std::lock_guard lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
        plan = nullptr;
        in = nullptr;
        out = nullptr;
    }
};

} // namespace

PsdEstimate estimate_psd(const std::vector<double>& series, double sample_rate, double rbw)
{
    if (!(sample_rate > 0.0) || !(rbw > 0.0) || rbw > sample_rate) {
        throw DomainError("estimate_psd: need 0 < rbw <= sample rate");
    }
    const auto length = static_cast<std::size_t>(std::llround(sample_rate / rbw));
    if (length < 2) {
        throw DomainError("estimate_psd: segment shorter than two samples");
    }
    const std::size_t segments = series.size() / length;
    if (segments < 1) {
        throw DomainError("estimate_psd: series shorter than one segment");
    }

    const std::size_t bins = length / 2 + 1;
    std::vector<double> acc(bins, 0.0);
    {
        FftBuffers fft(length);
        for (std::size_t s = 0; s < segments; ++s) {
            std::copy_n(series.begin() + static_cast<std::ptrdiff_t>(s * length), length, fft.in);
            fftw_execute(fft.plan);
            for (std::size_t b = 0; b < bins; ++b) {
                acc[b] += fft.out[b][0] * fft.out[b][0] + fft.out[b][1] * fft.out[b][1];
            }
        }
    }

    PsdEstimate est;
    est.segments = segments;
    est.rbw = sample_rate / static_cast<double>(length);
    est.freq.resize(bins);
    est.psd.resize(bins);
    est.ci_lo.resize(bins);
    est.ci_hi.resize(bins);

    const double norm = 1.0 / (sample_rate * static_cast<double>(length) * static_cast<double>(segments));
    const auto k = static_cast<double>(segments);
    const boost::math::chi_squared_distribution<double> full(2.0 * k);
    const boost::math::chi_squared_distribution<double> edge(k);
    const double full_lo = 2.0 * k / boost::math::quantile(full, 0.975);
    const double full_hi = 2.0 * k / boost::math::quantile(full, 0.025);
    const double edge_lo = k / boost::math::quantile(edge, 0.975);
    const double edge_hi = k / boost::math::quantile(edge, 0.025);

    for (std::size_t b = 0; b < bins; ++b) {
        const bool real_bin = b == 0 || (length % 2 == 0 && b == bins - 1);
        est.freq[b] = static_cast<double>(b) * est.rbw;
        est.psd[b] = acc[b] * norm;
        est.ci_lo[b] = est.psd[b] * (real_bin ? edge_lo : full_lo);
        est.ci_hi[b] = est.psd[b] * (real_bin ? edge_hi : full_hi);
    }
    return est;
}

} // namespace combnoise::stochastic
