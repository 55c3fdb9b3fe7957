#pragma once

#include <string>

namespace combnoise {

// A white noise level with its normalization. All values are two-sided
// symmetrized PSDs, flat over [band_lo, band_hi] (rad/s) and zero outside.
struct NoiseReport {
    double value = 0.0;     // raw PSD, including charge^2 where applicable
    double reference = 1.0; // benchmark the PSD is normalized against
    double normalized = 0.0;
    std::string units;
    std::string reference_name;
    double charge = 1.0; // electron charge convention used in value
    bool two_sided = true;
    double band_lo = 0.0;
    double band_hi = 0.0;
};

} // namespace combnoise
