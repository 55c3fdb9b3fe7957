#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "combnoise/app/config.hpp"
#include "combnoise/dcs.hpp"
#include "combnoise/envelope.hpp"
#include "combnoise/ofd.hpp"
#include "combnoise/states.hpp"

namespace combnoise::app {

struct ValidationOptions {
    // Test fixture: flip the sign of the negative-index EPR phase weights on
    // the oracle side, which must make the equivalence check fail.
    bool inject_epr_sign_flip = false;
    unsigned threads = 1;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    nlohmann::json detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

ValidationReport run_validation(const RunConfig& cfg, const ValidationOptions& options = {});

// Random instances shared by the validation suite and the tests.
using Rng = std::mt19937_64;

struct OfdInstance {
    CombEnvelope env;
    QuantumSpec spec;
    ofd::SumPolicy policy = ofd::SumPolicy::support_only;
};

struct DcsInstance {
    dcs::DcsSetup setup;
    QuantumSpec spec;
    dcs::SampleResponse sample;
};

CombEnvelope random_envelope(Rng& rng, bool symmetric);
OfdInstance random_ofd_instance(Rng& rng);
PhasedEnvelope random_phases(Rng& rng, const CombEnvelope& env);
DcsInstance random_dcs_instance(Rng& rng, int max_half_width = 8);

double relative_error(double a, double b);

} // namespace combnoise::app
