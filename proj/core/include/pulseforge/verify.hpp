#pragma once

#include <string>
#include <vector>

namespace pulseforge {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Fast invariant suite behind the `verify` subcommand: channel soundness,
/// propagator unitarity, VZ equivalence, decomposition oracles,
/// CNOT-from-CR and warm-start continuity.
std::vector<CheckResult> run_verification_suite();

}  // namespace pulseforge
