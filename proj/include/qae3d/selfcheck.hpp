#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qae3d {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // worst observed deviation
    double tolerance = 0.0;
};

/// Invariant batteries: unitarity, identity initialisation, inverse law,
/// marginalisation against the dense partial trace, gradient vs central
/// finite differences, loss zero-characterisation, encode/decode
/// round-trip. `inject_fault` flips one angle sign inside the inverse-law
/// battery to demonstrate fault detection.
std::vector<CheckResult> run_selfchecks(std::uint64_t seed, bool inject_fault = false);

}  // namespace qae3d
