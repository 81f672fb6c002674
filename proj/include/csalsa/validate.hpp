#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csalsa {

struct PropertyResult {
    std::string name;
    bool passed = false;
    /// Measured worst-case error or a short explanation.
    std::string detail;
    double seconds = 0.0;
};

/// Fast property suite: adjoint and inverse identities, dense 8 x 8 oracles,
/// frame identities, prox oracles, DFT Parseval and solver invariants.
std::vector<PropertyResult> run_property_suite(std::uint64_t seed = 2024);

}  // namespace csalsa
