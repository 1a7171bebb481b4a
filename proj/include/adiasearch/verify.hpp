#ifndef ADIASEARCH_VERIFY_HPP
#define ADIASEARCH_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adiasearch/chain.hpp"

namespace adiasearch {

struct InvariantResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    long long monte_carlo_trials = 100'000;
    /// Runs the evolution checks (unitarity, success bound) at this epsilon.
    bool evolve = true;
    double epsilon = 0.25;
    bool auto_lazy = true;
};

/// Every module invariant evaluated on the chain; edge-space checks are
/// skipped above the edge-space cap. Chain-level checks use the chain as
/// given, the rest run on search_chain(chain).
std::vector<InvariantResult> run_invariant_suite(const StochasticChain& chain,
                                                 const VerifyOptions& options = {});

bool all_passed(const std::vector<InvariantResult>& results);

} // namespace adiasearch

#endif
