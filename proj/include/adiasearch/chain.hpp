#ifndef ADIASEARCH_CHAIN_HPP
#define ADIASEARCH_CHAIN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adiasearch/types.hpp"

namespace adiasearch {

// Tolerances used by chain validation.
inline constexpr double kRowSumTolerance = 1e-10;
inline constexpr double kDetailedBalanceTolerance = 1e-10;

struct ErgodicityReport {
    bool irreducible = false;
    bool aperiodic = false;
    /// gcd of return-cycle lengths; 0 when the chain is reducible.
    int period = 0;

    bool ergodic() const { return irreducible && aperiodic; }
};

struct ReversibilityReport {
    bool reversible = false;
    double max_violation = 0.0;
    /// Pair (x, y) attaining max_violation.
    std::pair<int, int> worst_pair{0, 0};
};

/// A validated row-stochastic matrix together with its marked set and
/// stationary distribution. Immutable after construction.
struct StochasticChain {
    int n = 0;
    Matrix P;
    std::vector<int> marked;
    Vector pi;
    double pM = 0.0;
    bool lazy = false;
    ErgodicityReport ergodicity;
    ReversibilityReport reversibility;

    bool is_marked(int x) const;
    /// 1.0 at marked indices, 0.0 elsewhere.
    Vector marked_indicator() const;
    std::vector<int> unmarked() const;
};

/// Which failed checks new_chain turns into errors. Irreducibility and
/// stochasticity are always enforced since pi is undefined otherwise.
struct ChainValidation {
    bool require_aperiodic = true;
    bool require_reversible = true;

    static ChainValidation strict() { return {}; }
    static ChainValidation relaxed() { return {false, false}; }
};

StochasticChain new_chain(const Matrix& P, std::vector<int> marked, bool lazy = false,
                          ChainValidation validation = ChainValidation::strict());

/// Solves (P^T - I) x = 0 with one equation replaced by sum(x) = 1.
Vector stationary_distribution(const Matrix& P);

ReversibilityReport is_reversible(const Matrix& P, const Vector& pi,
                                  double tolerance = kDetailedBalanceTolerance);
ReversibilityReport is_reversible(const StochasticChain& chain);

/// Irreducibility by forward/backward BFS on the support digraph;
/// aperiodicity by the gcd of level differences along support edges.
ErgodicityReport is_ergodic(const Matrix& P);

/// P <- (P + I) / 2. The stationary distribution is unchanged.
StochasticChain make_lazy(const StochasticChain& chain);

/// True when P = (Q + I)/2 for some stochastic Q, i.e. every P_xx >= 1/2,
/// which makes every discriminant eigenvalue nonnegative for all s.
bool is_lazy_form(const StochasticChain& chain);

/// The chain the search algorithms run on: the chain itself when it is
/// already in lazy form, make_lazy(chain) otherwise (when auto_lazy is set).
/// Throws unless the result is ergodic, reversible and 0 < |M| < n.
StochasticChain search_chain(const StochasticChain& chain, bool auto_lazy = true);

/// Checks 0 < |M| < n, irreducibility and reversibility.
void require_search_ready(const StochasticChain& chain);

/// Absorbing version P': marked rows replaced by unit vectors e_x.
Matrix absorbing(const StochasticChain& chain);

struct InterpolatedChain {
    StochasticChain base;
    double s = 0.0;
    Matrix Ps;
    Vector pis;
};

/// P(s) = (1 - s) P + s P'.
InterpolatedChain interpolate(const StochasticChain& chain, double s);

/// pi(s) = [(1 - s) pi_U, pi_M] / (1 - s (1 - pM)).
Vector interpolated_stationary(const StochasticChain& chain, double s);

enum class Family { complete, cycle, torus, random_reversible };

struct GeneratorSpec {
    Family family = Family::complete;
    int n = 0;
    int width = 0;
    int height = 0;
    int degree = 0;
    std::uint64_t seed = 0;
    std::vector<int> marked;
    bool lazy = false;

    bool operator==(const GeneratorSpec&) const = default;
};

std::optional<Family> parse_family(const std::string& name);
std::string family_name(Family family);

/// Deterministic test-graph families. All are reversible by construction;
/// bipartite instances (even cycles, even tori) are periodic until made lazy.
StochasticChain generate(const GeneratorSpec& spec);

StochasticChain complete_chain(int n, std::vector<int> marked, bool lazy = false);
StochasticChain cycle_chain(int n, std::vector<int> marked, bool lazy = false);
StochasticChain torus_chain(int width, int height, std::vector<int> marked, bool lazy = false);
StochasticChain random_reversible_chain(int n, int degree, std::uint64_t seed,
                                        std::vector<int> marked, bool lazy = false);

} // namespace adiasearch

#endif
