#ifndef ADIASEARCH_ADIABATIC_HPP
#define ADIASEARCH_ADIABATIC_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "adiasearch/chain.hpp"
#include "adiasearch/types.hpp"

namespace adiasearch {

/// Constant-angular-velocity schedule: theta(s(t)) = omega t + theta0.
struct Schedule {
    double T = 0.0;
    double epsilon = 0.0;
    double pM = 0.0;
    double theta0 = 0.0;
    double omega = 0.0;

    /// s(t) = (1 - pM / sin^2(omega t + theta0)) / (1 - pM), clamped to [0, 1].
    double s_at(double t) const;
    double theta_at(double t) const { return omega * t + theta0; }
};

Schedule schedule(double pM, double T, double epsilon = 0.0);

struct RunningTime {
    double T = 0.0;             ///< returned running time, equal to T_closed_form
    double T_grid = 0.0;        ///< (pi / 2 eps) max_s sqrt(sum |<v_k|v_n^perp>|^2 / (1 - lambda_k))
    double T_closed_form = 0.0; ///< (pi / 2 eps) sqrt(HT)
    double ht = 0.0;
    double epsilon = 0.0;
    double argmax_s = 0.0;
    double relative_gap = 0.0; ///< |T_grid - T_closed_form| / T_closed_form
    bool max_at_end = false;
    bool lazy_applied = false;

    bool consistent() const { return relative_gap <= 1e-6 && max_at_end; }
};

/// Running time of the search on search_chain(chain, auto_lazy), computed
/// both from the grid maximum of the adiabatic sum and from the hitting time.
RunningTime running_time(const StochasticChain& chain, double epsilon, int grid_points = 101,
                         bool auto_lazy = true);

/// Denominator used in the adiabatic sum.
enum class ConditionForm {
    exact,        ///< 1 - lambda_k^2
    strengthened, ///< 1 - lambda_k (never smaller for lambda_k >= 0)
};

/// sum_{k != n} |<v_k|v_n^perp>|^2 / denominator at s.
double adiabatic_sum(const StochasticChain& chain, double s, ConditionForm form);

/// omega^2 * adiabatic_sum with omega = arccos(sqrt pM) / T.
double adiabatic_condition_lhs(const StochasticChain& chain, double s, double T,
                               ConditionForm form = ConditionForm::exact);

struct ConditionReport {
    std::vector<double> grid;
    std::vector<double> lhs; ///< (pi / 2T)^2 * adiabatic_sum
    double maxLhs = 0.0;
    double argmax_s = 0.0;
    bool tSufficient = false; ///< maxLhs <= epsilon^2
};

/// Condition with the angular speed bounded by pi / (2T).
ConditionReport check_adiabatic_condition(const StochasticChain& chain, double T, double epsilon,
                                          int grid_points = 101,
                                          ConditionForm form = ConditionForm::exact);

struct EvolveOptions {
    /// Fixed step; disables refinement when set.
    std::optional<double> dt;
    bool auto_lazy = true;
    int max_refinements = 6;
    double refinement_tolerance = 1e-4;
};

struct EvolutionTrace {
    double T = 0.0;
    double epsilon = 0.0;
    double ht = 0.0;
    double dt = 0.0;
    int refinements = 0;
    StochasticChain chain; ///< the chain actually evolved
    std::vector<double> times;
    std::vector<double> s_values;
    std::vector<double> overlaps; ///< |<Psi_n(s(t))|psi(t)>|^2
    std::vector<double> norms;
    ComplexVector finalState;
    double successProb = 0.0;
    double minOverlap = 1.0;
    double maxNormDrift = 0.0;
};

/// Propagates |pi>|0> under H(s(t)) for t in [0, T] with a fixed number of
/// midpoint steps; each step applies the exact exponential of the frozen
/// Hamiltonian. The chain must already be search-ready.
EvolutionTrace propagate(const StochasticChain& chain, const Schedule& sched, long long steps);

/// The full adiabatic search: T from running_time, step refinement until
/// the final overlap settles.
EvolutionTrace evolve(const StochasticChain& chain, double epsilon, const EvolveOptions& options = {});

/// Probability of each vertex when measuring the first register.
Vector vertex_distribution(const EvolutionTrace& trace);

int measure(const EvolutionTrace& trace, std::uint64_t seed);

/// "t,s,overlap_sq,norm" per step at 17 significant digits.
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);

} // namespace adiasearch

#endif
