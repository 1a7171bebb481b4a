#ifndef ADIASEARCH_HITTING_HPP
#define ADIASEARCH_HITTING_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "adiasearch/chain.hpp"
#include "adiasearch/types.hpp"

namespace adiasearch {

enum class HittingMethod { linear_solve, series, monte_carlo };

std::string method_name(HittingMethod method);

struct HittingReport {
    double ht = 0.0;
    HittingMethod method = HittingMethod::linear_solve;
    double stderr_ = 0.0; ///< monte_carlo only
    long long trials = 0;  ///< monte_carlo only
    long long t_max = 0;   ///< series only
};

inline constexpr long long kMaxWalkSteps = 10'000'000;

/// HT(P, M) = <U| (I - D_UU(1))^-1 |U>, the expected number of walk steps
/// to reach M from pi restricted to the unmarked vertices. Reported for the
/// chain exactly as given (no laziness correction).
HittingReport classical_hitting_time(const StochasticChain& chain);

/// Partial sum of <U| D(1)^t |U> for t = 0..t_max.
double hitting_time_series(const StochasticChain& chain, long long t_max);

/// Smallest t_max whose neglected tail is provably below tol, from the
/// spectral radius of the unmarked block.
long long series_terms_for_tail(const StochasticChain& chain, double tol);

HittingReport series_hitting_time(const StochasticChain& chain, long long t_max);

/// Mean absorption time of walks started from pi restricted to unmarked.
/// Trial i draws from its own stream derived from (seed, i).
HittingReport monte_carlo_hitting_time(const StochasticChain& chain, long long trials,
                                       std::uint64_t seed);

/// HT(s) = sum_{k != n} |<v_k(s)|U>|^2 / (1 - lambda_k(s)).
double extended_hitting_time(const StochasticChain& chain, double s);

/// A(s) b computed as B(s)^-1 b - <v_n|b> v_n with B = I - D + v_n v_n^T.
Vector apply_A(const StochasticChain& chain, double s, const Vector& b);

struct ResolventProbe {
    double s = 0.0;
    double value = 0.0;
};

/// <a| A(s) |b>.
ResolventProbe probe_A(const StochasticChain& chain, double s, const Vector& a, const Vector& b);

/// A(s) by eigenexpansion, skipping the unit cluster. Cross-check only.
Matrix resolvent_by_eigenexpansion(const StochasticChain& chain, double s);

/// Closed-form dD/ds from the block structure of D(s); s must be < 1.
Matrix d_discriminant(const StochasticChain& chain, double s);

/// Second-order finite difference of f at s, central when [s-h, s+h] fits
/// inside [0, 1], one-sided otherwise.
template <typename F>
auto finite_difference(F&& f, double s, double h) -> std::decay_t<decltype(f(s))> {
    if (s - h >= 0.0 && s + h <= 1.0) return (f(s + h) - f(s - h)) / (2.0 * h);
    if (s - h < 0.0) return (-3.0 * f(s) + 4.0 * f(s + h) - f(s + 2.0 * h)) / (2.0 * h);
    return (3.0 * f(s) - 4.0 * f(s - h) + f(s - 2.0 * h)) / (2.0 * h);
}

struct LemmaRow {
    double s = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double deviation = 0.0;
};

struct LemmaCheck {
    double max_deviation = 0.0;
    std::vector<LemmaRow> rows;
};

/// Compares HT(s) against HT(P,M) sin^4(theta(s)); deviation is relative
/// to HT(P,M).
LemmaCheck verify_lemma_HT(const StochasticChain& chain, const std::vector<double>& grid);

/// Compares a finite difference of HT(s) against
/// 4 theta'(s) cot(theta(s)) HT(s); deviation is relative to the right side.
LemmaCheck verify_derivative_lemma(const StochasticChain& chain, const std::vector<double>& grid,
                                   double h = 1e-5);

/// "s,HT_s,HT_times_sin4theta,deviation" at 17 significant digits.
void write_lemma_csv(std::ostream& out, const LemmaCheck& check);

} // namespace adiasearch

#endif
