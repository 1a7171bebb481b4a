#ifndef ADIASEARCH_DISCRIMINANT_HPP
#define ADIASEARCH_DISCRIMINANT_HPP

#include <ostream>
#include <utility>
#include <vector>

#include "adiasearch/chain.hpp"
#include "adiasearch/types.hpp"

namespace adiasearch {

/// Eigenvalues closer than this to 1 are treated as part of the unit cluster.
inline constexpr double kUnitClusterTolerance = 1e-8;

struct Discriminant {
    double s = 0.0;
    Matrix D;
    /// Entrywise sqrt(pi(s)), the analytic eigenvector for eigenvalue 1.
    Vector stationary_amplitudes;
};

/// D(s) = sqrt(P(s) o P(s)^T), entrywise.
Discriminant discriminant(const InterpolatedChain& interp);

/// The same matrix through the similarity diag(sqrt pi) P diag(sqrt pi)^-1
/// for s < 1, and through the explicit block form for s = 1. Only
/// meaningful for reversible chains; used as an independent cross-check.
Matrix discriminant_by_similarity(const InterpolatedChain& interp);

struct SpectralDecomposition {
    double s = 0.0;
    Vector lambdas;  ///< ascending; lambdas(n-1) == 1
    Matrix vectors;  ///< orthonormal columns; the last one is sqrt(pi(s))
    /// Number of eigenvalues within kUnitClusterTolerance of 1.
    int unit_multiplicity = 0;

    int size() const { return static_cast<int>(lambdas.size()); }
};

/// Ascending eigendecomposition of D with the top eigenvector pinned to the
/// analytic stationary amplitudes. Any other eigenvectors in the unit
/// cluster (s = 1) are re-orthogonalised against it.
SpectralDecomposition eigendecompose(const Discriminant& d);

SpectralDecomposition spectral_decomposition(const StochasticChain& chain, double s);

/// Flips signs of next's eigenvectors so each has nonnegative overlap with
/// the matching column of prev. Cosmetic only (for plotting sweeps).
void align_signs(const SpectralDecomposition& prev, SpectralDecomposition& next);

/// theta(s) = arcsin sqrt(pM / (1 - s (1 - pM))).
double theta(double pM, double s);

/// d theta / ds = cos(theta) sin(theta) / (2 (1 - s)).
double theta_rate(double pM, double s);

struct RotationFrame {
    double s = 0.0;
    double theta = 0.0;
    Vector U;      ///< sqrt(pi) restricted to unmarked, normalised
    Vector Mvec;   ///< sqrt(pi) restricted to marked, normalised
    Vector piVec;  ///< sqrt(pi)
    Vector vn;     ///< cos(theta) U + sin(theta) M
    Vector vnPerp; ///< -sin(theta) U + cos(theta) M
};

RotationFrame rotation_frame(const StochasticChain& chain, double s);

/// Writes "s,k,lambda" rows (k is 1-based) at 17 significant digits.
void write_spectrum_csv(std::ostream& out, const std::vector<SpectralDecomposition>& sweep);

/// n evenly spaced points on [lo, hi], endpoints included.
std::vector<double> uniform_grid(int points, double lo = 0.0, double hi = 1.0);

} // namespace adiasearch

#endif
