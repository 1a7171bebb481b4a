#ifndef ADIASEARCH_HAMILTONIAN_HPP
#define ADIASEARCH_HAMILTONIAN_HPP

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "adiasearch/chain.hpp"
#include "adiasearch/discriminant.hpp"
#include "adiasearch/types.hpp"

namespace adiasearch {

/// Largest vertex count for which edge-space (n^2) operators are built.
inline constexpr int kEdgeSpaceCap = 32;

// Edge-space basis |x, y> has flat index x * n + y. The reference state |0>
// of the second register is vertex 0.
inline int edge_index(int n, int x, int y) { return x * n + y; }

/// Per-vertex blocks V_x of the block-diagonal isometry completion V(s):
/// V_x is the Householder reflection sending |0> to |p_x(s)>, optionally
/// post-composed with a map that fixes |0>.
struct EdgeBlocks {
    int n = 0;
    std::vector<Matrix> V;
};

EdgeBlocks householder_blocks(const InterpolatedChain& interp,
                              std::span<const Matrix> fixers = {});

/// W psi = V^T S V psi in O(n^3) using the block structure.
Vector apply_W(const EdgeBlocks& blocks, const Vector& psi);

/// K psi = (W Pi0 - Pi0 W) psi, so that H = i K.
Vector apply_generator(const EdgeBlocks& blocks, const Vector& psi);

/// |v, 0> embedded in edge space.
Vector embed_reference(const Vector& v);

struct EdgeOperators {
    double s = 0.0;
    int n = 0;
    Matrix V;        ///< n^2 x n^2, orthogonal
    Matrix W;        ///< V^T S V, symmetric orthogonal
    Matrix K;        ///< W Pi0 - Pi0 W, real antisymmetric
    ComplexMatrix H; ///< i K, Hermitian
};

/// Throws DimensionCap above kEdgeSpaceCap vertices.
Matrix build_V(const InterpolatedChain& interp, std::span<const Matrix> fixers = {});

EdgeOperators build_H(const InterpolatedChain& interp, std::span<const Matrix> fixers = {});

/// Ascending eigenvalues of H by a dense Hermitian eigensolver.
Vector hamiltonian_eigenvalues(const EdgeOperators& ops);

struct AnalyticSpectrum {
    /// Indices k (0-based into the discriminant spectrum) carrying a pair.
    std::vector<int> pair_index;
    Vector energies;          ///< sqrt(1 - lambda_k^2) per pair; E_k± = ±energies(j)
    Matrix reference_states;  ///< |v_k, 0>, one column per pair
    Matrix perp_states;       ///< |v_k, 0>^perp = K |v_k, 0> / sqrt(1 - lambda_k^2)
    ComplexMatrix plus_states;  ///< (|v_k,0> + i |v_k,0>^perp) / sqrt 2
    ComplexMatrix minus_states; ///< (|v_k,0> - i |v_k,0>^perp) / sqrt 2
    Vector psi_n;             ///< |v_n, 0>
    int zeroDim = 0;

    /// Full multiset {±energies} ∪ {0^zeroDim}, ascending.
    Vector all_energies() const;
};

/// Eigenpairs of H predicted from the discriminant spectrum. Unit-cluster
/// eigenvalues other than lambda_n (s = 1) fold into the zero space.
AnalyticSpectrum analytic_spectrum(const EdgeOperators& ops, const SpectralDecomposition& spectral);

struct BlockActionReport {
    /// max over pairs of |restriction - sqrt(1 - lambda^2) sigma_y|, entrywise,
    /// together with the leakage of H out of each two-dimensional block.
    double max_deviation = 0.0;
    /// Frobenius norm of H compressed to the complement of all blocks.
    double complement_norm = 0.0;
};

BlockActionReport verify_block_action(const EdgeOperators& ops,
                                      const SpectralDecomposition& spectral);

/// Norm of the component of d/ds |v_n(s), 0> outside the span of the
/// blocks B_k(s), by finite difference with step ds.
double no_leak_check(const StochasticChain& chain, double s, double ds = 1e-5);

/// Binary dump: "ADIAWH01", u32 dimension, then dim^2 (re, im) pairs of
/// little-endian doubles in row-major order.
void write_hamiltonian_binary(std::ostream& out, const ComplexMatrix& H);
ComplexMatrix read_hamiltonian_binary(std::istream& in);

} // namespace adiasearch

#endif
