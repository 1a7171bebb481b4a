#ifndef ADIASEARCH_JACOBI_HPP
#define ADIASEARCH_JACOBI_HPP

#include "adiasearch/types.hpp"

namespace adiasearch {

struct SymmetricEigen {
    Vector values;  ///< ascending
    Matrix vectors; ///< column k pairs with values(k)
    int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// Each sweep annihilates every off-diagonal pair once with a plane rotation;
/// iteration stops when the off-diagonal Frobenius norm falls to roundoff
/// relative to the whole matrix. Eigenvalues come back ascending with an
/// orthonormal eigenvector basis accumulated from the rotations. Throws
/// EigensolverFailure if max_sweeps is exhausted.
SymmetricEigen jacobi_eigen(const Matrix& A, int max_sweeps = 100);

} // namespace adiasearch

#endif
