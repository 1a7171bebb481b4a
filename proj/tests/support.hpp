#ifndef ADIASEARCH_TESTS_SUPPORT_HPP
#define ADIASEARCH_TESTS_SUPPORT_HPP

// Independent reference computations for the unit tests. None of these call
// into the library's numerical routines; they rebuild each quantity from its
// definition with deliberately different algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "adiasearch/chain.hpp"
#include "adiasearch/random.hpp"
#include "adiasearch/types.hpp"

namespace oracle {

using adiasearch::ComplexMatrix;
using adiasearch::Matrix;
using adiasearch::Vector;

/// Gaussian elimination with partial pivoting on plain vectors.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

/// Left fixed vector of P by iterating pi <- pi (P + I) / 2 from uniform.
inline Vector power_iteration_stationary(const Matrix& P, int max_iter = 2'000'000) {
    const auto n = P.rows();
    Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < max_iter; ++it) {
        Vector next = 0.5 * (P.transpose() * pi + pi);
        next /= next.sum();
        const double change = (next - pi).cwiseAbs().maxCoeff();
        pi = next;
        if (change < 1e-17) break;
    }
    return pi;
}

/// Expected absorption time from pi restricted to the unmarked vertices,
/// through the fundamental matrix: t = (I - Q)^-1 1 with Q = P_UU.
inline double fundamental_hitting_time(const Matrix& P, const Vector& pi,
                                       const std::vector<int>& marked) {
    std::vector<int> unmarked;
    for (int x = 0; x < P.rows(); ++x) {
        if (std::find(marked.begin(), marked.end(), x) == marked.end()) unmarked.push_back(x);
    }
    const std::size_t u = unmarked.size();
    std::vector<std::vector<double>> a(u, std::vector<double>(u));
    for (std::size_t i = 0; i < u; ++i) {
        for (std::size_t j = 0; j < u; ++j) {
            a[i][j] = (i == j ? 1.0 : 0.0) - P(unmarked[i], unmarked[j]);
        }
    }
    const std::vector<double> t = gauss_solve(a, std::vector<double>(u, 1.0));
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
        mass += pi(unmarked[i]);
        acc += pi(unmarked[i]) * t[i];
    }
    return acc / mass;
}

/// Edge-space operators rebuilt from explicit Kronecker-structured matrices.
struct EdgeSpace {
    Matrix V;
    Matrix S;
    Matrix Pi0;
    Matrix W;
    ComplexMatrix H;
};

inline EdgeSpace edge_space(const Matrix& Ps) {
    const auto n = static_cast<int>(Ps.rows());
    const int dim = n * n;
    EdgeSpace e;
    e.V = Matrix::Zero(dim, dim);
    for (int x = 0; x < n; ++x) {
        Vector p = Ps.row(x).transpose().cwiseSqrt();
        Vector u = -p;
        u(0) += 1.0;
        Matrix block = Matrix::Identity(n, n);
        if (u.norm() > 1e-15) block -= 2.0 * u * u.transpose() / u.squaredNorm();
        e.V.block(x * n, x * n, n, n) = block;
    }
    e.S = Matrix::Zero(dim, dim);
    e.Pi0 = Matrix::Zero(dim, dim);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) e.S(y * n + x, x * n + y) = 1.0;
        e.Pi0(x * n, x * n) = 1.0;
    }
    e.W = e.V.transpose() * e.S * e.V;
    const Matrix K = e.W * e.Pi0 - e.Pi0 * e.W;
    e.H = adiasearch::Complex(0.0, 1.0) * K.cast<adiasearch::Complex>();
    return e;
}

/// exp(A) by scaling and squaring of a truncated Taylor series.
inline ComplexMatrix taylor_expm(const ComplexMatrix& A) {
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
    const ComplexMatrix B = A / std::ldexp(1.0, squarings);
    ComplexMatrix result = ComplexMatrix::Identity(A.rows(), A.cols());
    ComplexMatrix term = result;
    for (int k = 1; k <= 24; ++k) {
        term = (term * B / static_cast<double>(k)).eval();
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = (result * result).eval();
    return result;
}

inline Matrix random_symmetric(int n, std::mt19937_64& rng) {
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            A(i, j) = A(j, i) = 2.0 * adiasearch::uniform01(rng) - 1.0;
        }
    }
    return A;
}

} // namespace oracle

namespace gen {

using adiasearch::Matrix;
using adiasearch::StochasticChain;

/// Random connected weighted graph with symmetric positive weights and random
/// self-loop weights, normalised by weighted degree: reversible by
/// construction, independent of the library's generator.
inline Matrix reversible_matrix(int n, std::uint64_t seed, bool lazy) {
    std::mt19937_64 rng(adiasearch::derive_seed(seed, 0xC0FFEE));
    Matrix W = Matrix::Zero(n, n);
    for (int v = 1; v < n; ++v) {
        const auto u = static_cast<int>(adiasearch::uniform_index(rng, static_cast<std::uint64_t>(v)));
        W(u, v) = W(v, u) = 0.2 + adiasearch::uniform01(rng);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (W(i, j) == 0.0 && adiasearch::uniform01(rng) < 0.3) {
                W(i, j) = W(j, i) = 0.2 + adiasearch::uniform01(rng);
            }
        }
        if (adiasearch::uniform01(rng) < 0.5) W(i, i) = adiasearch::uniform01(rng);
    }
    Matrix P = W;
    for (int i = 0; i < n; ++i) P.row(i) /= W.row(i).sum();
    if (lazy) P = 0.5 * (P + Matrix::Identity(n, n));
    return P;
}

/// Nonempty proper subset of {0..n-1}.
inline std::vector<int> marked_set(int n, std::uint64_t seed, int max_size = -1) {
    std::mt19937_64 rng(adiasearch::derive_seed(seed, 0xBEEF));
    const int cap = max_size > 0 ? std::min(max_size, n - 1) : n - 1;
    const int m = 1 + static_cast<int>(adiasearch::uniform_index(rng, static_cast<std::uint64_t>(cap)));
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    adiasearch::shuffle(all, rng);
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
}

/// Lazy reversible chain with 3 <= n <= max_n and a random marked set.
inline StochasticChain lazy_chain(std::uint64_t seed, int max_n = 8, int max_marked = -1) {
    std::mt19937_64 rng(adiasearch::derive_seed(seed, 0xABC));
    const int n = 3 + static_cast<int>(adiasearch::uniform_index(rng, static_cast<std::uint64_t>(max_n - 2)));
    return adiasearch::new_chain(reversible_matrix(n, seed, true), marked_set(n, seed, max_marked), true);
}

inline std::vector<double> grid(int points, double lo = 0.0, double hi = 1.0) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

} // namespace gen

#endif
