#include "adiasearch/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "adiasearch/error.hpp"

namespace adiasearch {

namespace {

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index q = 1; q < a.cols(); ++q) {
        for (Eigen::Index p = 0; p < q; ++p) sum += a(p, q) * a(p, q);
    }
    return std::sqrt(2.0 * sum);
}

} // namespace

SymmetricEigen jacobi_eigen(const Matrix& A, int max_sweeps) {
    if (A.rows() != A.cols()) {
        throw Error(ErrorKind::BadParams, "jacobi_eigen needs a square matrix");
    }
    const Eigen::Index n = A.rows();
    Matrix a = 0.5 * (A + A.transpose());
    Matrix v = Matrix::Identity(n, n);
    const double scale = a.norm();
    const double target = 1e-17 * scale;

    int sweep = 0;
    for (;; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off <= target || off == 0.0) break;
        if (sweep >= max_sweeps) {
            throw Error(ErrorKind::EigensolverFailure,
                        "Jacobi did not converge in " + std::to_string(max_sweeps) +
                            " sweeps (off-diagonal norm " + std::to_string(off) + ")");
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Skip rotations that cannot change the diagonal at working
                // precision once the sweep count makes convergence likely.
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    SymmetricEigen result;
    result.values.resize(n);
    result.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        result.values(k) = a(order[k], order[k]);
        result.vectors.col(k) = v.col(order[k]);
    }
    result.sweeps = sweep;
    return result;
}

} // namespace adiasearch
