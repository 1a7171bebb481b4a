#include "adiasearch/discriminant.hpp"

#include <algorithm>
#include <cmath>

#include "adiasearch/error.hpp"
#include "adiasearch/format.hpp"
#include "adiasearch/jacobi.hpp"

namespace adiasearch {

Discriminant discriminant(const InterpolatedChain& interp) {
    const Matrix& Ps = interp.Ps;
    const Eigen::Index n = Ps.rows();
    Discriminant d;
    d.s = interp.s;
    d.D.resize(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        d.D(x, x) = Ps(x, x);
        for (Eigen::Index y = x + 1; y < n; ++y) {
            const double v = std::sqrt(Ps(x, y) * Ps(y, x));
            d.D(x, y) = v;
            d.D(y, x) = v;
        }
    }
    d.stationary_amplitudes = interp.pis.cwiseSqrt();
    return d;
}

Matrix discriminant_by_similarity(const InterpolatedChain& interp) {
    const StochasticChain& chain = interp.base;
    const int n = chain.n;
    if (interp.s < 1.0) {
        const Vector root = interp.pis.cwiseSqrt();
        return root.asDiagonal() * interp.Ps * root.cwiseInverse().asDiagonal();
    }
    // s = 1: unmarked block similar to P_UU, identity on marked.
    Matrix D = Matrix::Zero(n, n);
    const Vector root = chain.pi.cwiseSqrt();
    for (int x = 0; x < n; ++x) {
        if (chain.is_marked(x)) {
            D(x, x) = 1.0;
            continue;
        }
        for (int y = 0; y < n; ++y) {
            if (!chain.is_marked(y)) D(x, y) = root(x) * chain.P(x, y) / root(y);
        }
    }
    return D;
}

SpectralDecomposition eigendecompose(const Discriminant& d) {
    const Eigen::Index n = d.D.rows();
    const SymmetricEigen eig = jacobi_eigen(d.D);

    std::vector<Eigen::Index> rest;
    std::vector<Eigen::Index> cluster;
    for (Eigen::Index k = 0; k < n; ++k) {
        (std::abs(eig.values(k) - 1.0) <= kUnitClusterTolerance ? cluster : rest).push_back(k);
    }
    if (cluster.empty()) {
        cluster.push_back(rest.back());
        rest.pop_back();
    }

    const Vector vn = d.stationary_amplitudes.normalized();

    // Remaining cluster basis: the top c-1 principal directions of the
    // cluster columns after projecting out vn.
    const auto c = static_cast<Eigen::Index>(cluster.size());
    Matrix C(n, c);
    for (Eigen::Index j = 0; j < c; ++j) C.col(j) = eig.vectors.col(cluster[j]);
    C -= vn * (vn.transpose() * C);
    const SymmetricEigen gram = jacobi_eigen(C.transpose() * C);

    std::vector<std::pair<double, Vector>> extra;
    for (Eigen::Index j = c - 1; j >= 1; --j) {
        const double mu = gram.values(j);
        if (mu <= 0.0) {
            throw Error(ErrorKind::EigensolverFailure,
                        "unit eigenspace lost rank while pinning sqrt(pi)");
        }
        Vector v = C * gram.vectors.col(j) / std::sqrt(mu);
        v -= vn * vn.dot(v);
        v.normalize();
        extra.emplace_back(v.dot(d.D * v), std::move(v));
    }
    std::sort(extra.begin(), extra.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SpectralDecomposition sd;
    sd.s = d.s;
    sd.lambdas.resize(n);
    sd.vectors.resize(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index r : rest) {
        sd.lambdas(k) = eig.values(r);
        sd.vectors.col(k) = eig.vectors.col(r);
        ++k;
    }
    for (auto& [lambda, v] : extra) {
        sd.lambdas(k) = lambda;
        sd.vectors.col(k) = v;
        ++k;
    }
    sd.lambdas(k) = 1.0;
    sd.vectors.col(k) = vn;
    sd.unit_multiplicity = static_cast<int>(c);
    return sd;
}

SpectralDecomposition spectral_decomposition(const StochasticChain& chain, double s) {
    return eigendecompose(discriminant(interpolate(chain, s)));
}

void align_signs(const SpectralDecomposition& prev, SpectralDecomposition& next) {
    const Eigen::Index n = std::min(prev.vectors.cols(), next.vectors.cols());
    for (Eigen::Index k = 0; k < n; ++k) {
        if (prev.vectors.col(k).dot(next.vectors.col(k)) < 0.0) {
            next.vectors.col(k) *= -1.0;
        }
    }
}

double theta(double pM, double s) {
    // tan^2(theta) = pM / ((1 - s)(1 - pM)); exact at s = 1.
    return std::atan2(std::sqrt(pM), std::sqrt((1.0 - s) * (1.0 - pM)));
}

double theta_rate(double pM, double s) {
    const double th = theta(pM, s);
    return std::cos(th) * std::sin(th) / (2.0 * (1.0 - s));
}

RotationFrame rotation_frame(const StochasticChain& chain, double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorKind::SOutOfRange, "s = " + std::to_string(s));
    }
    if (chain.marked.empty() || static_cast<int>(chain.marked.size()) >= chain.n) {
        throw Error(ErrorKind::InvalidMarkedSet, "rotation frame needs 0 < |M| < n");
    }
    RotationFrame f;
    f.s = s;
    f.theta = theta(chain.pM, s);
    f.piVec = chain.pi.cwiseSqrt();
    f.U = Vector::Zero(chain.n);
    f.Mvec = Vector::Zero(chain.n);
    for (int x = 0; x < chain.n; ++x) {
        (chain.is_marked(x) ? f.Mvec : f.U)(x) = f.piVec(x);
    }
    f.U /= std::sqrt(1.0 - chain.pM);
    f.Mvec /= std::sqrt(chain.pM);
    const double c = std::cos(f.theta);
    const double sn = std::sin(f.theta);
    f.vn = c * f.U + sn * f.Mvec;
    f.vnPerp = -sn * f.U + c * f.Mvec;
    return f;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectralDecomposition>& sweep) {
    out << "s,k,lambda\n";
    for (const auto& sd : sweep) {
        for (int k = 0; k < sd.size(); ++k) {
            out << format_double(sd.s) << ',' << (k + 1) << ',' << format_double(sd.lambdas(k))
                << '\n';
        }
    }
}

std::vector<double> uniform_grid(int points, double lo, double hi) {
    if (points < 2) throw Error(ErrorKind::BadParams, "grid needs at least 2 points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    }
    grid.back() = hi;
    return grid;
}

} // namespace adiasearch
