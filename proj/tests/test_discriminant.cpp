#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "adiasearch/discriminant.hpp"
#include "adiasearch/hitting.hpp"
#include "adiasearch/jacobi.hpp"
#include "support.hpp"

using namespace adiasearch;

namespace {

StochasticChain two_state() {
    Matrix P(2, 2);
    P << 0.5, 0.5, 0.5, 0.5;
    return new_chain(P, {1});
}

double residual(const Matrix& D, const SpectralDecomposition& sd) {
    double worst = 0.0;
    for (int k = 0; k < sd.size(); ++k) {
        worst = std::max(worst, (D * sd.vectors.col(k) - sd.lambdas(k) * sd.vectors.col(k)).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

TEST(Jacobi, MatchesReferenceEigensolver) {
    std::mt19937_64 rng(11);
    for (int n : {1, 2, 3, 5, 8, 16, 24}) {
        const Matrix A = oracle::random_symmetric(n, rng);
        const SymmetricEigen ours = jacobi_eigen(A);
        Eigen::SelfAdjointEigenSolver<Matrix> ref(A);
        EXPECT_LE((ours.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12) << n;
        EXPECT_LE((ours.vectors.transpose() * ours.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((A * ours.vectors - ours.vectors * ours.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-12);
        for (int k = 1; k < n; ++k) EXPECT_LE(ours.values(k - 1), ours.values(k));
    }
}

TEST(Jacobi, HandlesDegenerateAndDiagonalInput) {
    const Matrix I = Matrix::Identity(4, 4) * 3.0;
    const SymmetricEigen e = jacobi_eigen(I);
    EXPECT_LE((e.values - Vector::Constant(4, 3.0)).cwiseAbs().maxCoeff(), 0.0);
    const Matrix J = Matrix::Ones(5, 5);
    const SymmetricEigen f = jacobi_eigen(J);
    EXPECT_NEAR(f.values(4), 5.0, 1e-13);
    EXPECT_NEAR(f.values(0), 0.0, 1e-13);
}

TEST(Discriminant, TwoStateClosedForm) {
    const StochasticChain c = two_state();
    for (double s : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const Matrix D = discriminant(interpolate(c, s)).D;
        EXPECT_NEAR(D(0, 0), 0.5, 1e-15);
        EXPECT_NEAR(D(0, 1), 0.5 * std::sqrt(1.0 - s), 1e-15);
        EXPECT_NEAR(D(1, 0), 0.5 * std::sqrt(1.0 - s), 1e-15);
        EXPECT_NEAR(D(1, 1), (1.0 + s) / 2.0, 1e-15);
    }
}

TEST(Discriminant, BlockFormAtOne) {
    const StochasticChain c = complete_chain(5, {1, 3}, true);
    const Matrix D = discriminant(interpolate(c, 1.0)).D;
    const std::vector<int> U = c.unmarked();
    for (int x : c.marked) {
        for (int y = 0; y < c.n; ++y) EXPECT_EQ(D(x, y), x == y ? 1.0 : 0.0);
    }
    for (int x : U) {
        for (int y : U) {
            const double similar = std::sqrt(c.pi(x)) * c.P(x, y) / std::sqrt(c.pi(y));
            EXPECT_NEAR(D(x, y), similar, 1e-15);
        }
    }
    EXPECT_LE((discriminant_by_similarity(interpolate(c, 1.0)) - D).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Discriminant, SymmetricChainAtZeroIsP) {
    const StochasticChain c = cycle_chain(6, {0}, true);
    EXPECT_LE((discriminant(interpolate(c, 0.0)).D - c.P).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Eigendecompose, LazyCompleteFour) {
    const StochasticChain c = complete_chain(4, {3}, true);
    const SpectralDecomposition zero = spectral_decomposition(c, 0.0);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(zero.lambdas(k), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(zero.lambdas(3), 1.0, 1e-14);

    const SpectralDecomposition one = spectral_decomposition(c, 1.0);
    EXPECT_NEAR(one.lambdas(0), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(one.lambdas(1), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(one.lambdas(2), 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(one.lambdas(3), 1.0, 1e-14);
    Vector uniform_unmarked(4);
    uniform_unmarked << 1, 1, 1, 0;
    uniform_unmarked.normalize();
    EXPECT_NEAR(std::abs(one.vectors.col(2).dot(uniform_unmarked)), 1.0, 1e-12);
}

TEST(Eigendecompose, TwoStateHalf) {
    const SpectralDecomposition sd = spectral_decomposition(two_state(), 0.5);
    EXPECT_NEAR(sd.lambdas(0), 0.25, 1e-14);
    EXPECT_NEAR(sd.lambdas(1), 1.0, 1e-14);
}

TEST(Eigendecompose, PinsStationaryVector) {
    const StochasticChain c = complete_chain(6, {0, 2}, true);
    for (double s : {0.0, 0.4, 1.0}) {
        const SpectralDecomposition sd = spectral_decomposition(c, s);
        const Vector amp = interpolated_stationary(c, s).cwiseSqrt();
        EXPECT_LE((sd.vectors.col(sd.size() - 1) - amp).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_EQ(sd.lambdas(sd.size() - 1), 1.0);
        EXPECT_EQ(sd.unit_multiplicity, s < 1.0 ? 1 : 2);
    }
}

TEST(Theta, Examples) {
    EXPECT_NEAR(theta(0.25, 0.0), std::numbers::pi / 6.0, 1e-15);
    EXPECT_NEAR(theta(0.5, 0.0), std::numbers::pi / 4.0, 1e-15);
    for (double pM : {0.01, 0.3, 0.9}) EXPECT_NEAR(theta(pM, 1.0), std::numbers::pi / 2.0, 1e-15);
}

TEST(Theta, RateMatchesFiniteDifference) {
    for (double pM : {0.0625, 0.25, 0.6}) {
        for (double s : {0.0, 0.25, 0.5, 0.75, 0.9}) {
            const double fd = finite_difference([&](double u) { return theta(pM, u); }, s, 1e-5);
            const double th = theta(pM, s);
            const double exact = std::cos(th) * std::sin(th) / (1.0 - s);
            EXPECT_NEAR(2.0 * fd, exact, 1e-8 * exact);
            EXPECT_NEAR(theta_rate(pM, s), fd, 1e-8 * fd);
        }
    }
}

TEST(RotationFrame, LazyCompleteFour) {
    const StochasticChain c = complete_chain(4, {3}, true);
    const RotationFrame f = rotation_frame(c, 0.0);
    for (int x = 0; x < 4; ++x) EXPECT_NEAR(f.vn(x), 0.5, 1e-15);
    for (int x = 0; x < 3; ++x) EXPECT_NEAR(f.U(x), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_EQ(f.U(3), 0.0);
    EXPECT_NEAR(f.Mvec(3), 1.0, 1e-15);

    const RotationFrame end = rotation_frame(c, 1.0);
    EXPECT_LE((end.vn - end.Mvec).cwiseAbs().maxCoeff(), 1e-15);

    for (double s : gen::grid(11)) {
        const RotationFrame g = rotation_frame(c, s);
        EXPECT_NEAR(g.U.dot(g.vn), std::cos(g.theta), 1e-14);
    }
}

TEST(SpectrumCsv, HeaderAndRows) {
    const StochasticChain c = two_state();
    std::ostringstream out;
    write_spectrum_csv(out, {spectral_decomposition(c, 0.0), spectral_decomposition(c, 0.5)});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "s,k,lambda");
    const double expected[4][3] = {{0, 1, 0}, {0, 2, 1}, {0.5, 1, 0.25}, {0.5, 2, 1}};
    for (const auto& row : expected) {
        ASSERT_TRUE(std::getline(in, line));
        double s = 0, lambda = 0;
        int k = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%d,%lf", &s, &k, &lambda), 3) << line;
        EXPECT_EQ(s, row[0]);
        EXPECT_EQ(k, static_cast<int>(row[1]));
        EXPECT_NEAR(lambda, row[2], 1e-15);
    }
    EXPECT_FALSE(std::getline(in, line));
}

TEST(AlignSigns, MakesOverlapsNonnegative) {
    const StochasticChain c = gen::lazy_chain(3);
    const SpectralDecomposition a = spectral_decomposition(c, 0.3);
    SpectralDecomposition b = spectral_decomposition(c, 0.31);
    b.vectors.col(0) *= -1.0;
    align_signs(a, b);
    for (int k = 0; k < b.size(); ++k) EXPECT_GE(a.vectors.col(k).dot(b.vectors.col(k)), 0.0);
}

// Property tests over hand-rolled random reversible chains.

TEST(DiscriminantProperties, TypeInvariants) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed);
        for (double s : gen::grid(6)) {
            const InterpolatedChain ic = interpolate(c, s);
            const Discriminant d = discriminant(ic);
            EXPECT_LE((d.D - d.D.transpose()).cwiseAbs().maxCoeff(), 1e-12);
            for (int x = 0; x < c.n; ++x) {
                for (int y = 0; y < c.n; ++y) {
                    EXPECT_NEAR(d.D(x, y), std::sqrt(ic.Ps(x, y) * ic.Ps(y, x)), 1e-14);
                }
            }
            const Vector amp = ic.pis.cwiseSqrt();
            EXPECT_LE((d.D * amp - amp).cwiseAbs().maxCoeff(), 1e-10);
            if (s < 1.0) {
                EXPECT_LE((discriminant_by_similarity(ic) - d.D).cwiseAbs().maxCoeff(), 1e-10);
            }
        }
    }
}

TEST(DiscriminantProperties, DecompositionContract) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed);
        for (double s : gen::grid(11)) {
            const SpectralDecomposition sd = spectral_decomposition(c, s);
            const Matrix D = discriminant(interpolate(c, s)).D;
            const int n = c.n;
            EXPECT_LE(residual(D, sd), 1e-10) << seed << " s=" << s;
            EXPECT_LE((sd.vectors.transpose() * sd.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_LE((sd.vectors * sd.lambdas.asDiagonal() * sd.vectors.transpose() - D).cwiseAbs().maxCoeff(), 1e-9);
            EXPECT_NEAR(sd.lambdas(n - 1), 1.0, 1e-10);
            EXPECT_GE(sd.lambdas.minCoeff(), -1e-10);
            const int m = static_cast<int>(c.marked.size());
            EXPECT_EQ(sd.unit_multiplicity, s < 1.0 ? 1 : m) << seed << " s=" << s;
            if (s < 1.0) {
                EXPECT_LT(sd.lambdas(n - 2), 1.0);
            }
        }
    }
}

TEST(DiscriminantProperties, SimilarToInterpolatedChain) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed);
        for (double s : gen::grid(10, 0.0, 0.95)) {
            Eigen::EigenSolver<Matrix> general(interpolate(c, s).Ps, false);
            std::vector<double> re;
            for (const auto& z : general.eigenvalues()) {
                EXPECT_LE(std::abs(z.imag()), 1e-8);
                re.push_back(z.real());
            }
            std::sort(re.begin(), re.end());
            const SpectralDecomposition sd = spectral_decomposition(c, s);
            for (int k = 0; k < c.n; ++k) EXPECT_NEAR(re[k], sd.lambdas(k), 1e-8);
        }
    }
}

TEST(DiscriminantProperties, RotationFrameInvariants) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed);
        for (double s : gen::grid(11)) {
            const RotationFrame f = rotation_frame(c, s);
            const double ct = std::cos(f.theta);
            const double st = std::sin(f.theta);
            EXPECT_NEAR(f.U.dot(f.Mvec), 0.0, 1e-15);
            for (const Vector* v : {&f.U, &f.Mvec, &f.vn, &f.vnPerp}) EXPECT_NEAR(v->norm(), 1.0, 1e-12);
            EXPECT_LE((f.vn - (ct * f.U + st * f.Mvec)).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_LE((f.vnPerp - (-st * f.U + ct * f.Mvec)).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_NEAR(f.vn.dot(f.vnPerp), 0.0, 1e-12);
            EXPECT_LE((f.vn - interpolated_stationary(c, s).cwiseSqrt()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}
