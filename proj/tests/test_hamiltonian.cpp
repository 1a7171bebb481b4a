#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "adiasearch/discriminant.hpp"
#include "adiasearch/error.hpp"
#include "adiasearch/hamiltonian.hpp"
#include "support.hpp"

using namespace adiasearch;

namespace {

StochasticChain two_state() {
    Matrix P(2, 2);
    P << 0.5, 0.5, 0.5, 0.5;
    return new_chain(P, {1});
}

EdgeOperators ops_for(const StochasticChain& c, double s) { return build_H(interpolate(c, s)); }

double spectral_norm(const ComplexMatrix& H) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> e(H, Eigen::EigenvaluesOnly);
    return e.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<Matrix> random_fixers(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Matrix> out;
    for (int x = 0; x < n; ++x) {
        Eigen::HouseholderQR<Matrix> qr(oracle::random_symmetric(n - 1, rng) + Matrix::Identity(n - 1, n - 1));
        Matrix F = Matrix::Identity(n, n);
        F.bottomRightCorner(n - 1, n - 1) = qr.householderQ() * Matrix::Identity(n - 1, n - 1);
        out.push_back(F);
    }
    return out;
}

} // namespace

TEST(BuildV, IdentityWhenRowsAlreadyReference) {
    InterpolatedChain interp;
    interp.base = complete_chain(3, {0});
    interp.Ps = Matrix::Zero(3, 3);
    interp.Ps.col(0).setOnes();
    EXPECT_LE((build_V(interp) - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildV, TwoStateFirstColumn) {
    const Matrix V = build_V(interpolate(two_state(), 0.0));
    EXPECT_NEAR(V(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(V(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(BuildV, OrthogonalWithStateColumns) {
    const StochasticChain c = random_reversible_chain(5, 3, 1, {0}, true);
    const InterpolatedChain ic = interpolate(c, 0.3);
    const Matrix V = build_V(ic);
    EXPECT_LE((V.transpose() * V - Matrix::Identity(25, 25)).cwiseAbs().maxCoeff(), 1e-12);
    for (int x = 0; x < 5; ++x) {
        for (int y = 0; y < 5; ++y) {
            EXPECT_EQ(V(edge_index(5, x, y), edge_index(5, x, 0)), std::sqrt(ic.Ps(x, y)));
        }
    }
}

TEST(BuildH, MatchesExplicitConstruction) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed, 6);
        for (double s : {0.0, 0.3, 0.7, 1.0}) {
            const InterpolatedChain ic = interpolate(c, s);
            const EdgeOperators ops = build_H(ic);
            const oracle::EdgeSpace ref = oracle::edge_space(ic.Ps);
            EXPECT_LE((ops.V - ref.V).cwiseAbs().maxCoeff(), 1e-14);
            EXPECT_LE((ops.W - ref.W).cwiseAbs().maxCoeff(), 1e-14);
            EXPECT_LE((ops.H - ref.H).cwiseAbs().maxCoeff(), 1e-14);
        }
    }
}

TEST(BuildH, MatrixFreeActionsMatchDense) {
    const StochasticChain c = gen::lazy_chain(4, 7);
    const InterpolatedChain ic = interpolate(c, 0.6);
    const EdgeOperators ops = build_H(ic);
    const EdgeBlocks blocks = householder_blocks(ic);
    std::mt19937_64 rng(5);
    Vector psi(c.n * c.n);
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = uniform01(rng) - 0.5;
    EXPECT_LE((apply_W(blocks, psi) - ops.W * psi).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((apply_generator(blocks, psi) - ops.K * psi).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BuildH, UnlazyTwoStateSpectrum) {
    const Vector e = hamiltonian_eigenvalues(ops_for(two_state(), 0.0));
    EXPECT_NEAR(e(0), -1.0, 1e-14);
    EXPECT_NEAR(e(1), 0.0, 1e-14);
    EXPECT_NEAR(e(2), 0.0, 1e-14);
    EXPECT_NEAR(e(3), 1.0, 1e-14);
}

TEST(BuildH, AnnihilatesStationaryStateAndIsTraceless) {
    const StochasticChain c = complete_chain(4, {3}, true);
    const EdgeOperators ops = ops_for(c, 0.5);
    const Vector psi = embed_reference(interpolated_stationary(c, 0.5).cwiseSqrt());
    EXPECT_LE((ops.H * psi.cast<Complex>()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(std::abs(ops.H.trace()), 1e-10);
    EXPECT_LE((ops.H - ops.H.adjoint()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildH, DimensionCap) {
    const StochasticChain c = complete_chain(33, {0}, true);
    try {
        build_H(interpolate(c, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionCap);
    }
}

TEST(AnalyticSpectrum, LazyCompleteFourAtOne) {
    const StochasticChain c = complete_chain(4, {3}, true);
    const EdgeOperators ops = ops_for(c, 1.0);
    const AnalyticSpectrum spec = analytic_spectrum(ops, spectral_decomposition(c, 1.0));
    std::vector<double> positive;
    for (Eigen::Index j = 0; j < spec.energies.size(); ++j) positive.push_back(spec.energies(j));
    std::sort(positive.begin(), positive.end());
    ASSERT_EQ(positive.size(), 3u);
    EXPECT_NEAR(positive[0], std::sqrt(11.0) / 6.0, 1e-12);
    EXPECT_NEAR(positive[1], 2.0 * std::sqrt(2.0) / 3.0, 1e-12);
    EXPECT_NEAR(positive[2], 2.0 * std::sqrt(2.0) / 3.0, 1e-12);
    EXPECT_LE((spec.all_energies() - hamiltonian_eigenvalues(ops)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AnalyticSpectrum, ZeroSpaceDimensionBelowOne) {
    const StochasticChain c = complete_chain(4, {3}, true);
    const EdgeOperators ops = ops_for(c, 0.4);
    const AnalyticSpectrum spec = analytic_spectrum(ops, spectral_decomposition(c, 0.4));
    EXPECT_EQ(spec.zeroDim, 10);
    const Vector e = hamiltonian_eigenvalues(ops);
    EXPECT_EQ((e.array().abs() < 1e-8).count(), 10);
}

TEST(AnalyticSpectrum, EigenpairsAndOrthonormality) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed, 6);
        for (double s : {0.0, 0.5, 0.9}) {
            const EdgeOperators ops = ops_for(c, s);
            const AnalyticSpectrum spec = analytic_spectrum(ops, spectral_decomposition(c, s));
            EXPECT_EQ(spec.zeroDim, (c.n - 1) * (c.n - 1) + 1);
            ComplexMatrix all(c.n * c.n, 2 * spec.energies.size());
            for (Eigen::Index j = 0; j < spec.energies.size(); ++j) {
                const ComplexVector plus = spec.plus_states.col(j);
                const ComplexVector minus = spec.minus_states.col(j);
                EXPECT_LE((ops.H * plus - spec.energies(j) * plus).cwiseAbs().maxCoeff(), 1e-8);
                EXPECT_LE((ops.H * minus + spec.energies(j) * minus).cwiseAbs().maxCoeff(), 1e-8);
                all.col(2 * j) = plus;
                all.col(2 * j + 1) = minus;
            }
            const auto cols = all.cols();
            EXPECT_LE((all.adjoint() * all - ComplexMatrix::Identity(cols, cols)).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_LE((ops.H * spec.psi_n.cast<Complex>()).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(BlockAction, TwoStatePauliY) {
    const StochasticChain c = two_state();
    const EdgeOperators ops = ops_for(c, 0.0);
    const SpectralDecomposition sd = spectral_decomposition(c, 0.0);
    const BlockActionReport r = verify_block_action(ops, sd);
    EXPECT_LE(r.max_deviation, 1e-12);
    EXPECT_LE(r.complement_norm, 1e-12);

    // Explicit restriction in the basis {|v_1,0>, |v_1,0>^perp}.
    const AnalyticSpectrum spec = analytic_spectrum(ops, sd);
    const ComplexVector a = spec.reference_states.col(0).cast<Complex>();
    const ComplexVector b = spec.perp_states.col(0).cast<Complex>();
    EXPECT_NEAR(std::abs(a.dot(ops.H * a)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(b.dot(ops.H * b)), 0.0, 1e-14);
    EXPECT_NEAR((a.dot(ops.H * b) - Complex(0.0, -1.0)).real(), 0.0, 1e-14);
    EXPECT_NEAR((a.dot(ops.H * b) - Complex(0.0, -1.0)).imag(), 0.0, 1e-14);
}

TEST(NoLeak, Examples) {
    EXPECT_LE(no_leak_check(complete_chain(4, {3}, true), 0.5), 1e-8);
    EXPECT_LE(no_leak_check(two_state(), 0.25), 1e-8);
    EXPECT_THROW(no_leak_check(two_state(), 1.0), Error);
}

TEST(HamiltonianBinary, RoundTripAndHeader) {
    const EdgeOperators ops = ops_for(complete_chain(3, {0}, true), 0.4);
    std::stringstream buffer;
    write_hamiltonian_binary(buffer, ops.H);
    const std::string bytes = buffer.str();
    EXPECT_EQ(bytes.substr(0, 8), "ADIAWH01");
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 9u);
    EXPECT_EQ(bytes[9], 0);
    EXPECT_EQ(bytes.size(), 8u + 4u + 81u * 16u);
    const ComplexMatrix back = read_hamiltonian_binary(buffer);
    EXPECT_EQ((back - ops.H).cwiseAbs().maxCoeff(), 0.0);

    std::stringstream bad("NOTAHEAD");
    EXPECT_THROW(read_hamiltonian_binary(bad), Error);
}

// Property tests over hand-rolled random reversible chains.

TEST(HamiltonianProperties, SymmetryRestrictionNormAndLemmaOne) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed, 7);
        const int n = c.n;
        for (double s : {0.0, 0.3, 0.7, 1.0}) {
            const EdgeOperators ops = ops_for(c, s);
            const Vector e = hamiltonian_eigenvalues(ops);
            EXPECT_LE((e + e.reverse()).cwiseAbs().maxCoeff(), 1e-8);
            EXPECT_LE(spectral_norm(ops.H), 2.0 + 1e-12);
            const Matrix D = discriminant(interpolate(c, s)).D;
            for (int x = 0; x < n; ++x) {
                for (int y = 0; y < n; ++y) {
                    EXPECT_NEAR(ops.W(edge_index(n, x, 0), edge_index(n, y, 0)), D(x, y), 1e-12);
                }
            }
            const SpectralDecomposition sd = spectral_decomposition(c, s);
            EXPECT_LE((analytic_spectrum(ops, sd).all_energies() - e).cwiseAbs().maxCoeff(), 1e-8);
            const BlockActionReport r = verify_block_action(ops, sd);
            EXPECT_LE(r.max_deviation, 1e-8) << seed << " s=" << s;
            EXPECT_LE(r.complement_norm, 1e-8) << seed << " s=" << s;
        }
    }
}

TEST(HamiltonianProperties, ExtensionIndependence) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed, 6);
        const std::vector<Matrix> fixers = random_fixers(c.n, seed);
        for (double s : {0.0, 0.3, 0.7, 1.0}) {
            const InterpolatedChain ic = interpolate(c, s);
            const EdgeOperators plain = build_H(ic);
            const EdgeOperators twisted = build_H(ic, fixers);
            EXPECT_LE((twisted.V.transpose() * twisted.V - Matrix::Identity(c.n * c.n, c.n * c.n)).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_GT((twisted.V - plain.V).cwiseAbs().maxCoeff(), 1e-3);
            EXPECT_LE((hamiltonian_eigenvalues(twisted) - hamiltonian_eigenvalues(plain)).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(HamiltonianProperties, NoLeakOnRandomChains) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const StochasticChain c = gen::lazy_chain(seed, 6);
        for (double s : {0.0, 0.25, 0.5, 0.75}) EXPECT_LE(no_leak_check(c, s), 1e-8);
    }
}
