#include "adiasearch/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "adiasearch/error.hpp"
#include "adiasearch/hitting.hpp"

namespace adiasearch {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_cap(int n) {
    if (n > kEdgeSpaceCap) {
        throw Error(ErrorKind::DimensionCap,
                    "edge space needs n <= " + std::to_string(kEdgeSpaceCap) + ", got n = " +
                        std::to_string(n));
    }
}

Matrix householder_to(const Vector& p) {
    const Eigen::Index n = p.size();
    Vector u = -p;
    u(0) += 1.0;
    const double uu = u.squaredNorm();
    if (uu <= 1e-30) return Matrix::Identity(n, n);
    Matrix R = Matrix::Identity(n, n) - (2.0 / uu) * u * u.transpose();
    R.col(0) = p;
    return R;
}

// Orthonormal basis for the span of every block B_k: all |x, 0> plus the
// perp partners of the nondegenerate pairs.
Matrix block_span_basis(const AnalyticSpectrum& spec, int n) {
    const int dim = n * n;
    const auto pairs = spec.perp_states.cols();
    Matrix M(dim, n + pairs);
    M.leftCols(n).setZero();
    for (int x = 0; x < n; ++x) M(edge_index(n, x, 0), x) = 1.0;
    for (Eigen::Index j = 0; j < pairs; ++j) M.col(n + j) = spec.perp_states.col(j).normalized();
    Eigen::HouseholderQR<Matrix> qr(M);
    return qr.householderQ() * Matrix::Identity(dim, M.cols());
}

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(b.data(), b.size());
}

std::uint64_t get_bytes(std::istream& in, int count) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), count);
    if (!in) throw Error(ErrorKind::ParseError, "truncated Hamiltonian dump");
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

constexpr char kMagic[] = "ADIAWH01";

} // namespace

EdgeBlocks householder_blocks(const InterpolatedChain& interp, std::span<const Matrix> fixers) {
    const int n = interp.base.n;
    check_cap(n);
    if (!fixers.empty() && static_cast<int>(fixers.size()) != n) {
        throw Error(ErrorKind::BadParams, "need one extension map per vertex");
    }
    EdgeBlocks blocks;
    blocks.n = n;
    blocks.V.reserve(n);
    for (int x = 0; x < n; ++x) {
        const Vector p = interp.Ps.row(x).transpose().cwiseSqrt();
        Matrix Vx = householder_to(p);
        if (!fixers.empty()) {
            Vx = Vx * fixers[x];
            Vx.col(0) = p;
        }
        blocks.V.push_back(std::move(Vx));
    }
    return blocks;
}

Vector apply_W(const EdgeBlocks& blocks, const Vector& psi) {
    const int n = blocks.n;
    Eigen::Map<const RowMatrix> in(psi.data(), n, n);
    RowMatrix forward(n, n);
    for (int x = 0; x < n; ++x) forward.row(x) = (blocks.V[x] * in.row(x).transpose()).transpose();
    const RowMatrix swapped = forward.transpose();
    Vector out(n * n);
    Eigen::Map<RowMatrix> result(out.data(), n, n);
    for (int x = 0; x < n; ++x) {
        result.row(x) = (blocks.V[x].transpose() * swapped.row(x).transpose()).transpose();
    }
    return out;
}

Vector apply_generator(const EdgeBlocks& blocks, const Vector& psi) {
    const int n = blocks.n;
    Vector projected = Vector::Zero(n * n);
    for (int x = 0; x < n; ++x) projected(edge_index(n, x, 0)) = psi(edge_index(n, x, 0));
    Vector out = apply_W(blocks, projected);
    const Vector w = apply_W(blocks, psi);
    for (int x = 0; x < n; ++x) out(edge_index(n, x, 0)) -= w(edge_index(n, x, 0));
    return out;
}

Vector embed_reference(const Vector& v) {
    const auto n = static_cast<int>(v.size());
    Vector out = Vector::Zero(n * n);
    for (int x = 0; x < n; ++x) out(edge_index(n, x, 0)) = v(x);
    return out;
}

Matrix build_V(const InterpolatedChain& interp, std::span<const Matrix> fixers) {
    const EdgeBlocks blocks = householder_blocks(interp, fixers);
    const int n = blocks.n;
    Matrix V = Matrix::Zero(n * n, n * n);
    for (int x = 0; x < n; ++x) V.block(x * n, x * n, n, n) = blocks.V[x];
    return V;
}

EdgeOperators build_H(const InterpolatedChain& interp, std::span<const Matrix> fixers) {
    const EdgeBlocks blocks = householder_blocks(interp, fixers);
    const int n = blocks.n;
    const int dim = n * n;
    EdgeOperators ops;
    ops.s = interp.s;
    ops.n = n;
    ops.V = Matrix::Zero(dim, dim);
    for (int x = 0; x < n; ++x) ops.V.block(x * n, x * n, n, n) = blocks.V[x];

    ops.W.resize(dim, dim);
    Vector e = Vector::Zero(dim);
    for (int j = 0; j < dim; ++j) {
        e(j) = 1.0;
        ops.W.col(j) = apply_W(blocks, e);
        e(j) = 0.0;
    }
    ops.W = 0.5 * (ops.W + ops.W.transpose()).eval();

    ops.K = Matrix::Zero(dim, dim);
    for (int x = 0; x < n; ++x) {
        const int r = edge_index(n, x, 0);
        ops.K.col(r) += ops.W.col(r);
        ops.K.row(r) -= ops.W.row(r);
    }
    ops.H = Complex(0.0, 1.0) * ops.K.cast<Complex>();
    return ops;
}

Vector hamiltonian_eigenvalues(const EdgeOperators& ops) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(ops.H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::EigensolverFailure, "Hermitian eigensolver failed");
    }
    return solver.eigenvalues();
}

Vector AnalyticSpectrum::all_energies() const {
    const auto dim = static_cast<Eigen::Index>(psi_n.size());
    Vector out = Vector::Zero(dim);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < energies.size(); ++j) {
        out(k++) = energies(j);
        out(k++) = -energies(j);
    }
    std::sort(out.data(), out.data() + dim);
    return out;
}

AnalyticSpectrum analytic_spectrum(const EdgeOperators& ops, const SpectralDecomposition& spectral) {
    const int n = ops.n;
    if (spectral.size() != n) throw Error(ErrorKind::BadParams, "spectrum size mismatch");
    AnalyticSpectrum spec;
    for (int k = 0; k + 1 < n; ++k) {
        if (std::abs(spectral.lambdas(k) - 1.0) > kUnitClusterTolerance) spec.pair_index.push_back(k);
    }
    const auto pairs = static_cast<Eigen::Index>(spec.pair_index.size());
    const int dim = n * n;
    spec.energies.resize(pairs);
    spec.reference_states.resize(dim, pairs);
    spec.perp_states.resize(dim, pairs);
    spec.plus_states.resize(dim, pairs);
    spec.minus_states.resize(dim, pairs);
    const Complex i(0.0, 1.0);
    for (Eigen::Index j = 0; j < pairs; ++j) {
        const double lambda = spectral.lambdas(spec.pair_index[j]);
        const double energy = std::sqrt(std::max(0.0, 1.0 - lambda * lambda));
        const Vector a = embed_reference(spectral.vectors.col(spec.pair_index[j]));
        const Vector b = ops.K * a / energy;
        spec.energies(j) = energy;
        spec.reference_states.col(j) = a;
        spec.perp_states.col(j) = b;
        spec.plus_states.col(j) = (a.cast<Complex>() + i * b.cast<Complex>()) / std::sqrt(2.0);
        spec.minus_states.col(j) = (a.cast<Complex>() - i * b.cast<Complex>()) / std::sqrt(2.0);
    }
    spec.psi_n = embed_reference(spectral.vectors.col(n - 1));
    spec.zeroDim = dim - 2 * static_cast<int>(pairs);
    return spec;
}

BlockActionReport verify_block_action(const EdgeOperators& ops,
                                      const SpectralDecomposition& spectral) {
    const AnalyticSpectrum spec = analytic_spectrum(ops, spectral);
    const int n = ops.n;
    BlockActionReport report;
    const Complex i(0.0, 1.0);
    for (Eigen::Index j = 0; j < spec.energies.size(); ++j) {
        const Vector a = spec.reference_states.col(j);
        const Vector b = spec.perp_states.col(j).normalized();
        const double c = spec.energies(j);
        const Vector Ka = ops.K * a;
        const Vector Kb = ops.K * b;
        // Restriction of H = iK to the ordered basis {a, b} against c sigma_y.
        const std::array<Complex, 4> restriction{i * a.dot(Ka), i * a.dot(Kb), i * b.dot(Ka),
                                                 i * b.dot(Kb)};
        const std::array<Complex, 4> expected{0.0, -i * c, i * c, 0.0};
        for (int e = 0; e < 4; ++e) {
            report.max_deviation = std::max(report.max_deviation, std::abs(restriction[e] - expected[e]));
        }
        report.max_deviation = std::max(report.max_deviation, (Ka - c * b).norm());
        report.max_deviation = std::max(report.max_deviation, (Kb + c * a).norm());
    }
    // Unit-cluster directions and |v_n, 0> are annihilated.
    for (int k = 0; k < n; ++k) {
        if (std::abs(spectral.lambdas(k) - 1.0) <= kUnitClusterTolerance) {
            const Vector a = embed_reference(spectral.vectors.col(k));
            report.max_deviation = std::max(report.max_deviation, (ops.K * a).norm());
        }
    }
    const Matrix Q = block_span_basis(spec, n);
    const Matrix P = Matrix::Identity(n * n, n * n) - Q * Q.transpose();
    report.complement_norm = (P * ops.K * P).norm();
    return report;
}

double no_leak_check(const StochasticChain& chain, double s, double ds) {
    if (!(s >= 0.0 && s < 1.0)) throw Error(ErrorKind::SOutOfRange, "no-leak check needs s in [0, 1)");
    const InterpolatedChain interp = interpolate(chain, s);
    const EdgeOperators ops = build_H(interp);
    const SpectralDecomposition spectral = eigendecompose(discriminant(interp));
    const AnalyticSpectrum spec = analytic_spectrum(ops, spectral);
    auto amplitudes = [&chain](double t) -> Vector {
        return interpolated_stationary(chain, t).cwiseSqrt();
    };
    const Vector d = embed_reference(finite_difference(amplitudes, s, ds));
    const Matrix Q = block_span_basis(spec, chain.n);
    return (d - Q * (Q.transpose() * d)).norm();
}

void write_hamiltonian_binary(std::ostream& out, const ComplexMatrix& H) {
    out.write(kMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(H.rows()));
    for (Eigen::Index r = 0; r < H.rows(); ++r) {
        for (Eigen::Index c = 0; c < H.cols(); ++c) {
            put_f64(out, H(r, c).real());
            put_f64(out, H(r, c).imag());
        }
    }
}

ComplexMatrix read_hamiltonian_binary(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw Error(ErrorKind::ParseError, "missing ADIAWH01 header");
    }
    const auto dim = static_cast<Eigen::Index>(get_bytes(in, 4));
    ComplexMatrix H(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double re = std::bit_cast<double>(get_bytes(in, 8));
            const double im = std::bit_cast<double>(get_bytes(in, 8));
            H(r, c) = Complex(re, im);
        }
    }
    return H;
}

} // namespace adiasearch
