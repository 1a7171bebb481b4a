#include "adiasearch/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "adiasearch/discriminant.hpp"
#include "adiasearch/error.hpp"
#include "adiasearch/format.hpp"
#include "adiasearch/hamiltonian.hpp"
#include "adiasearch/hitting.hpp"
#include "adiasearch/random.hpp"

namespace adiasearch {

namespace {

constexpr double kNormDriftLimit = 1e-6;

double denominator(double lambda, ConditionForm form) {
    return form == ConditionForm::exact ? 1.0 - lambda * lambda : 1.0 - lambda;
}

// Orthonormal basis of span{|x,0>} + span{W |x,0>}. The generator K vanishes
// on the orthogonal complement and maps this span into itself, so the
// exponential only has to be formed on it.
Matrix active_subspace(const EdgeBlocks& blocks) {
    const int n = blocks.n;
    Matrix residual(n * n, n);
    Vector e = Vector::Zero(n * n);
    for (int x = 0; x < n; ++x) {
        e(edge_index(n, x, 0)) = 1.0;
        Vector w = apply_W(blocks, e);
        e(edge_index(n, x, 0)) = 0.0;
        for (int y = 0; y < n; ++y) w(edge_index(n, y, 0)) = 0.0;
        residual.col(x) = w;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(residual);
    qr.setThreshold(1e-13);
    const auto rank = qr.rank();
    Matrix Q = Matrix::Zero(n * n, n + rank);
    for (int x = 0; x < n; ++x) Q(edge_index(n, x, 0), x) = 1.0;
    if (rank > 0) {
        Q.rightCols(rank) = qr.householderQ() * Matrix::Identity(n * n, rank);
    }
    return Q;
}

double reference_overlap_sq(const ComplexVector& psi, const Vector& amplitudes) {
    const auto n = static_cast<int>(amplitudes.size());
    Complex acc = 0.0;
    for (int x = 0; x < n; ++x) acc += amplitudes(x) * psi(edge_index(n, x, 0));
    return std::norm(acc);
}

} // namespace

double Schedule::s_at(double t) const {
    const double tc = std::clamp(t, 0.0, T);
    const double sn = std::sin(theta_at(tc));
    const double s = (1.0 - pM / (sn * sn)) / (1.0 - pM);
    return std::clamp(s, 0.0, 1.0);
}

Schedule schedule(double pM, double T, double epsilon) {
    if (!(pM > 0.0 && pM < 1.0)) throw Error(ErrorKind::BadParams, "schedule needs 0 < pM < 1");
    if (!(T > 0.0)) throw Error(ErrorKind::BadParams, "schedule needs T > 0");
    Schedule sched;
    sched.T = T;
    sched.epsilon = epsilon;
    sched.pM = pM;
    sched.theta0 = std::asin(std::sqrt(pM));
    sched.omega = std::acos(std::sqrt(pM)) / T;
    return sched;
}

double adiabatic_sum(const StochasticChain& chain, double s, ConditionForm form) {
    const SpectralDecomposition sd = spectral_decomposition(chain, s);
    const RotationFrame frame = rotation_frame(chain, s);
    const int n = sd.size();
    double sum = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        const double lambda = sd.lambdas(k);
        if (std::abs(lambda - 1.0) <= kUnitClusterTolerance) {
            if (s < 1.0) {
                throw Error(ErrorKind::DegenerateDenominator,
                            "lambda_" + std::to_string(k + 1) + " = 1 at s = " + format_double(s));
            }
            continue; // marked-supported, orthogonal to v_n^perp(1) = -U
        }
        const double overlap = sd.vectors.col(k).dot(frame.vnPerp);
        sum += overlap * overlap / denominator(lambda, form);
    }
    return sum;
}

RunningTime running_time(const StochasticChain& chain, double epsilon, int grid_points,
                         bool auto_lazy) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error(ErrorKind::BadParams, "epsilon must be in (0, 1)");
    }
    const StochasticChain c = search_chain(chain, auto_lazy);
    RunningTime rt;
    rt.epsilon = epsilon;
    rt.lazy_applied = c.lazy && !chain.lazy && !is_lazy_form(chain);
    rt.ht = classical_hitting_time(c).ht;
    const double prefactor = std::numbers::pi / (2.0 * epsilon);

    double best = -1.0;
    for (double s : uniform_grid(grid_points)) {
        const double value = adiabatic_sum(c, s, ConditionForm::strengthened);
        if (value >= best) {
            best = value;
            rt.argmax_s = s;
        }
    }
    rt.T_grid = prefactor * std::sqrt(best);
    rt.T_closed_form = prefactor * std::sqrt(rt.ht);
    rt.T = rt.T_closed_form;
    rt.relative_gap = std::abs(rt.T_grid - rt.T_closed_form) / rt.T_closed_form;
    rt.max_at_end = (rt.argmax_s == 1.0);
    return rt;
}

double adiabatic_condition_lhs(const StochasticChain& chain, double s, double T,
                               ConditionForm form) {
    require_search_ready(chain);
    if (!(T > 0.0)) throw Error(ErrorKind::BadParams, "T must be positive");
    const double omega = std::acos(std::sqrt(chain.pM)) / T;
    return omega * omega * adiabatic_sum(chain, s, form);
}

ConditionReport check_adiabatic_condition(const StochasticChain& chain, double T, double epsilon,
                                          int grid_points, ConditionForm form) {
    require_search_ready(chain);
    if (!(T > 0.0)) throw Error(ErrorKind::BadParams, "T must be positive");
    const double speed = std::numbers::pi / (2.0 * T);
    ConditionReport report;
    report.grid = uniform_grid(grid_points);
    report.maxLhs = -1.0;
    for (double s : report.grid) {
        const double value = speed * speed * adiabatic_sum(chain, s, form);
        report.lhs.push_back(value);
        if (value > report.maxLhs) {
            report.maxLhs = value;
            report.argmax_s = s;
        }
    }
    report.tSufficient = report.maxLhs <= epsilon * epsilon * (1.0 + 1e-12);
    return report;
}

EvolutionTrace propagate(const StochasticChain& chain, const Schedule& sched, long long steps) {
    if (chain.n > kEdgeSpaceCap) {
        throw Error(ErrorKind::DimensionCap,
                    "evolution needs n <= " + std::to_string(kEdgeSpaceCap) + ", got n = " +
                        std::to_string(chain.n));
    }
    if (steps < 1) throw Error(ErrorKind::BadParams, "need at least one time step");
    const int n = chain.n;
    const double dt = sched.T / static_cast<double>(steps);

    EvolutionTrace trace;
    trace.T = sched.T;
    trace.epsilon = sched.epsilon;
    trace.dt = dt;
    trace.chain = chain;
    trace.times.reserve(steps + 1);

    ComplexVector psi = embed_reference(chain.pi.cwiseSqrt()).cast<Complex>();
    auto record = [&](double t) {
        const double s = sched.s_at(t);
        const double overlap = reference_overlap_sq(psi, interpolated_stationary(chain, s).cwiseSqrt());
        const double norm = psi.norm();
        trace.times.push_back(t);
        trace.s_values.push_back(s);
        trace.overlaps.push_back(overlap);
        trace.norms.push_back(norm);
        trace.minOverlap = std::min(trace.minOverlap, overlap);
        trace.maxNormDrift = std::max(trace.maxNormDrift, std::abs(norm - 1.0));
        if (std::abs(norm - 1.0) > kNormDriftLimit) {
            throw Error(ErrorKind::NonUnitaryDrift, "norm " + format_double(norm) + " at t = " +
                                                        format_double(t));
        }
    };
    record(0.0);

    const Complex minus_i_dt(0.0, -dt);
    for (long long step = 0; step < steps; ++step) {
        const double s_mid = sched.s_at((static_cast<double>(step) + 0.5) * dt);
        const EdgeBlocks blocks = householder_blocks(interpolate(chain, s_mid));
        const Matrix Q = active_subspace(blocks);
        const auto r = Q.cols();
        Matrix KQ(n * n, r);
        for (Eigen::Index j = 0; j < r; ++j) KQ.col(j) = apply_generator(blocks, Q.col(j));
        Matrix Kr = Q.transpose() * KQ;
        Kr = 0.5 * (Kr - Kr.transpose()).eval();
        const ComplexMatrix Hr = Complex(0.0, 1.0) * Kr.cast<Complex>();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(Hr);
        if (eig.info() != Eigen::Success) {
            throw Error(ErrorKind::EigensolverFailure, "frozen Hamiltonian diagonalisation failed");
        }
        const ComplexVector phases = (minus_i_dt * eig.eigenvalues().cast<Complex>()).array().exp();
        const ComplexMatrix& basis = eig.eigenvectors();
        const ComplexVector coeffs = Q.transpose().cast<Complex>() * psi;
        const ComplexVector evolved = basis * phases.asDiagonal() * (basis.adjoint() * coeffs);
        psi += Q.cast<Complex>() * (evolved - coeffs);
        record(static_cast<double>(step + 1) * dt);
    }
    trace.times.back() = sched.T;
    trace.finalState = psi;
    trace.successProb = 0.0;
    for (int x : chain.marked) {
        for (int y = 0; y < n; ++y) trace.successProb += std::norm(psi(edge_index(n, x, y)));
    }
    trace.successProb = std::clamp(trace.successProb, 0.0, 1.0);
    return trace;
}

EvolutionTrace evolve(const StochasticChain& chain, double epsilon, const EvolveOptions& options) {
    if (chain.n > kEdgeSpaceCap) {
        throw Error(ErrorKind::DimensionCap,
                    "evolution needs n <= " + std::to_string(kEdgeSpaceCap) + ", got n = " +
                        std::to_string(chain.n));
    }
    const StochasticChain c = search_chain(chain, options.auto_lazy);
    const RunningTime rt = running_time(c, epsilon, 101, false);
    const Schedule sched = schedule(c.pM, rt.T, epsilon);

    auto steps_for = [&sched](double dt) {
        return std::max<long long>(1, static_cast<long long>(std::ceil(sched.T / dt - 1e-9)));
    };

    if (options.dt) {
        if (!(*options.dt > 0.0)) throw Error(ErrorKind::BadParams, "dt must be positive");
        EvolutionTrace trace = propagate(c, sched, steps_for(*options.dt));
        trace.ht = rt.ht;
        return trace;
    }

    long long steps = steps_for(std::min(0.02, sched.T / 2000.0));
    EvolutionTrace previous = propagate(c, sched, steps);
    for (int refinement = 1; refinement <= options.max_refinements; ++refinement) {
        steps *= 2;
        EvolutionTrace current = propagate(c, sched, steps);
        current.refinements = refinement;
        const double change = std::abs(current.overlaps.back() - previous.overlaps.back());
        if (change < options.refinement_tolerance) {
            current.ht = rt.ht;
            return current;
        }
        previous = std::move(current);
    }
    throw Error(ErrorKind::StepControlFailure,
                "final overlap still moving after " + std::to_string(options.max_refinements) +
                    " halvings of dt");
}

Vector vertex_distribution(const EvolutionTrace& trace) {
    const int n = trace.chain.n;
    Vector prob = Vector::Zero(n);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) prob(x) += std::norm(trace.finalState(edge_index(n, x, y)));
    }
    return prob;
}

int measure(const EvolutionTrace& trace, std::uint64_t seed) {
    const Vector prob = vertex_distribution(trace);
    std::mt19937_64 rng(mix_seed(seed));
    const double u = uniform01(rng) * prob.sum();
    double acc = 0.0;
    int last = 0;
    for (int x = 0; x < prob.size(); ++x) {
        if (prob(x) <= 0.0) continue;
        acc += prob(x);
        last = x;
        if (u < acc) return x;
    }
    return last;
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
    out << "t,s,overlap_sq,norm\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        out << format_double(trace.times[i]) << ',' << format_double(trace.s_values[i]) << ','
            << format_double(trace.overlaps[i]) << ',' << format_double(trace.norms[i]) << '\n';
    }
}

} // namespace adiasearch
