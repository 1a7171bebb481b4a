#include "adiasearch/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "adiasearch/discriminant.hpp"
#include "adiasearch/error.hpp"
#include "adiasearch/format.hpp"
#include "adiasearch/jacobi.hpp"
#include "adiasearch/random.hpp"

namespace adiasearch {

namespace {

// Unmarked block of D(1) together with |U> restricted to unmarked indices.
struct UnmarkedBlock {
    Matrix D;
    Vector U;
};

UnmarkedBlock unmarked_block(const StochasticChain& chain) {
    const std::vector<int> idx = chain.unmarked();
    const auto u = static_cast<Eigen::Index>(idx.size());
    UnmarkedBlock block;
    block.D.resize(u, u);
    block.U.resize(u);
    for (Eigen::Index i = 0; i < u; ++i) {
        block.U(i) = std::sqrt(chain.pi(idx[i]) / (1.0 - chain.pM));
        for (Eigen::Index j = 0; j < u; ++j) {
            block.D(i, j) = std::sqrt(chain.P(idx[i], idx[j]) * chain.P(idx[j], idx[i]));
        }
    }
    return block;
}

bool in_unit_cluster(double lambda) { return std::abs(lambda - 1.0) <= kUnitClusterTolerance; }

void check_denominators(const SpectralDecomposition& sd) {
    if (sd.s >= 1.0) return;
    const int n = sd.size();
    for (int k = 0; k + 1 < n; ++k) {
        if (std::abs(1.0 - sd.lambdas(k)) <= 1e-12) {
            throw Error(ErrorKind::DegenerateDenominator,
                        "lambda_" + std::to_string(k + 1) + " = 1 at s = " +
                            format_double(sd.s));
        }
    }
}

} // namespace

std::string method_name(HittingMethod method) {
    switch (method) {
    case HittingMethod::linear_solve: return "linear_solve";
    case HittingMethod::series: return "series";
    case HittingMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

HittingReport classical_hitting_time(const StochasticChain& chain) {
    require_search_ready(chain);
    const UnmarkedBlock block = unmarked_block(chain);
    const auto u = block.D.rows();
    const Matrix I_minus_D = Matrix::Identity(u, u) - block.D;
    Eigen::FullPivLU<Matrix> lu(I_minus_D);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::SingularSystem,
                    "I - D_UU(1) is singular; the marked set is unreachable from some vertex");
    }
    HittingReport report;
    report.method = HittingMethod::linear_solve;
    report.ht = block.U.dot(lu.solve(block.U));
    return report;
}

double hitting_time_series(const StochasticChain& chain, long long t_max) {
    require_search_ready(chain);
    if (t_max < 0) throw Error(ErrorKind::BadParams, "t_max must be >= 0");
    const UnmarkedBlock block = unmarked_block(chain);
    Vector y = block.U;
    double sum = block.U.dot(y);
    for (long long t = 1; t <= t_max; ++t) {
        y = block.D * y;
        sum += block.U.dot(y);
    }
    return sum;
}

long long series_terms_for_tail(const StochasticChain& chain, double tol) {
    require_search_ready(chain);
    const UnmarkedBlock block = unmarked_block(chain);
    const SymmetricEigen eig = jacobi_eigen(block.D);
    const double rho = std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
    if (rho >= 1.0) {
        throw Error(ErrorKind::SingularSystem, "unmarked block has spectral radius 1");
    }
    if (rho == 0.0) return 0;
    // tail after t_max terms <= rho^(t_max + 1) / (1 - rho)
    const double needed = std::log(tol * (1.0 - rho)) / std::log(rho);
    return std::max<long long>(0, static_cast<long long>(std::ceil(needed)));
}

HittingReport series_hitting_time(const StochasticChain& chain, long long t_max) {
    HittingReport report;
    report.method = HittingMethod::series;
    report.t_max = t_max;
    report.ht = hitting_time_series(chain, t_max);
    return report;
}

HittingReport monte_carlo_hitting_time(const StochasticChain& chain, long long trials,
                                       std::uint64_t seed) {
    require_search_ready(chain);
    if (trials < 1) throw Error(ErrorKind::BadParams, "trials must be >= 1");
    const int n = chain.n;

    std::vector<std::vector<double>> cdf(n, std::vector<double>(n));
    std::vector<int> last_positive(n, 0);
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int y = 0; y < n; ++y) {
            acc += chain.P(x, y);
            cdf[x][y] = acc;
            if (chain.P(x, y) > 0.0) last_positive[x] = y;
        }
    }
    const std::vector<int> unmarked = chain.unmarked();
    std::vector<double> start_cdf(unmarked.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < unmarked.size(); ++i) {
        acc += chain.pi(unmarked[i]) / (1.0 - chain.pM);
        start_cdf[i] = acc;
    }
    std::vector<char> marked(n, 0);
    for (int x : chain.marked) marked[x] = 1;

    auto pick = [](const std::vector<double>& c, double u, std::size_t fallback) {
        const auto it = std::upper_bound(c.begin(), c.end(), u);
        return it == c.end() ? fallback : static_cast<std::size_t>(it - c.begin());
    };

    // Welford accumulation in trial order keeps the estimate deterministic.
    double mean = 0.0;
    double m2 = 0.0;
    for (long long trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
        int x = unmarked[pick(start_cdf, uniform01(rng), unmarked.size() - 1)];
        long long steps = 0;
        while (!marked[x]) {
            x = static_cast<int>(pick(cdf[x], uniform01(rng), last_positive[x]));
            if (++steps > kMaxWalkSteps) {
                throw Error(ErrorKind::WalkDidNotAbsorb,
                            "trial " + std::to_string(trial) + " exceeded " +
                                std::to_string(kMaxWalkSteps) + " steps");
            }
        }
        const double delta = static_cast<double>(steps) - mean;
        mean += delta / static_cast<double>(trial + 1);
        m2 += delta * (static_cast<double>(steps) - mean);
    }
    HittingReport report;
    report.method = HittingMethod::monte_carlo;
    report.ht = mean;
    report.trials = trials;
    const double variance = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
    report.stderr_ = std::sqrt(variance / static_cast<double>(trials));
    return report;
}

double extended_hitting_time(const StochasticChain& chain, double s) {
    require_search_ready(chain);
    const SpectralDecomposition sd = spectral_decomposition(chain, s);
    check_denominators(sd);
    const RotationFrame frame = rotation_frame(chain, s);
    const int n = sd.size();
    double ht = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        // At s = 1 the other unit eigenvectors live on marked vertices and
        // are orthogonal to |U>.
        if (in_unit_cluster(sd.lambdas(k))) continue;
        const double overlap = sd.vectors.col(k).dot(frame.U);
        ht += overlap * overlap / (1.0 - sd.lambdas(k));
    }
    return ht;
}

Vector apply_A(const StochasticChain& chain, double s, const Vector& b) {
    const Discriminant d = discriminant(interpolate(chain, s));
    const Vector vn = d.stationary_amplitudes.normalized();
    const auto n = d.D.rows();
    if (b.size() != n) throw Error(ErrorKind::BadParams, "apply_A: dimension mismatch");
    const Matrix B = Matrix::Identity(n, n) - d.D + vn * vn.transpose();
    Eigen::FullPivLU<Matrix> lu(B);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::SingularSystem,
                    "B(s) = I - D + v_n v_n^T is singular at s = " + format_double(s));
    }
    return lu.solve(b) - vn.dot(b) * vn;
}

ResolventProbe probe_A(const StochasticChain& chain, double s, const Vector& a, const Vector& b) {
    return {s, a.dot(apply_A(chain, s, b))};
}

Matrix resolvent_by_eigenexpansion(const StochasticChain& chain, double s) {
    const SpectralDecomposition sd = spectral_decomposition(chain, s);
    check_denominators(sd);
    const int n = sd.size();
    Matrix A = Matrix::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        if (in_unit_cluster(sd.lambdas(k))) continue;
        A += sd.vectors.col(k) * sd.vectors.col(k).transpose() / (1.0 - sd.lambdas(k));
    }
    return A;
}

Matrix d_discriminant(const StochasticChain& chain, double s) {
    if (!(s >= 0.0)) throw Error(ErrorKind::SOutOfRange, "s = " + std::to_string(s));
    if (s >= 1.0) throw Error(ErrorKind::SAtOne, "dD/ds is singular at s = 1");
    const int n = chain.n;
    Matrix dD = Matrix::Zero(n, n);
    const double edge_rate = -0.5 / std::sqrt(1.0 - s);
    for (int x = 0; x < n; ++x) {
        const bool mx = chain.is_marked(x);
        for (int y = 0; y < n; ++y) {
            const bool my = chain.is_marked(y);
            const double root = std::sqrt(chain.P(x, y) * chain.P(y, x));
            if (mx && my) {
                dD(x, y) = (x == y) ? 1.0 - chain.P(x, x) : -root;
            } else if (mx != my) {
                dD(x, y) = edge_rate * root;
            }
        }
    }
    return dD;
}

LemmaCheck verify_lemma_HT(const StochasticChain& chain, const std::vector<double>& grid) {
    const double ht = classical_hitting_time(chain).ht;
    LemmaCheck check;
    for (double s : grid) {
        LemmaRow row;
        row.s = s;
        row.lhs = extended_hitting_time(chain, s);
        row.rhs = ht * std::pow(std::sin(theta(chain.pM, s)), 4);
        row.deviation = std::abs(row.lhs - row.rhs) / ht;
        check.max_deviation = std::max(check.max_deviation, row.deviation);
        check.rows.push_back(row);
    }
    return check;
}

LemmaCheck verify_derivative_lemma(const StochasticChain& chain, const std::vector<double>& grid,
                                   double h) {
    LemmaCheck check;
    auto ht = [&chain](double s) { return extended_hitting_time(chain, s); };
    for (double s : grid) {
        if (!(s >= 0.0 && s < 1.0)) {
            throw Error(ErrorKind::SOutOfRange, "derivative lemma needs s in [0, 1)");
        }
        const double th = theta(chain.pM, s);
        LemmaRow row;
        row.s = s;
        row.lhs = finite_difference(ht, s, h);
        row.rhs = 4.0 * theta_rate(chain.pM, s) * std::cos(th) / std::sin(th) * ht(s);
        row.deviation = std::abs(row.lhs - row.rhs) / std::abs(row.rhs);
        check.max_deviation = std::max(check.max_deviation, row.deviation);
        check.rows.push_back(row);
    }
    return check;
}

void write_lemma_csv(std::ostream& out, const LemmaCheck& check) {
    out << "s,HT_s,HT_times_sin4theta,deviation\n";
    for (const auto& row : check.rows) {
        out << format_double(row.s) << ',' << format_double(row.lhs) << ','
            << format_double(row.rhs) << ',' << format_double(row.deviation) << '\n';
    }
}

} // namespace adiasearch
