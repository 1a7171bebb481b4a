#include "adiasearch/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "adiasearch/error.hpp"
#include "adiasearch/random.hpp"

namespace adiasearch {

namespace {

std::vector<int> normalize_marked(std::vector<int> marked, int n) {
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    for (int x : marked) {
        if (x < 0 || x >= n) {
            throw Error(ErrorKind::InvalidMarkedSet,
                        "marked vertex " + std::to_string(x) + " outside [0, " +
                            std::to_string(n) + ")");
        }
    }
    return marked;
}

// BFS over the support digraph of P (or its transpose); returns levels, -1
// for unreached vertices.
std::vector<int> bfs_levels(const Matrix& P, bool transpose) {
    const int n = static_cast<int>(P.rows());
    std::vector<int> level(n, -1);
    std::queue<int> frontier;
    level[0] = 0;
    frontier.push(0);
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v = 0; v < n; ++v) {
            const double w = transpose ? P(v, u) : P(u, v);
            if (w > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                frontier.push(v);
            }
        }
    }
    return level;
}

} // namespace

bool StochasticChain::is_marked(int x) const {
    return std::binary_search(marked.begin(), marked.end(), x);
}

Vector StochasticChain::marked_indicator() const {
    Vector ind = Vector::Zero(n);
    for (int x : marked) ind(x) = 1.0;
    return ind;
}

std::vector<int> StochasticChain::unmarked() const {
    std::vector<int> out;
    out.reserve(n - marked.size());
    for (int x = 0; x < n; ++x) {
        if (!is_marked(x)) out.push_back(x);
    }
    return out;
}

ErgodicityReport is_ergodic(const Matrix& P) {
    ErgodicityReport report;
    const auto forward = bfs_levels(P, false);
    const auto backward = bfs_levels(P, true);
    report.irreducible =
        std::none_of(forward.begin(), forward.end(), [](int l) { return l < 0; }) &&
        std::none_of(backward.begin(), backward.end(), [](int l) { return l < 0; });
    if (!report.irreducible) return report;

    // For a strongly connected digraph the period is the gcd over all edges
    // u->v of level(u) + 1 - level(v).
    const int n = static_cast<int>(P.rows());
    int g = 0;
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (P(u, v) > 0.0) g = std::gcd(g, std::abs(forward[u] + 1 - forward[v]));
        }
    }
    report.period = g;
    report.aperiodic = (g == 1);
    return report;
}

Vector stationary_distribution(const Matrix& P) {
    const Eigen::Index n = P.rows();
    Matrix A = P.transpose() - Matrix::Identity(n, n);
    A.row(n - 1).setOnes();
    Vector b = Vector::Zero(n);
    b(n - 1) = 1.0;
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::SingularSystem,
                    "stationary system has rank " + std::to_string(lu.rank()) + " < " +
                        std::to_string(n));
    }
    Vector pi = lu.solve(b);
    for (Eigen::Index x = 0; x < n; ++x) {
        if (!(pi(x) > 0.0)) {
            throw Error(ErrorKind::SingularSystem,
                        "stationary entry " + std::to_string(x) + " is not positive");
        }
    }
    return pi / pi.sum();
}

ReversibilityReport is_reversible(const Matrix& P, const Vector& pi, double tolerance) {
    ReversibilityReport report;
    const Eigen::Index n = P.rows();
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = x + 1; y < n; ++y) {
            const double v = std::abs(pi(x) * P(x, y) - pi(y) * P(y, x));
            if (v > report.max_violation) {
                report.max_violation = v;
                report.worst_pair = {static_cast<int>(x), static_cast<int>(y)};
            }
        }
    }
    report.reversible = report.max_violation <= tolerance;
    return report;
}

ReversibilityReport is_reversible(const StochasticChain& chain) {
    return is_reversible(chain.P, chain.pi);
}

StochasticChain new_chain(const Matrix& P, std::vector<int> marked, bool lazy,
                          ChainValidation validation) {
    const auto n = static_cast<int>(P.rows());
    if (P.rows() != P.cols()) {
        throw Error(ErrorKind::BadParams, "transition matrix must be square");
    }
    if (n < 2) throw Error(ErrorKind::BadParams, "need at least 2 states");

    StochasticChain chain;
    chain.n = n;
    chain.P = P;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (!std::isfinite(P(x, y)) || P(x, y) < 0.0 || P(x, y) > 1.0) {
                std::ostringstream msg;
                msg << "entry (" << x << ", " << y << ") = " << P(x, y)
                    << " is not a probability";
                throw Error(ErrorKind::NonStochastic, msg.str());
            }
        }
        const double sum = P.row(x).sum();
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "row " << x << " sums to " << sum;
            throw Error(ErrorKind::NonStochastic, msg.str());
        }
    }
    chain.marked = normalize_marked(std::move(marked), n);
    chain.lazy = lazy;

    chain.ergodicity = is_ergodic(chain.P);
    if (!chain.ergodicity.irreducible) {
        const auto forward = bfs_levels(chain.P, false);
        const auto backward = bfs_levels(chain.P, true);
        int culprit = 0;
        for (int x = 0; x < n; ++x) {
            if (forward[x] < 0 || backward[x] < 0) {
                culprit = x;
                break;
            }
        }
        throw Error(ErrorKind::NotIrreducible,
                    "vertex " + std::to_string(culprit) +
                        " and vertex 0 do not communicate");
    }
    if (validation.require_aperiodic && !chain.ergodicity.aperiodic) {
        throw Error(ErrorKind::NotAperiodic,
                    "chain has period " + std::to_string(chain.ergodicity.period));
    }

    chain.pi = stationary_distribution(chain.P);
    chain.pM = 0.0;
    for (int x : chain.marked) chain.pM += chain.pi(x);

    chain.reversibility = is_reversible(chain.P, chain.pi);
    if (validation.require_reversible && !chain.reversibility.reversible) {
        std::ostringstream msg;
        msg << "detailed balance fails for pair (" << chain.reversibility.worst_pair.first
            << ", " << chain.reversibility.worst_pair.second << ") by "
            << chain.reversibility.max_violation;
        throw Error(ErrorKind::NotReversible, msg.str());
    }
    return chain;
}

StochasticChain make_lazy(const StochasticChain& chain) {
    const Matrix lazyP = 0.5 * (chain.P + Matrix::Identity(chain.n, chain.n));
    return new_chain(lazyP, chain.marked, true, ChainValidation::relaxed());
}

bool is_lazy_form(const StochasticChain& chain) {
    return chain.lazy || chain.P.diagonal().minCoeff() >= 0.5 - 1e-12;
}

void require_search_ready(const StochasticChain& chain) {
    const auto m = static_cast<int>(chain.marked.size());
    if (m == 0 || m >= chain.n) {
        throw Error(ErrorKind::InvalidMarkedSet,
                    "need 0 < |M| < n, got |M| = " + std::to_string(m));
    }
    if (!chain.ergodicity.irreducible) {
        throw Error(ErrorKind::NotIrreducible, "chain is not irreducible");
    }
    if (!chain.reversibility.reversible) {
        std::ostringstream msg;
        msg << "detailed balance fails for pair (" << chain.reversibility.worst_pair.first
            << ", " << chain.reversibility.worst_pair.second << ") by "
            << chain.reversibility.max_violation;
        throw Error(ErrorKind::NotReversible, msg.str());
    }
}

StochasticChain search_chain(const StochasticChain& chain, bool auto_lazy) {
    StochasticChain out = (auto_lazy && !is_lazy_form(chain)) ? make_lazy(chain) : chain;
    require_search_ready(out);
    if (!out.ergodicity.aperiodic) {
        throw Error(ErrorKind::NotAperiodic,
                    "chain has period " + std::to_string(out.ergodicity.period));
    }
    return out;
}

Matrix absorbing(const StochasticChain& chain) {
    Matrix Pa = chain.P;
    for (int x : chain.marked) {
        Pa.row(x).setZero();
        Pa(x, x) = 1.0;
    }
    return Pa;
}

Vector interpolated_stationary(const StochasticChain& chain, double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorKind::SOutOfRange, "s = " + std::to_string(s));
    }
    if (chain.marked.empty() && s == 1.0) {
        throw Error(ErrorKind::InvalidMarkedSet, "pi(1) needs a nonempty marked set");
    }
    if (static_cast<int>(chain.marked.size()) >= chain.n) {
        throw Error(ErrorKind::InvalidMarkedSet, "pM must be < 1");
    }
    const double norm = 1.0 - s * (1.0 - chain.pM);
    Vector pis(chain.n);
    for (int x = 0; x < chain.n; ++x) {
        pis(x) = chain.is_marked(x) ? chain.pi(x) / norm : (1.0 - s) * chain.pi(x) / norm;
    }
    return pis;
}

InterpolatedChain interpolate(const StochasticChain& chain, double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorKind::SOutOfRange, "s = " + std::to_string(s));
    }
    InterpolatedChain interp;
    interp.base = chain;
    interp.s = s;
    interp.Ps = chain.P;
    for (int x : chain.marked) {
        for (int y = 0; y < chain.n; ++y) {
            const double target = (x == y) ? 1.0 : 0.0;
            interp.Ps(x, y) = (1.0 - s) * chain.P(x, y) + s * target;
        }
    }
    interp.pis = interpolated_stationary(chain, s);
    return interp;
}

std::optional<Family> parse_family(const std::string& name) {
    if (name == "complete") return Family::complete;
    if (name == "cycle") return Family::cycle;
    if (name == "torus") return Family::torus;
    if (name == "random" || name == "random_reversible") return Family::random_reversible;
    return std::nullopt;
}

std::string family_name(Family family) {
    switch (family) {
    case Family::complete: return "complete";
    case Family::cycle: return "cycle";
    case Family::torus: return "torus";
    case Family::random_reversible: return "random_reversible";
    }
    return "unknown";
}

namespace {

StochasticChain finish(const Matrix& P, std::vector<int> marked, bool lazy) {
    StochasticChain chain = new_chain(P, std::move(marked), false, ChainValidation::relaxed());
    return lazy ? make_lazy(chain) : chain;
}

} // namespace

StochasticChain complete_chain(int n, std::vector<int> marked, bool lazy) {
    if (n < 2) throw Error(ErrorKind::BadParams, "complete graph needs n >= 2");
    Matrix P = Matrix::Constant(n, n, 1.0 / (n - 1));
    P.diagonal().setZero();
    return finish(P, std::move(marked), lazy);
}

StochasticChain cycle_chain(int n, std::vector<int> marked, bool lazy) {
    if (n < 3) throw Error(ErrorKind::BadParams, "cycle needs n >= 3");
    Matrix P = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        P(x, (x + 1) % n) += 0.5;
        P(x, (x + n - 1) % n) += 0.5;
    }
    return finish(P, std::move(marked), lazy);
}

StochasticChain torus_chain(int width, int height, std::vector<int> marked, bool lazy) {
    if (width < 2 || height < 2) {
        throw Error(ErrorKind::BadParams, "torus needs width, height >= 2");
    }
    const int n = width * height;
    Matrix P = Matrix::Zero(n, n);
    auto index = [width](int col, int row) { return row * width + col; };
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const int x = index(col, row);
            P(x, index((col + 1) % width, row)) += 0.25;
            P(x, index((col + width - 1) % width, row)) += 0.25;
            P(x, index(col, (row + 1) % height)) += 0.25;
            P(x, index(col, (row + height - 1) % height)) += 0.25;
        }
    }
    return finish(P, std::move(marked), lazy);
}

StochasticChain random_reversible_chain(int n, int degree, std::uint64_t seed,
                                        std::vector<int> marked, bool lazy) {
    if (n < 3) throw Error(ErrorKind::BadParams, "random_reversible needs n >= 3");
    if (degree < 2 || degree >= n) {
        throw Error(ErrorKind::BadParams, "random_reversible needs 2 <= degree < n");
    }
    std::mt19937_64 rng(mix_seed(seed));

    // A random Hamiltonian cycle guarantees connectivity; further random
    // edges are added until every vertex reaches the target degree or no
    // admissible partner remains.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    std::vector<std::set<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        const int u = order[i];
        const int v = order[(i + 1) % n];
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for (int u = 0; u < n; ++u) {
        while (static_cast<int>(adj[u].size()) < degree) {
            std::vector<int> candidates;
            for (int v = 0; v < n; ++v) {
                if (v != u && !adj[u].count(v) && static_cast<int>(adj[v].size()) < degree) {
                    candidates.push_back(v);
                }
            }
            if (candidates.empty()) break;
            const int v = candidates[uniform_index(rng, candidates.size())];
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    Matrix weights = Matrix::Zero(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) {
            if (v > u) {
                const double w = 0.5 + uniform01(rng);
                weights(u, v) = w;
                weights(v, u) = w;
            }
        }
    }
    Matrix P(n, n);
    for (int u = 0; u < n; ++u) P.row(u) = weights.row(u) / weights.row(u).sum();
    return finish(P, std::move(marked), lazy);
}

StochasticChain generate(const GeneratorSpec& spec) {
    switch (spec.family) {
    case Family::complete: return complete_chain(spec.n, spec.marked, spec.lazy);
    case Family::cycle: return cycle_chain(spec.n, spec.marked, spec.lazy);
    case Family::torus: return torus_chain(spec.width, spec.height, spec.marked, spec.lazy);
    case Family::random_reversible:
        return random_reversible_chain(spec.n, spec.degree, spec.seed, spec.marked, spec.lazy);
    }
    throw Error(ErrorKind::BadParams, "unknown family");
}

} // namespace adiasearch
