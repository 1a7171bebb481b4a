#include "adiasearch/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "adiasearch/adiabatic.hpp"
#include "adiasearch/discriminant.hpp"
#include "adiasearch/format.hpp"
#include "adiasearch/hamiltonian.hpp"
#include "adiasearch/hitting.hpp"
#include "adiasearch/io.hpp"
#include "adiasearch/verify.hpp"

namespace adiasearch::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonStochastic:
    case ErrorKind::NotIrreducible:
    case ErrorKind::NotAperiodic:
    case ErrorKind::NotReversible:
    case ErrorKind::InvalidMarkedSet:
        return kExitValidation;
    case ErrorKind::BadParams:
    case ErrorKind::SOutOfRange:
    case ErrorKind::DimensionCap:
    case ErrorKind::ParseError:
        return kExitUsage;
    case ErrorKind::NonUnitaryDrift:
    case ErrorKind::StepControlFailure:
        return kExitBound;
    case ErrorKind::SingularSystem:
    case ErrorKind::EigensolverFailure:
    case ErrorKind::DegenerateDenominator:
    case ErrorKind::SAtOne:
    case ErrorKind::WalkDidNotAbsorb:
        return kExitInvariant;
    }
    return kExitInvariant;
}

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out = ".";
    int grid = 101;
    std::string config;
};

struct Context {
    GlobalOptions global;
    CLI::App* app = nullptr;
    std::ostream& out;
    std::ostream& err;
};

/// Layers explicit command-line values over an optional config file.
struct Resolved {
    ExperimentConfig config;
    StochasticChain chain;
};

Resolved resolve(const Context& ctx, const std::string& chain_file, std::optional<double> epsilon,
                 std::optional<double> dt) {
    ExperimentConfig config;
    if (!ctx.global.config.empty()) config = config_from_json(read_json_file(ctx.global.config));
    const CLI::App& app = *ctx.app;
    if (!chain_file.empty()) {
        config.chain_file = chain_file;
        config.generator.reset();
    }
    if (app.count("--seed") > 0) config.seed = ctx.global.seed;
    if (app.count("--out") > 0 || ctx.global.config.empty()) config.out = ctx.global.out;
    if (app.count("--grid") > 0 || ctx.global.config.empty()) config.grid = ctx.global.grid;
    if (epsilon) config.epsilon = *epsilon;
    if (dt) config.dt = dt;
    if (!config.chain_file && !config.generator) {
        throw Error(ErrorKind::BadParams, "no chain file given");
    }
    if (config.grid < 2) throw Error(ErrorKind::BadParams, "--grid must be at least 2");
    return {config, resolve_chain(config)};
}

template <typename Writer>
std::string render(Writer&& writer) {
    std::ostringstream buffer;
    writer(buffer);
    return buffer.str();
}

int cmd_generate(const Context& ctx, const std::string& family_text, GeneratorSpec spec,
                 const std::string& file) {
    const auto family = parse_family(family_text);
    if (!family) throw Error(ErrorKind::BadParams, "unknown family \"" + family_text + "\"");
    spec.family = *family;
    spec.seed = ctx.global.seed;
    const StochasticChain chain = generate(spec);
    const fs::path path = fs::path(ctx.global.out) / file;
    write_chain_file(path, chain);
    ctx.out << path.string() << '\n';
    return kExitOk;
}

int cmd_analyze(const Context& ctx, const std::string& chain_file, long long trials, bool no_lazy) {
    const Resolved r = resolve(ctx, chain_file, std::nullopt, std::nullopt);
    const StochasticChain c = search_chain(r.chain, !no_lazy);
    const std::vector<double> grid = uniform_grid(r.config.grid);

    const HittingReport linear = classical_hitting_time(c);
    const long long t_max = series_terms_for_tail(c, 1e-8);
    const HittingReport series = series_hitting_time(c, t_max);
    const HittingReport mc = monte_carlo_hitting_time(c, trials, r.config.seed);
    const LemmaCheck lemma = verify_lemma_HT(c, grid);
    const LemmaCheck derivative = verify_derivative_lemma(c, {0.0, 0.25, 0.5, 0.75, 0.9});

    std::vector<SpectralDecomposition> sweep;
    for (double s : grid) sweep.push_back(spectral_decomposition(c, s));

    Json hitting = Json::object();
    hitting["linear_solve"] = hitting_report_to_json(linear);
    hitting["series"] = hitting_report_to_json(series);
    hitting["monte_carlo"] = hitting_report_to_json(mc);

    Json table = Json::array();
    for (double eps : {0.5, 0.25, 0.1}) {
        const RunningTime rt = running_time(c, eps, r.config.grid, false);
        Json row = Json::object();
        row["epsilon"] = eps;
        row["T"] = rt.T;
        row["T_grid"] = rt.T_grid;
        row["argmax_s"] = rt.argmax_s;
        row["relative_gap"] = rt.relative_gap;
        table.push_back(std::move(row));
    }

    Json report = Json::object();
    report["n"] = c.n;
    Json marked = Json::array();
    for (int x : c.marked) marked.push_back(x);
    report["marked"] = std::move(marked);
    report["pM"] = c.pM;
    report["lazy_applied"] = !is_lazy_form(r.chain) && !no_lazy;
    report["ht"] = linear.ht;
    report["hitting"] = std::move(hitting);
    report["series_t_max"] = t_max;
    report["monte_carlo_trials"] = trials;
    report["lemma2_max_dev"] = lemma.max_deviation;
    report["derivative_lemma_max_dev"] = derivative.max_deviation;
    report["running_time"] = std::move(table);

    const fs::path dir = r.config.out;
    write_text_file(dir / "report.json", dump_json(report));
    write_text_file(dir / "spectrum.csv", render([&](std::ostream& o) { write_spectrum_csv(o, sweep); }));
    write_text_file(dir / "hitting.csv", render([&](std::ostream& o) { write_lemma_csv(o, lemma); }));
    ctx.out << dump_json(report);
    return kExitOk;
}

int cmd_evolve(const Context& ctx, const std::string& chain_file, std::optional<double> epsilon,
               std::optional<double> dt, bool no_lazy) {
    const Resolved r = resolve(ctx, chain_file, epsilon, dt);
    const double eps = r.config.epsilon;
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::BadParams, "--epsilon must be in (0, 1)");
    if (r.chain.n > kEdgeSpaceCap) {
        throw Error(ErrorKind::DimensionCap, "evolution needs n <= " + std::to_string(kEdgeSpaceCap) +
                                                 ", got n = " + std::to_string(r.chain.n));
    }
    EvolveOptions options;
    options.dt = r.config.dt;
    options.auto_lazy = !no_lazy;
    const EvolutionTrace trace = evolve(r.chain, eps, options);

    const fs::path dir = r.config.out;
    const Json summary = evolution_summary_to_json(trace);
    write_text_file(dir / "trace.csv", render([&](std::ostream& o) { write_trace_csv(o, trace); }));
    write_text_file(dir / "summary.json", dump_json(summary));
    ctx.out << dump_json(summary);

    const double target = 1.0 - eps * eps - 0.05;
    if (trace.successProb < target) {
        ctx.err << "success probability " << format_double(trace.successProb) << " below "
                << format_double(target) << '\n';
        return kExitBound;
    }
    return kExitOk;
}

int cmd_verify(const Context& ctx, const std::string& chain_file, VerifyOptions options) {
    const Resolved r = resolve(ctx, chain_file, std::nullopt, std::nullopt);
    options.seed = r.config.seed;
    const std::vector<InvariantResult> results = run_invariant_suite(r.chain, options);

    Json rows = Json::array();
    for (const InvariantResult& result : results) {
        const char* status = result.skipped ? "SKIP" : (result.passed ? "PASS" : "FAIL");
        ctx.out << status << ' ' << result.name << " residual=" << format_double(result.residual)
                << " tolerance=" << format_double(result.tolerance);
        if (!result.detail.empty()) ctx.out << " (" << result.detail << ')';
        ctx.out << '\n';
        Json row = Json::object();
        row["name"] = result.name;
        row["status"] = status;
        row["residual"] = result.residual;
        row["tolerance"] = result.tolerance;
        row["detail"] = result.detail;
        rows.push_back(std::move(row));
    }
    Json report = Json::object();
    report["all_passed"] = all_passed(results);
    report["invariants"] = std::move(rows);
    write_text_file(fs::path(r.config.out) / "verify.json", dump_json(report));

    if (!all_passed(results)) {
        ctx.err << "invariant failures:";
        for (const InvariantResult& result : results) {
            if (!result.passed) ctx.err << ' ' << result.name;
        }
        ctx.err << '\n';
        return kExitInvariant;
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adiabatic quantum search over reversible Markov chains"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Seed for every random stream");
    app.add_option("--out", global.out, "Output directory");
    app.add_option("--grid", global.grid, "Number of s-grid points")->check(CLI::Range(2, 100000));
    app.add_option("--config", global.config, "Experiment config JSON")->check(CLI::ExistingFile);

    auto* generate_cmd = app.add_subcommand("generate", "Write a chain from a test-graph family");
    std::string family;
    GeneratorSpec spec;
    std::string file = "chain.json";
    generate_cmd->set_help_flag("--help", "Print this help message and exit");
    generate_cmd->add_option("family", family, "complete | cycle | torus | random")->required();
    generate_cmd->add_option("--n", spec.n, "Vertex count");
    generate_cmd->add_option("--w", spec.width, "Torus width");
    generate_cmd->add_option("--h", spec.height, "Torus height");
    generate_cmd->add_option("--deg", spec.degree, "Target degree (random)");
    generate_cmd->add_option("--marked", spec.marked, "Marked vertices")->delimiter(',');
    generate_cmd->add_flag("--lazy", spec.lazy, "Apply (P + I) / 2");
    generate_cmd->add_option("--file", file, "File name inside --out");

    std::string chain_file;
    bool no_lazy = false;

    auto* analyze_cmd = app.add_subcommand("analyze", "Spectra, hitting times and running times");
    long long trials = 100'000;
    analyze_cmd->add_option("chain", chain_file, "Chain JSON file");
    analyze_cmd->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    analyze_cmd->add_flag("--no-auto-lazy", no_lazy, "Do not make the chain lazy");

    auto* evolve_cmd = app.add_subcommand("evolve", "Simulate the adiabatic search");
    std::optional<double> epsilon;
    std::optional<double> dt;
    evolve_cmd->add_option("chain", chain_file, "Chain JSON file");
    evolve_cmd->add_option("--epsilon", epsilon, "Target error");
    evolve_cmd->add_option("--dt", dt, "Fixed time step (disables refinement)");
    evolve_cmd->add_flag("--no-auto-lazy", no_lazy, "Do not make the chain lazy");

    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite");
    VerifyOptions verify_options;
    bool skip_evolution = false;
    verify_cmd->add_option("chain", chain_file, "Chain JSON file");
    verify_cmd->add_option("--trials", verify_options.monte_carlo_trials, "Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--epsilon", verify_options.epsilon, "Epsilon for the evolution checks");
    verify_cmd->add_flag("--no-evolve", skip_evolution, "Skip the evolution checks");
    verify_cmd->add_flag("--no-auto-lazy", no_lazy, "Do not make the chain lazy");

    std::vector<std::string> argv_storage{"adiasearch"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Context ctx{global, &app, out, err};
    try {
        if (generate_cmd->parsed()) return cmd_generate(ctx, family, spec, file);
        if (analyze_cmd->parsed()) return cmd_analyze(ctx, chain_file, trials, no_lazy);
        if (evolve_cmd->parsed()) return cmd_evolve(ctx, chain_file, epsilon, dt, no_lazy);
        verify_options.evolve = !skip_evolution;
        verify_options.auto_lazy = !no_lazy;
        return cmd_verify(ctx, chain_file, verify_options);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitInvariant;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace adiasearch::cli
