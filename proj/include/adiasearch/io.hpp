#ifndef ADIASEARCH_IO_HPP
#define ADIASEARCH_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adiasearch/adiabatic.hpp"
#include "adiasearch/chain.hpp"
#include "adiasearch/hitting.hpp"

namespace adiasearch {

using Json = nlohmann::ordered_json;

/// Serialises with insertion-ordered keys, two-space indent and every
/// floating-point number at 17 significant digits. Non-finite values become null.
std::string dump_json(const Json& value);

Json parse_json(const std::string& text);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"n", "P", "marked", "lazy"}; keys exactly these, in this order.
Json chain_to_json(const StochasticChain& chain);

/// Unknown or missing keys and shape mismatches throw ParseError; the matrix
/// itself goes through new_chain with relaxed validation, so stochasticity
/// and irreducibility failures surface with their own kinds.
StochasticChain chain_from_json(const Json& json);

StochasticChain read_chain_file(const std::filesystem::path& path);
void write_chain_file(const std::filesystem::path& path, const StochasticChain& chain);

/// {"ht", "method", "stderr"}.
Json hitting_report_to_json(const HittingReport& report);

/// {"T", "epsilon", "ht", "success_prob", "min_overlap", "dt"}.
Json evolution_summary_to_json(const EvolutionTrace& trace);

struct ExperimentConfig {
    /// Exactly one of chain_file and generator is set.
    std::optional<std::string> chain_file;
    std::optional<GeneratorSpec> generator;
    /// Overrides the marked set of the chain source when non-empty.
    std::vector<int> marked;
    double epsilon = 0.2;
    int grid = 101;
    std::optional<double> dt;
    std::string out = ".";
    std::uint64_t seed = 0;

    bool operator==(const ExperimentConfig&) const = default;
};

Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& json);

/// Builds the chain named by the config's source, applying its marked set.
StochasticChain resolve_chain(const ExperimentConfig& config);

} // namespace adiasearch

#endif
