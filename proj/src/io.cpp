#include "adiasearch/io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "adiasearch/error.hpp"
#include "adiasearch/format.hpp"

namespace adiasearch {

namespace {

bool is_scalar(const Json& value) { return !value.is_object() && !value.is_array(); }

void dump_scalar(std::ostream& out, const Json& value) {
    if (value.is_number_float()) {
        const double x = value.get<double>();
        out << (std::isfinite(x) ? format_double(x) : std::string("null"));
    } else {
        out << value.dump();
    }
}

void dump_value(std::ostream& out, const Json& value, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    if (value.is_object()) {
        if (value.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (const auto& [key, item] : value.items()) {
            if (!first) out << ",\n";
            first = false;
            out << pad << Json(key).dump() << ": ";
            dump_value(out, item, depth + 1);
        }
        out << '\n' << close << '}';
    } else if (value.is_array()) {
        bool flat = true;
        for (const auto& item : value) flat = flat && is_scalar(item);
        if (flat) {
            out << '[';
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i > 0) out << ", ";
                dump_scalar(out, value[i]);
            }
            out << ']';
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i > 0) out << ",\n";
            out << pad;
            dump_value(out, value[i], depth + 1);
        }
        out << '\n' << close << ']';
    } else {
        dump_scalar(out, value);
    }
}

void require_keys(const Json& json, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required, const std::string& what) {
    if (!json.is_object()) throw Error(ErrorKind::ParseError, what + " must be a JSON object");
    for (const auto& [key, item] : json.items()) {
        bool known = false;
        for (const char* name : allowed) known = known || key == name;
        if (!known) throw Error(ErrorKind::ParseError, "unknown key \"" + key + "\" in " + what);
    }
    for (const char* name : required) {
        if (!json.contains(name)) {
            throw Error(ErrorKind::ParseError, "missing key \"" + std::string(name) + "\" in " + what);
        }
    }
}

long long get_integer(const Json& json, const std::string& key) {
    const Json& value = json.at(key);
    if (!value.is_number_integer()) {
        throw Error(ErrorKind::ParseError, "\"" + key + "\" must be an integer");
    }
    return value.get<long long>();
}

double get_number(const Json& json, const std::string& key) {
    const Json& value = json.at(key);
    if (!value.is_number()) throw Error(ErrorKind::ParseError, "\"" + key + "\" must be a number");
    return value.get<double>();
}

bool get_bool(const Json& json, const std::string& key) {
    const Json& value = json.at(key);
    if (!value.is_boolean()) throw Error(ErrorKind::ParseError, "\"" + key + "\" must be a boolean");
    return value.get<bool>();
}

std::vector<int> get_int_list(const Json& json, const std::string& key) {
    const Json& value = json.at(key);
    if (!value.is_array()) throw Error(ErrorKind::ParseError, "\"" + key + "\" must be an array");
    std::vector<int> out;
    for (const auto& item : value) {
        if (!item.is_number_integer()) {
            throw Error(ErrorKind::ParseError, "\"" + key + "\" entries must be integers");
        }
        out.push_back(item.get<int>());
    }
    return out;
}

Json int_list(const std::vector<int>& values) {
    Json out = Json::array();
    for (int v : values) out.push_back(v);
    return out;
}

} // namespace

std::string dump_json(const Json& value) {
    std::ostringstream out;
    dump_value(out, value, 0);
    out << '\n';
    return out.str();
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_json(buffer.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::BadParams, "cannot write " + path.string());
    out << text;
}

Json chain_to_json(const StochasticChain& chain) {
    Json rows = Json::array();
    for (int x = 0; x < chain.n; ++x) {
        Json row = Json::array();
        for (int y = 0; y < chain.n; ++y) row.push_back(chain.P(x, y));
        rows.push_back(std::move(row));
    }
    Json out = Json::object();
    out["n"] = chain.n;
    out["P"] = std::move(rows);
    out["marked"] = int_list(chain.marked);
    out["lazy"] = chain.lazy;
    return out;
}

StochasticChain chain_from_json(const Json& json) {
    require_keys(json, {"n", "P", "marked", "lazy"}, {"n", "P", "marked", "lazy"}, "chain");
    const long long n = get_integer(json, "n");
    if (n < 1) throw Error(ErrorKind::ParseError, "\"n\" must be positive");
    const Json& rows = json.at("P");
    if (!rows.is_array() || static_cast<long long>(rows.size()) != n) {
        throw Error(ErrorKind::ParseError, "\"P\" must have n rows");
    }
    Matrix P(n, n);
    for (long long x = 0; x < n; ++x) {
        const Json& row = rows[x];
        if (!row.is_array() || static_cast<long long>(row.size()) != n) {
            throw Error(ErrorKind::ParseError, "row " + std::to_string(x) + " of \"P\" must have n entries");
        }
        for (long long y = 0; y < n; ++y) {
            if (!row[y].is_number()) throw Error(ErrorKind::ParseError, "\"P\" entries must be numbers");
            P(x, y) = row[y].get<double>();
        }
    }
    return new_chain(P, get_int_list(json, "marked"), get_bool(json, "lazy"),
                     ChainValidation::relaxed());
}

StochasticChain read_chain_file(const std::filesystem::path& path) {
    return chain_from_json(read_json_file(path));
}

void write_chain_file(const std::filesystem::path& path, const StochasticChain& chain) {
    write_text_file(path, dump_json(chain_to_json(chain)));
}

Json hitting_report_to_json(const HittingReport& report) {
    Json out = Json::object();
    out["ht"] = report.ht;
    out["method"] = method_name(report.method);
    if (report.method == HittingMethod::monte_carlo) {
        out["stderr"] = report.stderr_;
    } else {
        out["stderr"] = nullptr;
    }
    return out;
}

Json evolution_summary_to_json(const EvolutionTrace& trace) {
    Json out = Json::object();
    out["T"] = trace.T;
    out["epsilon"] = trace.epsilon;
    out["ht"] = trace.ht;
    out["success_prob"] = trace.successProb;
    out["min_overlap"] = trace.minOverlap;
    out["dt"] = trace.dt;
    return out;
}

Json config_to_json(const ExperimentConfig& config) {
    Json source = Json::object();
    if (config.chain_file) {
        source["file"] = *config.chain_file;
    } else if (config.generator) {
        const GeneratorSpec& g = *config.generator;
        source["family"] = family_name(g.family);
        source["n"] = g.n;
        source["width"] = g.width;
        source["height"] = g.height;
        source["degree"] = g.degree;
        source["lazy"] = g.lazy;
    }
    Json out = Json::object();
    out["chain"] = std::move(source);
    out["marked"] = int_list(config.marked);
    out["epsilon"] = config.epsilon;
    out["grid"] = config.grid;
    out["dt"] = config.dt ? Json(*config.dt) : Json(nullptr);
    out["out"] = config.out;
    out["seed"] = config.seed;
    return out;
}

ExperimentConfig config_from_json(const Json& json) {
    const auto keys = {"chain", "marked", "epsilon", "grid", "dt", "out", "seed"};
    require_keys(json, keys, {"chain"}, "config");
    ExperimentConfig config;

    const Json& source = json.at("chain");
    if (source.is_object() && source.contains("file")) {
        require_keys(source, {"file"}, {"file"}, "chain source");
        if (!source.at("file").is_string()) throw Error(ErrorKind::ParseError, "\"file\" must be a string");
        config.chain_file = source.at("file").get<std::string>();
    } else {
        require_keys(source, {"family", "n", "width", "height", "degree", "lazy"}, {"family"},
                     "chain source");
        if (!source.at("family").is_string()) {
            throw Error(ErrorKind::ParseError, "\"family\" must be a string");
        }
        const auto family = parse_family(source.at("family").get<std::string>());
        if (!family) throw Error(ErrorKind::ParseError, "unknown family " + source.at("family").dump());
        GeneratorSpec g;
        g.family = *family;
        if (source.contains("n")) g.n = static_cast<int>(get_integer(source, "n"));
        if (source.contains("width")) g.width = static_cast<int>(get_integer(source, "width"));
        if (source.contains("height")) g.height = static_cast<int>(get_integer(source, "height"));
        if (source.contains("degree")) g.degree = static_cast<int>(get_integer(source, "degree"));
        if (source.contains("lazy")) g.lazy = get_bool(source, "lazy");
        config.generator = g;
    }

    if (json.contains("marked")) config.marked = get_int_list(json, "marked");
    if (json.contains("epsilon")) config.epsilon = get_number(json, "epsilon");
    if (json.contains("grid")) config.grid = static_cast<int>(get_integer(json, "grid"));
    if (json.contains("dt") && !json.at("dt").is_null()) config.dt = get_number(json, "dt");
    if (json.contains("out")) {
        if (!json.at("out").is_string()) throw Error(ErrorKind::ParseError, "\"out\" must be a string");
        config.out = json.at("out").get<std::string>();
    }
    if (json.contains("seed")) {
        if (!json.at("seed").is_number_unsigned()) {
            throw Error(ErrorKind::ParseError, "\"seed\" must be a non-negative integer");
        }
        config.seed = json.at("seed").get<std::uint64_t>();
    }
    return config;
}

StochasticChain resolve_chain(const ExperimentConfig& config) {
    if (config.chain_file) {
        StochasticChain chain = read_chain_file(*config.chain_file);
        if (config.marked.empty()) return chain;
        return new_chain(chain.P, config.marked, chain.lazy, ChainValidation::relaxed());
    }
    if (!config.generator) throw Error(ErrorKind::BadParams, "config names no chain source");
    GeneratorSpec spec = *config.generator;
    spec.seed = config.seed;
    spec.marked = config.marked;
    return generate(spec);
}

} // namespace adiasearch
