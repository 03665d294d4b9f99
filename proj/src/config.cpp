#include "flowids/config.hpp"

#include <charconv>
#include <sstream>

namespace flowids {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& value) {
    Int v{};
    const std::string t = trim(value);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const std::invalid_argument&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

}  // namespace

HelmWidths parse_widths(const std::string& s) {
    std::stringstream ss(s);
    std::string part;
    int values[3];
    int n = 0;
    while (std::getline(ss, part, ',')) {
        if (n == 3) throw ConfigError("widths: expected N1,N2,N3, got '" + s + "'");
        values[n++] = parse_int<int>("widths", part);
    }
    if (n != 3) throw ConfigError("widths: expected N1,N2,N3, got '" + s + "'");
    return {values[0], values[1], values[2]};
}

std::string format_widths(const HelmWidths& w) {
    return std::to_string(w.n1) + "," + std::to_string(w.n2) + "," + std::to_string(w.n3);
}

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    CascadeConfig& c = cfg.cascade;
    if (key == "train") cfg.train_path = value;
    else if (key == "test") cfg.test_path = value;
    else if (key == "taxonomy") cfg.taxonomy_path = value;
    else if (key == "cache") cfg.cache_dir = value;
    else if (key == "model") cfg.model_path = value;
    else if (key == "out") cfg.out_path = value;
    else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
    else if (key == "knn.k") c.knn_k = parse_int<int>(key, value);
    else if (key == "elm.n") c.elm.n_hidden = parse_int<int>(key, value);
    else if (key == "elm.c") c.elm.c = parse_real(key, value);
    else if (key == "helm3") c.helm_u2r = parse_widths(value);
    else if (key == "helm4") c.helm_r2l = parse_widths(value);
    else if (key == "helm5") c.helm_unknown = parse_widths(value);
    else if (key == "helm.c") c.helm_c = parse_real(key, value);
    else if (key == "fista.iterations") c.fista.max_iterations = parse_int<int>(key, value);
    else if (key == "fista.lambda") c.fista.l1_weight = parse_real(key, value);
    else if (key == "fista.power_tolerance") c.fista.power_tolerance = parse_real(key, value);
    else if (key == "fista.power_iterations") c.fista.power_max_iterations = parse_int<int>(key, value);
    else if (key == "workers") c.train_threads = parse_int<int>(key, value);
    else if (key == "bench.flows") cfg.bench_flows = parse_int<std::size_t>(key, value);
    else throw ConfigError("unknown configuration key '" + key + "'");
}

void apply_settings(RunConfig& cfg, const KeyValues& kv) {
    for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
}

KeyValues to_key_values(const CascadeConfig& c) {
    return {
        {"seed", std::to_string(c.seed)},
        {"knn.k", std::to_string(c.knn_k)},
        {"elm.n", std::to_string(c.elm.n_hidden)},
        {"elm.c", format_double(c.elm.c)},
        {"helm3", format_widths(c.helm_u2r)},
        {"helm4", format_widths(c.helm_r2l)},
        {"helm5", format_widths(c.helm_unknown)},
        {"helm.c", format_double(c.helm_c)},
        {"fista.iterations", std::to_string(c.fista.max_iterations)},
        {"fista.lambda", format_double(c.fista.l1_weight)},
        {"fista.power_tolerance", format_double(c.fista.power_tolerance)},
        {"fista.power_iterations", std::to_string(c.fista.power_max_iterations)},
    };
}

KeyValues to_key_values(const RunConfig& cfg) {
    KeyValues kv = {
        {"train", cfg.train_path}, {"test", cfg.test_path},   {"taxonomy", cfg.taxonomy_path},
        {"cache", cfg.cache_dir},  {"model", cfg.model_path}, {"out", cfg.out_path},
    };
    for (auto& p : to_key_values(cfg.cascade)) kv.push_back(std::move(p));
    kv.emplace_back("workers", std::to_string(cfg.cascade.train_threads));
    kv.emplace_back("bench.flows", std::to_string(cfg.bench_flows));
    return kv;
}

}  // namespace flowids
