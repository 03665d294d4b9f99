#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "flowids/cascade.hpp"

namespace flowids {

/// Everything a run needs: paths plus the cascade hyperparameters.
struct RunConfig {
    std::string train_path;
    std::string test_path;
    std::string taxonomy_path;
    std::string cache_dir;
    std::string model_path;
    std::string out_path;
    CascadeConfig cascade;  // `workers` maps to cascade.train_threads
    std::size_t bench_flows = 20000;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` text, `#` comments. Unknown keys are an error.
KeyValues parse_key_values(std::istream& in);

/// Applies one setting; throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_settings(RunConfig& cfg, const KeyValues& kv);

/// Every setting as key/value pairs, in a stable order. Feeding the result
/// back through apply_settings reproduces the configuration.
KeyValues to_key_values(const RunConfig& cfg);
KeyValues to_key_values(const CascadeConfig& cfg);

/// "40,40,200"
HelmWidths parse_widths(const std::string& s);
std::string format_widths(const HelmWidths& w);

}  // namespace flowids
