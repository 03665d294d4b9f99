#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "flowids/cascade.hpp"
#include "flowids/config.hpp"

namespace flowids::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// Missing or unreadable input file, bad flag combination.
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

Taxonomy load_taxonomy(const RunConfig& cfg);

/// Parses both splits, fits the scaler on the training split and writes
/// train.csv, test.csv, scaler.txt and census.txt into cfg.cache_dir.
void cmd_prepare(const RunConfig& cfg, std::ostream& log);

void cmd_train(const RunConfig& cfg, std::ostream& log);

EvalReport cmd_eval(const RunConfig& cfg, std::ostream& out);

struct PredictStats {
    std::size_t decisions = 0;
    std::size_t errors = 0;
};

/// One JSON object per non-blank input line, in input order.
PredictStats cmd_predict(const CascadeModel& model, std::istream& in, std::ostream& out, int workers);

struct BenchResult {
    std::size_t flows = 0;
    int workers = 1;
    double seconds = 0;
    double flows_per_second = 0;
    double p50_us = 0;
    double p95_us = 0;
    double p99_us = 0;
    std::uint64_t decision_digest = 0;  // hash over (category, layer) of every decision
};

/// Classifies `flows` synthetic records end to end (parse-free: record ->
/// transform -> five layers -> routing).
BenchResult cmd_bench(const CascadeModel& model, std::size_t flows, int workers, std::uint64_t seed);

void print_bench(std::ostream& out, const BenchResult& r);

struct KFoldResult {
    int k = 0;
    double accuracy = 0;
};

/// Cross-validated accuracy of the layer-1 kNN for each candidate k.
std::vector<KFoldResult> cmd_tune_k(const RunConfig& cfg, const std::vector<int>& candidates,
                                    int folds, std::size_t sample, std::ostream& log);

}  // namespace flowids::cli
