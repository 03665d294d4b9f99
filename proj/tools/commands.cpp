#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include "flowids/report.hpp"
#include "flowids/synthetic.hpp"
#include "json.hpp"

#ifndef FLOWIDS_DEFAULT_TAXONOMY
#define FLOWIDS_DEFAULT_TAXONOMY "attack_taxonomy"
#endif

namespace flowids::cli {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path, std::string_view what) {
    if (path.empty()) throw UsageError(std::string(what) + " path is required");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + std::string(what) + " '" + path + "'");
    return in;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<FlowRecord> read_records(const std::string& path, std::string_view what) {
    auto in = open_input(path, what);
    try {
        return parse_nslkdd(in, DifficultyColumn::detect);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(':') + 2));
    }
}

PreparedSet read_cache_set(const std::string& dir, const char* name) {
    auto in = open_input((fs::path(dir) / name).string(), "prepared cache");
    return read_prepared_csv(in);
}

Scaler read_cache_scaler(const std::string& dir) {
    auto in = open_input((fs::path(dir) / "scaler.txt").string(), "prepared cache");
    return read_scaler(in);
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const auto w = static_cast<std::size_t>(std::max(1, workers));
    if (w == 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t start = 0; start < n; start += chunk)
        threads.emplace_back([&fn, start, end = std::min(n, start + chunk)] { fn(start, end); });
    for (auto& t : threads) t.join();
}

KeyValues echo_config(const RunConfig& cfg, const CascadeConfig& model_config) {
    RunConfig copy = cfg;
    const int threads = copy.cascade.train_threads;
    copy.cascade = model_config;
    copy.cascade.train_threads = threads;
    return to_key_values(copy);
}

std::string decision_json(std::size_t id, const Decision& d) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["category"] = category_name(d.predicted);
    j["layer"] = d.deciding_layer ? nlohmann::ordered_json(*d.deciding_layer) : nlohmann::ordered_json();
    auto& scores = j["scores"] = nlohmann::ordered_json::array();
    for (const auto& l : d.layers) scores.push_back(l.score);
    return j.dump();
}

}  // namespace

Taxonomy load_taxonomy(const RunConfig& cfg) {
    const std::string path = cfg.taxonomy_path.empty() ? FLOWIDS_DEFAULT_TAXONOMY : cfg.taxonomy_path;
    auto in = open_input(path, "taxonomy");
    return Taxonomy::parse(in);
}

void cmd_prepare(const RunConfig& cfg, std::ostream& log) {
    if (cfg.cache_dir.empty()) throw UsageError("--cache directory is required");
    const Taxonomy taxonomy = load_taxonomy(cfg);
    const auto train = read_records(cfg.train_path, "training file");
    const auto test = read_records(cfg.test_path, "test file");
    if (train.empty()) throw DataError("training file has no records");

    const Scaler scaler = fit_scaler(train);
    const PreparedSet train_set = prepare_set(train, scaler, taxonomy);
    const PreparedSet test_set = prepare_set(test, scaler, taxonomy);

    fs::create_directories(cfg.cache_dir);
    const fs::path dir(cfg.cache_dir);
    {
        auto out = open_output(dir / "train.csv");
        write_prepared_csv(out, train_set);
    }
    {
        auto out = open_output(dir / "test.csv");
        write_prepared_csv(out, test_set);
    }
    {
        auto out = open_output(dir / "scaler.txt");
        write_scaler(out, scaler);
    }

    const Census train_census = census(train, taxonomy);
    const Census test_census = census(test, taxonomy);
    {
        auto out = open_output(dir / "census.txt");
        out << "[train]\n";
        render_census(out, train_census);
        out << "[test]\n";
        render_census(out, test_census);
    }
    log << "Prepared " << train.size() << " training and " << test.size() << " test records into "
        << cfg.cache_dir << "\n\nTest split census\n";
    render_census(log, test_census);
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
    if (cfg.model_path.empty()) throw UsageError("--model output path is required");
    const Taxonomy taxonomy = load_taxonomy(cfg);
    const auto start = std::chrono::steady_clock::now();

    CascadeModel model;
    if (!cfg.train_path.empty()) {
        const auto records = read_records(cfg.train_path, "training file");
        model = train_cascade(records, taxonomy, cfg.cascade);
    } else if (!cfg.cache_dir.empty()) {
        model = train_cascade(read_cache_set(cfg.cache_dir, "train.csv"), read_cache_scaler(cfg.cache_dir),
                              taxonomy, cfg.cascade);
    } else {
        throw UsageError("either --train or --cache is required");
    }
    save_model_file(model, cfg.model_path);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << "Trained 5-layer cascade on " << model.dos.samples.rows() << " records in " << secs
        << " s; model written to " << cfg.model_path << '\n';
    for (const auto& [k, v] : to_key_values(model.config)) log << "  " << k << " = " << v << '\n';
}

EvalReport cmd_eval(const RunConfig& cfg, std::ostream& out) {
    if (cfg.model_path.empty()) throw UsageError("--model is required");
    const CascadeModel model = load_model_file(cfg.model_path);

    PreparedSet test;
    if (!cfg.test_path.empty()) {
        const auto records = read_records(cfg.test_path, "test file");
        test = prepare_set(records, model.scaler, model.taxonomy);
    } else if (!cfg.cache_dir.empty()) {
        test = read_cache_set(cfg.cache_dir, "test.csv");
    } else {
        throw UsageError("either --test or --cache is required");
    }

    const EvalReport report = evaluate_cascade(model, test, model.taxonomy);
    const KeyValues config = echo_config(cfg, model.config);
    render_text(out, report, config);
    if (!cfg.out_path.empty()) {
        {
            auto f = open_output(cfg.out_path + ".json");
            render_json(f, report, config);
        }
        {
            auto f = open_output(cfg.out_path + ".csv");
            render_csv(f, report);
        }
        {
            auto f = open_output(cfg.out_path + ".txt");
            render_text(f, report, config);
        }
    }
    return report;
}

PredictStats cmd_predict(const CascadeModel& model, std::istream& in, std::ostream& out, int workers) {
    constexpr std::size_t kBatch = 4096;
    PredictStats stats;
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::vector<std::string> results;
    std::vector<char> failed;
    std::string line;
    std::size_t line_no = 0;
    bool eof = false;
    while (!eof) {
        lines.clear();
        while (lines.size() < kBatch) {
            if (!std::getline(in, line)) {
                eof = true;
                break;
            }
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            lines.emplace_back(line_no, line);
        }
        results.assign(lines.size(), {});
        failed.assign(lines.size(), 0);
        parallel_for(lines.size(), workers, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto& [id, text] = lines[i];
                try {
                    results[i] = decision_json(id, classify_flow(model, parse_flow_line(text, id)));
                } catch (const std::exception& e) {
                    nlohmann::ordered_json j;
                    j["id"] = id;
                    j["error"] = e.what();
                    results[i] = j.dump();
                    failed[i] = 1;
                }
            }
        });
        for (std::size_t i = 0; i < results.size(); ++i) {
            out << results[i] << '\n';
            ++(failed[i] ? stats.errors : stats.decisions);
        }
    }
    out.flush();
    return stats;
}

BenchResult cmd_bench(const CascadeModel& model, std::size_t flows, int workers, std::uint64_t seed) {
    if (flows == 0) throw UsageError("benchmark needs at least one flow");
    const auto records = synthetic_flows(flows, seed, model.taxonomy);

    std::vector<double> latency_us(flows);
    std::vector<Decision> decisions(flows);
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    parallel_for(flows, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto t0 = clock::now();
            decisions[i] = classify_flow(model, records[i]);
            latency_us[i] = std::chrono::duration<double, std::micro>(clock::now() - t0).count();
        }
    });
    const double secs = std::chrono::duration<double>(clock::now() - start).count();

    BenchResult r;
    r.flows = flows;
    r.workers = std::max(1, workers);
    r.seconds = secs;
    r.flows_per_second = secs > 0 ? static_cast<double>(flows) / secs : 0.0;
    std::sort(latency_us.begin(), latency_us.end());
    auto pct = [&](double p) {
        const auto idx = static_cast<std::size_t>(p * static_cast<double>(flows - 1));
        return latency_us[idx];
    };
    r.p50_us = pct(0.50);
    r.p95_us = pct(0.95);
    r.p99_us = pct(0.99);

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& d : decisions) {
        h = (h ^ static_cast<std::uint64_t>(d.predicted)) * 0x100000001b3ULL;
        h = (h ^ static_cast<std::uint64_t>(d.deciding_layer.value_or(0))) * 0x100000001b3ULL;
    }
    r.decision_digest = h;
    return r;
}

void print_bench(std::ostream& out, const BenchResult& r) {
    out << "flows: " << r.flows << "\nworkers: " << r.workers << "\nseconds: " << r.seconds
        << "\nflows_per_second: " << r.flows_per_second << "\nlatency_us_p50: " << r.p50_us
        << "\nlatency_us_p95: " << r.p95_us << "\nlatency_us_p99: " << r.p99_us
        << "\ndecision_digest: " << std::hex << r.decision_digest << std::dec << '\n';
}

std::vector<KFoldResult> cmd_tune_k(const RunConfig& cfg, const std::vector<int>& candidates,
                                    int folds, std::size_t sample, std::ostream& log) {
    if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
    if (candidates.empty()) throw UsageError("no candidate k values");
    const Taxonomy taxonomy = load_taxonomy(cfg);

    PreparedSet set;
    if (!cfg.train_path.empty()) {
        const auto records = read_records(cfg.train_path, "training file");
        set = prepare_set(records, fit_scaler(records), taxonomy);
    } else if (!cfg.cache_dir.empty()) {
        set = read_cache_set(cfg.cache_dir, "train.csv");
    } else {
        throw UsageError("either --train or --cache is required");
    }
    const LayerDataset ds = build_layer_dataset(set, 1);

    std::vector<std::size_t> order(ds.targets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.cascade.seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next() % i]);
    if (sample > 0 && sample < order.size()) order.resize(sample);

    const auto n = order.size();
    std::vector<KFoldResult> results;
    for (int k : candidates) {
        std::size_t correct = 0;
        for (int f = 0; f < folds; ++f) {
            std::vector<std::size_t> train_idx, test_idx;
            for (std::size_t i = 0; i < n; ++i)
                (static_cast<int>(i % static_cast<std::size_t>(folds)) == f ? test_idx : train_idx).push_back(order[i]);
            num::Matrix x(static_cast<Eigen::Index>(train_idx.size()), ds.features.cols());
            std::vector<Vote> y;
            for (std::size_t i = 0; i < train_idx.size(); ++i) {
                x.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(train_idx[i]));
                y.push_back(ds.targets[train_idx[i]]);
            }
            const KnnModel model = knn_train(std::move(x), std::move(y), k);
            for (std::size_t idx : test_idx) {
                const auto row = ds.features.row(static_cast<Eigen::Index>(idx));
                const Vote v = knn_predict(model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
                correct += v == ds.targets[idx];
            }
        }
        results.push_back({k, static_cast<double>(correct) / static_cast<double>(n)});
        log << "k=" << k << "  cv_accuracy=" << percent(results.back().accuracy) << "%\n";
    }
    return results;
}

}  // namespace flowids::cli
