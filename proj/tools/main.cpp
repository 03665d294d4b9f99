#include <deque>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace flowids;
using namespace flowids::cli;

namespace {

struct Overrides {
    // deque: CLI11 keeps references to the slots
    std::deque<std::pair<std::string, std::optional<std::string>>> values;

    std::optional<std::string>& slot(const std::string& key) {
        values.emplace_back(key, std::nullopt);
        return values.back().second;
    }
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double v = parse_double(item);
        if (v != static_cast<int>(v)) throw ConfigError("not an integer: " + item);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Five-layer flow intrusion detector (kNN, ELM, H-ELM cascade)"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "key = value settings file (flags override it)");

    // Kept as text and validated by the same code that reads config files.
    Overrides ov;
    app.add_option("--train", ov.slot("train"), "training split (NSL-KDD text)");
    app.add_option("--test", ov.slot("test"), "test split (NSL-KDD text)");
    app.add_option("--taxonomy", ov.slot("taxonomy"), "attack name -> category table");
    app.add_option("--cache", ov.slot("cache"), "prepared-data directory");
    app.add_option("--model", ov.slot("model"), "model file");
    app.add_option("--out", ov.slot("out"), "report prefix (writes .json, .csv, .txt)");
    app.add_option("--seed", ov.slot("seed"), "master seed");
    app.add_option("--k", ov.slot("knn.k"), "neighbours for layer 1 (odd)");
    app.add_option("--elm-n", ov.slot("elm.n"), "hidden neurons for layer 2");
    app.add_option("--elm-c", ov.slot("elm.c"), "regularisation for layer 2");
    app.add_option("--helm3", ov.slot("helm3"), "layer 3 widths N1,N2,N3");
    app.add_option("--helm4", ov.slot("helm4"), "layer 4 widths N1,N2,N3");
    app.add_option("--helm5", ov.slot("helm5"), "layer 5 widths N1,N2,N3");
    app.add_option("--helm-c", ov.slot("helm.c"), "regularisation for the H-ELM heads");
    app.add_option("--fista-iterations", ov.slot("fista.iterations"), "FISTA iterations");
    app.add_option("--fista-lambda", ov.slot("fista.lambda"), "L1 weight for the autoencoders");
    app.add_option("--workers", ov.slot("workers"), "worker threads");
    app.add_option("--flows", ov.slot("bench.flows"), "flows to classify in bench");

    auto* prepare = app.add_subcommand("prepare", "parse both splits, fit the scaler, write the cache");
    auto* train = app.add_subcommand("train", "train the cascade and write a model file");
    auto* eval = app.add_subcommand("eval", "score a model on the test split");
    auto* predict = app.add_subcommand("predict", "classify raw flow lines, one JSON object per line");
    std::string input = "-";
    predict->add_option("--input", input, "flow lines to read ('-' for stdin)");
    auto* bench = app.add_subcommand("bench", "measure end-to-end classification throughput");
    auto* tune = app.add_subcommand("tune-k", "cross-validate the layer-1 neighbour count");
    std::string candidates = "5,15,35,65,95";
    int folds = 5;
    std::size_t sample = 20000;
    tune->add_option("--candidates", candidates, "comma separated odd k values");
    tune->add_option("--folds", folds, "number of folds");
    tune->add_option("--sample", sample, "subsample size, 0 for all records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw UsageError("cannot open config '" + config_path + "'");
            apply_settings(cfg, parse_key_values(in));
        }
        for (const auto& [key, value] : ov.values)
            if (value) apply_setting(cfg, key, *value);

        if (*prepare) {
            cmd_prepare(cfg, std::cout);
        } else if (*train) {
            cmd_train(cfg, std::cerr);
        } else if (*eval) {
            cmd_eval(cfg, std::cout);
        } else if (*predict) {
            if (cfg.model_path.empty()) throw UsageError("--model is required");
            const CascadeModel model = load_model_file(cfg.model_path);
            std::ios::sync_with_stdio(false);
            PredictStats stats;
            if (input == "-") {
                stats = cmd_predict(model, std::cin, std::cout, cfg.cascade.train_threads);
            } else {
                std::ifstream in(input);
                if (!in) throw UsageError("cannot open input '" + input + "'");
                stats = cmd_predict(model, in, std::cout, cfg.cascade.train_threads);
            }
            std::cerr << stats.decisions << " decisions, " << stats.errors << " rejected lines\n";
        } else if (*bench) {
            if (cfg.model_path.empty()) throw UsageError("--model is required");
            const CascadeModel model = load_model_file(cfg.model_path);
            print_bench(std::cout, cmd_bench(model, cfg.bench_flows, cfg.cascade.train_threads, cfg.cascade.seed));
        } else if (*tune) {
            const auto ks = parse_int_list(candidates);
            const auto results = cmd_tune_k(cfg, ks, folds, sample, std::cout);
            auto best = results.front();
            for (const auto& r : results)
                if (r.accuracy > best.accuracy) best = r;
            std::cout << "best k: " << best.k << '\n';
        }
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitInput;
    } catch (const FormatError& e) {
        std::cerr << "model file error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
