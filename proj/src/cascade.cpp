#include "flowids/cascade.hpp"

#include <future>
#include <memory>
#include <string>

namespace flowids {

HelmParams CascadeConfig::helm_params(int layer) const {
    HelmParams p;
    p.c = helm_c;
    p.fista = fista;
    switch (layer) {
        case 3: p.widths = helm_u2r; break;
        case 4: p.widths = helm_r2l; break;
        case 5: p.widths = helm_unknown; break;
        default: throw std::out_of_range("layers 3-5 are H-ELM layers");
    }
    return p;
}

std::uint64_t CascadeConfig::layer_seed(int layer) const {
    return derive_seed(seed, static_cast<std::uint64_t>(layer));
}

void CascadeConfig::validate() const {
    if (knn_k < 1 || knn_k % 2 == 0)
        throw ConfigError("kNN k must be a positive odd integer, got " + std::to_string(knn_k));
    if (elm.n_hidden < 1) throw ConfigError("ELM hidden width must be >= 1");
    if (!(elm.c > 0)) throw ConfigError("ELM C must be positive");
    if (!(helm_c > 0)) throw ConfigError("H-ELM C must be positive");
    for (const HelmWidths& w : {helm_u2r, helm_r2l, helm_unknown})
        if (w.n1 < 1 || w.n2 < 1 || w.n3 < 1) throw ConfigError("H-ELM widths must all be >= 1");
    num::validate(fista);
    if (train_threads < 1) throw ConfigError("train_threads must be >= 1");
}

Category layer_detection(int layer) {
    if (layer == 5) return Category::unknown;
    return layer_target(layer);
}

Decision route(const std::array<LayerOutput, kLayerCount>& outputs) {
    Decision d;
    d.layers = outputs;
    for (int layer = 1; layer <= kLayerCount; ++layer) {
        if (outputs[static_cast<std::size_t>(layer - 1)].vote == Vote::positive) {
            d.predicted = layer_detection(layer);
            d.deciding_layer = layer;
            return d;
        }
    }
    d.predicted = Category::normal;
    return d;
}

CascadeModel train_cascade(const PreparedSet& train, const Scaler& scaler, const Taxonomy& taxonomy,
                           const CascadeConfig& config) {
    config.validate();
    for (Category c : {Category::normal, Category::dos, Category::probe, Category::u2r, Category::r2l}) {
        bool present = false;
        for (Category t : train.categories) present = present || t == c;
        if (!present)
            throw DataError("training data has no " + std::string(category_name(c)) + " records");
    }

    CascadeModel model;
    model.scaler = scaler;
    model.taxonomy = taxonomy;
    model.config = config;

    const auto launch = config.train_threads > 1 ? std::launch::async : std::launch::deferred;
    auto train_helm = [&](int layer) {
        const LayerDataset ds = build_layer_dataset(train, layer);
        return helm_train(ds.features, ds.targets, config.helm_params(layer), config.layer_seed(layer));
    };
    auto probe = std::async(launch, [&] {
        const LayerDataset ds = build_layer_dataset(train, 2);
        return elm_train(ds.features, ds.targets, config.elm, config.layer_seed(2));
    });
    auto u2r = std::async(launch, train_helm, 3);
    auto r2l = std::async(launch, train_helm, 4);
    auto unknown = std::async(launch, train_helm, 5);

    LayerDataset dos = build_layer_dataset(train, 1);
    model.dos = knn_train(std::move(dos.features), std::move(dos.targets), config.knn_k);
    model.probe = probe.get();
    model.u2r = u2r.get();
    model.r2l = r2l.get();
    model.unknown = unknown.get();
    return model;
}

CascadeModel train_cascade(std::span<const FlowRecord> records, const Taxonomy& taxonomy,
                           const CascadeConfig& config) {
    config.validate();
    const Scaler scaler = fit_scaler(records);
    return train_cascade(prepare_set(records, scaler, taxonomy), scaler, taxonomy, config);
}

std::array<LayerOutput, kLayerCount> evaluate_layers(const CascadeModel& model,
                                                     std::span<const double> x) {
    std::array<LayerOutput, kLayerCount> out;
    const KnnResult knn = knn_classify(model.dos, x);
    out[0] = {knn.vote, knn.score};
    const double scores[] = {elm_score_one(model.probe, x), helm_score_one(model.u2r, x),
                             helm_score_one(model.r2l, x), helm_score_one(model.unknown, x)};
    for (std::size_t i = 0; i < 4; ++i) out[i + 1] = {vote_from_score(scores[i]), scores[i]};
    return out;
}

Decision classify_vector(const CascadeModel& model, std::span<const double> x) {
    return route(evaluate_layers(model, x));
}

Decision classify_flow(const CascadeModel& model, const FlowRecord& record) {
    const FeatureVector x = transform(model.scaler, record);
    return classify_vector(model, x);
}

EvalReport evaluate_outputs(std::span<const std::array<LayerOutput, kLayerCount>> outputs,
                            std::span<const Category> truth, std::span<const bool> novel) {
    if (outputs.size() != truth.size() || novel.size() != truth.size())
        throw std::invalid_argument("evaluate: outputs, truth and novelty flags differ in length");
    if (truth.empty()) throw DataError("evaluate: empty test set");

    EvalReport r;
    r.size = truth.size();
    static constexpr const char* kClassifiers[] = {"kNN", "ELM", "H-ELM", "H-ELM", "H-ELM"};
    for (int layer = 1; layer <= kLayerCount; ++layer) {
        auto& lr = r.layers[static_cast<std::size_t>(layer - 1)];
        lr.layer = layer;
        lr.classifier = kClassifiers[layer - 1];
        lr.target = layer_detection(layer);
    }

    for (std::size_t i = 0; i < truth.size(); ++i) {
        const Decision d = route(outputs[i]);
        const Category t = truth[i];
        if (t == Category::unknown) throw DataError("evaluate: ground truth may not be Unknown");

        bool surviving = true;
        for (int layer = 1; layer <= kLayerCount; ++layer) {
            auto& lr = r.layers[static_cast<std::size_t>(layer - 1)];
            const Vote v = outputs[i][static_cast<std::size_t>(layer - 1)].vote;
            const Vote truth_vote = layer_truth(t, layer);
            lr.full.add(v, truth_vote);
            if (surviving) lr.surviving.add(v, truth_vote);
            surviving = surviving && v == Vote::negative;
        }

        const Vote predicted_attack = is_attack(d.predicted) ? Vote::positive : Vote::negative;
        r.overall.add(predicted_attack, is_attack(t) ? Vote::positive : Vote::negative);
        if (is_attack(t)) {
            const bool detected = predicted_attack == Vote::positive;
            if (novel[i]) {
                ++r.novel_attacks;
                r.novel_detected += detected;
            } else {
                ++r.known_attacks;
                r.known_detected += detected;
            }
        }
        ++r.categories[static_cast<std::size_t>(t)][static_cast<std::size_t>(d.predicted)];
    }
    return r;
}

EvalReport evaluate_cascade(const CascadeModel& model, const PreparedSet& test,
                            const Taxonomy& taxonomy) {
    if (test.size() == 0) throw DataError("evaluate: empty test set");
    if (test.features.cols() != model.dos.dim())
        throw std::invalid_argument("evaluate: feature dimension does not match the model");
    std::vector<std::array<LayerOutput, kLayerCount>> outputs;
    outputs.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto row = test.features.row(static_cast<Eigen::Index>(i));
        outputs.push_back(evaluate_layers(
            model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))));
    }
    std::unique_ptr<bool[]> novel(new bool[test.size()]);
    for (std::size_t i = 0; i < test.size(); ++i) novel[i] = taxonomy.is_novel(test.attack_names[i]);
    return evaluate_outputs(outputs, test.categories, std::span<const bool>(novel.get(), test.size()));
}

}  // namespace flowids
