#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "flowids/dataset.hpp"
#include "flowids/elm.hpp"
#include "flowids/helm.hpp"
#include "flowids/knn.hpp"
#include "flowids/metrics.hpp"
#include "flowids/taxonomy.hpp"

namespace flowids {

inline constexpr int kLayerCount = 5;

/// Hyperparameters of the five layers. Defaults are the published per-layer
/// settings (k = 65; N = 400; (40,40,200), (10,10,300), (10,10,200)).
struct CascadeConfig {
    int knn_k = 65;
    ElmParams elm{400, 1e2};
    HelmWidths helm_u2r{40, 40, 200};
    HelmWidths helm_r2l{10, 10, 300};
    HelmWidths helm_unknown{10, 10, 200};
    double helm_c = 1e2;
    num::FistaSettings fista;
    std::uint64_t seed = 1;
    /// Layers 2-5 train concurrently when > 1. Does not affect the result.
    int train_threads = 1;

    HelmParams helm_params(int layer) const;
    std::uint64_t layer_seed(int layer) const;
    void validate() const;
};

struct CascadeModel {
    Scaler scaler;
    Taxonomy taxonomy;
    CascadeConfig config;
    KnnModel dos;        // layer 1
    ElmModel probe;      // layer 2
    HelmModel u2r;       // layer 3
    HelmModel r2l;       // layer 4
    HelmModel unknown;   // layer 5: any attack vs Normal
};

struct LayerOutput {
    Vote vote = Vote::negative;
    double score = 0;
};

struct Decision {
    Category predicted = Category::normal;
    std::optional<int> deciding_layer;  // 1..5; empty for Normal
    std::array<LayerOutput, kLayerCount> layers{};
};

/// The routing rule alone: the first positive layer decides.
Decision route(const std::array<LayerOutput, kLayerCount>& outputs);

/// Category emitted when `layer` (1..5) is the first positive vote.
Category layer_detection(int layer);

/// Fits the scaler, builds the five one-vs-all sets and trains each layer.
CascadeModel train_cascade(std::span<const FlowRecord> records, const Taxonomy& taxonomy,
                           const CascadeConfig& config);

/// Same, from an already scaled training set.
CascadeModel train_cascade(const PreparedSet& train, const Scaler& scaler, const Taxonomy& taxonomy,
                           const CascadeConfig& config);

/// All five layer outputs for one scaled feature vector.
std::array<LayerOutput, kLayerCount> evaluate_layers(const CascadeModel& model,
                                                     std::span<const double> x);

Decision classify_vector(const CascadeModel& model, std::span<const double> x);
Decision classify_flow(const CascadeModel& model, const FlowRecord& record);

struct LayerReport {
    int layer = 0;
    std::string classifier;
    Category target = Category::normal;
    ConfusionCounts full;       // layer scored on the whole test set
    ConfusionCounts surviving;  // only flows that every earlier layer passed on

    bool operator==(const LayerReport&) const = default;
};

struct EvalReport {
    std::array<LayerReport, kLayerCount> layers;
    ConfusionCounts overall;
    std::size_t known_attacks = 0;
    std::size_t known_detected = 0;
    std::size_t novel_attacks = 0;
    std::size_t novel_detected = 0;
    /// [truth category][predicted category], indexed by Category.
    std::array<std::array<std::size_t, 6>, 6> categories{};
    std::size_t size = 0;

    bool operator==(const EvalReport&) const = default;
};

/// Builds a report from per-record layer outputs. The layer outputs may come
/// from any source, which is what the routing tests rely on.
EvalReport evaluate_outputs(std::span<const std::array<LayerOutput, kLayerCount>> outputs,
                            std::span<const Category> truth, std::span<const bool> novel);

EvalReport evaluate_cascade(const CascadeModel& model, const PreparedSet& test,
                            const Taxonomy& taxonomy);

/// Versioned binary container; see model_io.cpp for the layout.
inline constexpr int kModelFormatVersion = 1;

void save_model(const CascadeModel& model, std::ostream& out);
CascadeModel load_model(std::istream& in);
void save_model_file(const CascadeModel& model, const std::string& path);
CascadeModel load_model_file(const std::string& path);

}  // namespace flowids
