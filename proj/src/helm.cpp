#include "flowids/helm.hpp"

#include <string>

namespace flowids {

namespace {

num::Matrix encode_stage(const AutoencoderStage& stage, const num::Matrix& x) {
    if (x.cols() != stage.input_dim())
        throw std::invalid_argument("H-ELM: stage expects " + std::to_string(stage.input_dim()) +
                                    " inputs, got " + std::to_string(x.cols()));
    num::Matrix pre = x * stage.decoder.transpose();
    const double s = stage.input_scale;
    return pre.unaryExpr([s](double z) { return sigmoid(s * z); });
}

std::uint64_t stage_seed(std::uint64_t seed, std::size_t stage) { return derive_seed(seed, stage + 1); }
std::uint64_t head_seed(std::uint64_t seed) { return derive_seed(seed, 0x4845'4144); }

}  // namespace

num::Matrix sparse_autoencoder_train(const num::Matrix& x, int n_hidden,
                                     const num::FistaSettings& settings, std::uint64_t seed) {
    if (n_hidden < 1) throw ConfigError("H-ELM: autoencoder width must be >= 1");
    if (x.rows() == 0) throw DataError("H-ELM: empty autoencoder input");
    num::Matrix weights;
    num::Vector biases;
    draw_hidden_layer(n_hidden, x.cols(), seed, weights, biases);
    return num::fista_l1(elm_hidden(weights, biases, x), x, settings);
}

double stage_input_scale(const num::Matrix& x, const num::Matrix& decoder) {
    const double peak = (x * decoder.transpose()).cwiseAbs().maxCoeff();
    return peak > 0 ? 1.0 / peak : 1.0;
}

num::Matrix helm_encode(const HelmModel& model, const num::Matrix& x) {
    num::Matrix h = x;
    for (const auto& stage : model.stages) h = encode_stage(stage, h);
    return h;
}

HelmModel helm_train(const num::Matrix& x, std::span<const Vote> y, const HelmParams& params,
                     std::uint64_t seed) {
    const HelmWidths& w = params.widths;
    if (w.n1 < 1 || w.n2 < 1 || w.n3 < 1)
        throw ConfigError("H-ELM: widths must all be >= 1, got " + std::to_string(w.n1) + "," +
                          std::to_string(w.n2) + "," + std::to_string(w.n3));
    num::validate(params.fista);
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw std::invalid_argument("H-ELM: sample and target counts differ");
    {
        bool pos = false, neg = false;
        for (Vote v : y) (v == Vote::positive ? pos : neg) = true;
        if (!pos || !neg) throw DataError("training targets contain a single class");
    }

    HelmModel model;
    model.seed = seed;
    num::Matrix h = x;
    for (int width : {w.n1, w.n2}) {
        AutoencoderStage stage;
        stage.decoder = sparse_autoencoder_train(h, width, params.fista, stage_seed(seed, model.stages.size()));
        stage.input_scale = stage_input_scale(h, stage.decoder);
        h = encode_stage(stage, h);
        model.stages.push_back(std::move(stage));
    }
    model.head = elm_train(h, y, ElmParams{w.n3, params.c}, head_seed(seed));
    return model;
}

num::Vector helm_scores(const HelmModel& model, const num::Matrix& x) {
    if (x.cols() != model.dim())
        throw std::invalid_argument("H-ELM: input has dimension " + std::to_string(x.cols()) +
                                    ", model expects " + std::to_string(model.dim()));
    return elm_scores(model.head, helm_encode(model, x));
}

std::vector<Vote> helm_predict(const HelmModel& model, const num::Matrix& x) {
    const num::Vector s = helm_scores(model, x);
    std::vector<Vote> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = vote_from_score(s(i));
    return out;
}

double helm_score_one(const HelmModel& model, std::span<const double> x) {
    if (static_cast<Eigen::Index>(x.size()) != model.dim())
        throw std::invalid_argument("H-ELM: input has dimension " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(model.dim()));
    num::Vector h = Eigen::Map<const num::Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (const auto& stage : model.stages) {
        const double s = stage.input_scale;
        h = (stage.decoder * h).unaryExpr([s](double z) { return sigmoid(s * z); });
    }
    return elm_score_one(model.head, std::span<const double>(h.data(), static_cast<std::size_t>(h.size())));
}

}  // namespace flowids
