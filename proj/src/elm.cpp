#include "flowids/elm.hpp"

#include <algorithm>
#include <string>

namespace flowids {

namespace {

constexpr Eigen::Index kBlockRows = 8192;

void check_binary(std::span<const Vote> y) {
    const bool has_pos = std::find(y.begin(), y.end(), Vote::positive) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), Vote::negative) != y.end();
    if (!has_pos || !has_neg) throw DataError("training targets contain a single class");
}

}  // namespace

num::Matrix elm_hidden(const num::Matrix& weights, const num::Vector& biases, const num::Matrix& x) {
    if (x.cols() != weights.cols() || biases.size() != weights.rows())
        throw std::invalid_argument("elm_hidden: dimension mismatch (X has " +
                                    std::to_string(x.cols()) + " columns, W is " +
                                    std::to_string(weights.rows()) + "x" +
                                    std::to_string(weights.cols()) + ")");
    num::Matrix h = x * weights.transpose();
    h.rowwise() += biases.transpose();
    return h.unaryExpr([](double z) { return sigmoid(z); });
}

void draw_hidden_layer(Eigen::Index n_hidden, Eigen::Index n_features, std::uint64_t seed,
                       num::Matrix& weights, num::Vector& biases) {
    Rng rng(seed);
    weights.resize(n_hidden, n_features);
    for (Eigen::Index i = 0; i < n_hidden; ++i)
        for (Eigen::Index j = 0; j < n_features; ++j) weights(i, j) = rng.uniform(-1.0, 1.0);
    biases.resize(n_hidden);
    for (Eigen::Index i = 0; i < n_hidden; ++i) biases(i) = rng.uniform(-1.0, 1.0);
}

ElmModel elm_train(const num::Matrix& x, std::span<const Vote> y, const ElmParams& params,
                   std::uint64_t seed) {
    if (params.n_hidden < 1) throw ConfigError("ELM: n_hidden must be >= 1");
    if (!(params.c > 0)) throw ConfigError("ELM: C must be positive");
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw std::invalid_argument("ELM: sample and target counts differ");
    check_binary(y);

    ElmModel m;
    m.c = params.c;
    m.seed = seed;
    draw_hidden_layer(params.n_hidden, x.cols(), seed, m.input_weights, m.biases);

    num::NormalEquations ne(params.n_hidden, 1);
    for (Eigen::Index start = 0; start < x.rows(); start += kBlockRows) {
        const Eigen::Index rows = std::min(kBlockRows, x.rows() - start);
        const num::Matrix h = elm_hidden(m.input_weights, m.biases, x.middleRows(start, rows));
        num::Matrix t(rows, 1);
        for (Eigen::Index i = 0; i < rows; ++i)
            t(i, 0) = to_target(y[static_cast<std::size_t>(start + i)]);
        ne.add(h, t);
    }
    m.output_weights = ne.solve(params.c);
    return m;
}

num::Vector elm_scores(const ElmModel& model, const num::Matrix& x) {
    num::Vector scores(x.rows());
    for (Eigen::Index start = 0; start < x.rows(); start += kBlockRows) {
        const Eigen::Index rows = std::min(kBlockRows, x.rows() - start);
        const num::Matrix h = elm_hidden(model.input_weights, model.biases, x.middleRows(start, rows));
        scores.segment(start, rows) = h * model.output_weights.col(0);
    }
    return scores;
}

std::vector<Vote> elm_predict(const ElmModel& model, const num::Matrix& x) {
    const num::Vector s = elm_scores(model, x);
    std::vector<Vote> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = vote_from_score(s(i));
    return out;
}

double elm_score_one(const ElmModel& model, std::span<const double> x) {
    if (static_cast<Eigen::Index>(x.size()) != model.dim())
        throw std::invalid_argument("ELM: input has dimension " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(model.dim()));
    const Eigen::Map<const num::Vector> v(x.data(), static_cast<Eigen::Index>(x.size()));
    double score = 0.0;
    for (Eigen::Index i = 0; i < model.hidden(); ++i)
        score += sigmoid(model.input_weights.row(i).dot(v) + model.biases(i)) * model.output_weights(i, 0);
    return score;
}

}  // namespace flowids
