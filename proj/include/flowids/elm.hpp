#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "flowids/core.hpp"
#include "flowids/numkernels.hpp"

namespace flowids {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Single-hidden-layer ELM with a scalar +-1 output.
struct ElmModel {
    num::Matrix input_weights;   // n_hidden x n_features, U[-1,1]
    num::Vector biases;          // n_hidden, U[-1,1]
    num::Matrix output_weights;  // n_hidden x 1
    double c = 1e2;
    std::uint64_t seed = 0;

    Eigen::Index hidden() const { return input_weights.rows(); }
    Eigen::Index dim() const { return input_weights.cols(); }
};

struct ElmParams {
    int n_hidden = 400;
    double c = 1e2;
};

/// H(j, i) = g(w_i . x_j + b_i), one row per sample.
num::Matrix elm_hidden(const num::Matrix& weights, const num::Vector& biases, const num::Matrix& x);

/// Random U[-1,1] hidden layer drawn from `seed`.
void draw_hidden_layer(Eigen::Index n_hidden, Eigen::Index n_features, std::uint64_t seed,
                       num::Matrix& weights, num::Vector& biases);

/// Throws DataError when only one class is present, ConfigError for bad params.
ElmModel elm_train(const num::Matrix& x, std::span<const Vote> y, const ElmParams& params,
                   std::uint64_t seed);

/// Raw decision values h(x) . beta.
num::Vector elm_scores(const ElmModel& model, const num::Matrix& x);

/// sign of the score; a score of exactly 0 votes positive.
inline Vote vote_from_score(double s) { return s < 0 ? Vote::negative : Vote::positive; }

std::vector<Vote> elm_predict(const ElmModel& model, const num::Matrix& x);

/// Score of a single sample without allocating a matrix.
double elm_score_one(const ElmModel& model, std::span<const double> x);

}  // namespace flowids
