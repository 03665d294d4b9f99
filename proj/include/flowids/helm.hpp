#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowids/elm.hpp"
#include "flowids/numkernels.hpp"

namespace flowids {

/// One frozen unsupervised stage. `decoder` is the l1-sparse autoencoder
/// solution (n_hidden x input_dim); encoding multiplies by its transpose.
struct AutoencoderStage {
    num::Matrix decoder;
    double input_scale = 1.0;

    Eigen::Index input_dim() const { return decoder.cols(); }
    Eigen::Index output_dim() const { return decoder.rows(); }
};

/// Hierarchical ELM: stacked sparse ELM autoencoders feeding an ELM head.
struct HelmModel {
    std::vector<AutoencoderStage> stages;
    ElmModel head;
    std::uint64_t seed = 0;

    Eigen::Index dim() const {
        return stages.empty() ? head.dim() : stages.front().input_dim();
    }
};

/// Autoencoder widths N1, N2 and head width N3.
struct HelmWidths {
    int n1 = 10;
    int n2 = 10;
    int n3 = 200;

    bool operator==(const HelmWidths&) const = default;
};

struct HelmParams {
    HelmWidths widths;
    double c = 1e2;
    num::FistaSettings fista;
};

/// Draws a random sigmoid mapping of width n_hidden from `seed` and returns
/// fista_l1(H, X): the decoder weights of an l1-sparse ELM autoencoder.
num::Matrix sparse_autoencoder_train(const num::Matrix& x, int n_hidden,
                                     const num::FistaSettings& settings, std::uint64_t seed);

/// Scale that maps the largest |pre-activation| on the training inputs to 1.
double stage_input_scale(const num::Matrix& x, const num::Matrix& decoder);

/// H_0 = X, H_i = g(s_i * H_{i-1} * decoder_i^T). Returns H_M.
num::Matrix helm_encode(const HelmModel& model, const num::Matrix& x);

HelmModel helm_train(const num::Matrix& x, std::span<const Vote> y, const HelmParams& params,
                     std::uint64_t seed);

num::Vector helm_scores(const HelmModel& model, const num::Matrix& x);
std::vector<Vote> helm_predict(const HelmModel& model, const num::Matrix& x);
double helm_score_one(const HelmModel& model, std::span<const double> x);

}  // namespace flowids
