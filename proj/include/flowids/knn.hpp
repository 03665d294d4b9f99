#pragma once

#include <memory>
#include <span>
#include <vector>

#include "flowids/core.hpp"
#include "flowids/numkernels.hpp"

namespace flowids {

/// Lazy binary k-nearest-neighbour classifier under the Euclidean metric.
class KdTree;

struct KnnModel {
    num::Matrix samples;  // n x d
    std::vector<Vote> targets;
    int k = 65;
    /// Search index over `samples`, built by knn_train. Queries fall back to
    /// a linear scan when it is absent.
    std::shared_ptr<const KdTree> index;

    Eigen::Index dim() const { return samples.cols(); }
};

/// Throws ConfigError when k is even, non-positive or larger than the sample count.
KnnModel knn_train(num::Matrix samples, std::vector<Vote> targets, int k);

struct KnnResult {
    Vote vote;
    double score;  // (positive votes - negative votes) / k
};

/// Majority vote of the k nearest stored samples. Equal distances are ranked
/// by stored index, lower first.
KnnResult knn_classify(const KnnModel& model, std::span<const double> x);

inline Vote knn_predict(const KnnModel& model, std::span<const double> x) {
    return knn_classify(model, x).vote;
}

std::vector<Vote> knn_predict(const KnnModel& model, const num::Matrix& x);

}  // namespace flowids
