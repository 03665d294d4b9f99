#pragma once

#include <cstddef>
#include <span>

#include "flowids/core.hpp"

namespace flowids {

/// Binary confusion counts with attack (Vote::positive) as the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }

    void add(Vote predicted, Vote truth);

    ConfusionCounts& operator+=(const ConfusionCounts& o);
    bool operator==(const ConfusionCounts&) const = default;
};

/// Fractions in [0,1]; see compute_metrics for the zero-denominator rules.
struct MetricSet {
    double accuracy = 0;
    double far = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

/// Throws std::invalid_argument on length mismatch or empty input.
ConfusionCounts confusion(std::span<const Vote> predicted, std::span<const Vote> truth);

/// Accuracy, false alarm rate, precision, recall and F-measure. A ratio whose
/// denominator is zero is reported as 0.
MetricSet compute_metrics(const ConfusionCounts& c);

}  // namespace flowids
