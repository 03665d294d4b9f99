#pragma once

#include <cstdint>
#include <vector>

#include "flowids/dataset.hpp"
#include "flowids/taxonomy.hpp"

namespace flowids {

/// NSL-KDD shaped records with category-dependent feature distributions.
/// Used by the throughput benchmark and by tests that need a trainable corpus
/// without the real dataset. Labels are drawn from the training-split attack
/// names of `taxonomy`.
struct SyntheticMix {
    double normal = 0.53;
    double dos = 0.365;
    double probe = 0.093;
    double u2r = 0.002;
    double r2l = 0.01;
};

std::vector<FlowRecord> synthetic_flows(std::size_t n, std::uint64_t seed, const Taxonomy& taxonomy,
                                        const SyntheticMix& mix = {});

}  // namespace flowids
