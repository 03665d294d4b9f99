#include <random>

#include "doctest.h"
#include "flowids/metrics.hpp"

using namespace flowids;

TEST_CASE("confusion counts") {
    const auto P = Vote::positive, N = Vote::negative;
    std::vector<Vote> truth{P, P, P, P, P, N, N, N, N, N};
    CHECK(confusion(truth, truth) == ConfusionCounts{5, 5, 0, 0});

    std::vector<Vote> all_attack(6, P), all_normal(6, N);
    CHECK(confusion(all_attack, all_normal) == ConfusionCounts{0, 0, 6, 0});

    // hand count: positions 0..9
    std::vector<Vote> pred{P, N, P, N, P, P, N, N, P, N};
    std::vector<Vote> tr{P, P, N, N, P, N, N, P, P, N};
    // TP: 0,4,8  TN: 3,6,9  FP: 2,5  FN: 1,7
    CHECK(confusion(pred, tr) == ConfusionCounts{3, 3, 2, 2});

    CHECK_THROWS_AS(confusion(std::vector<Vote>{}, std::vector<Vote>{}), std::invalid_argument);
    CHECK_THROWS_AS(confusion(pred, std::vector<Vote>{P}), std::invalid_argument);
}

TEST_CASE("metric arithmetic") {
    const MetricSet m = compute_metrics({50, 30, 10, 10});
    CHECK(m.accuracy == doctest::Approx(0.8));
    CHECK(m.far == doctest::Approx(0.25));
    CHECK(m.precision == doctest::Approx(5.0 / 6.0));
    CHECK(m.recall == doctest::Approx(5.0 / 6.0));
    CHECK(m.f1 == doctest::Approx(5.0 / 6.0));

    CHECK(compute_metrics({4, 0, 0, 1}).far == 0.0);
    const MetricSet none = compute_metrics({0, 3, 2, 5});
    CHECK(none.recall == 0.0);
    CHECK(none.precision == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(compute_metrics({0, 7, 0, 0}).recall == 0.0);
    CHECK(compute_metrics({0, 7, 0, 0}).accuracy == 1.0);
}

TEST_CASE("metrics agree with direct recomputation") {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<std::size_t> count(0, 500);
    for (int trial = 0; trial < 50; ++trial) {
        ConfusionCounts c{count(gen), count(gen), count(gen), count(gen)};
        if (trial % 10 == 0) c.tp = 0;
        if (trial % 10 == 1) c.fp = c.tn = 0;
        if (c.total() == 0) c.tn = 1;
        const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
        const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
        const double acc = (tp + tn) / (tp + tn + fp + fn);
        const double far = fp + tn > 0 ? fp / (fp + tn) : 0.0;
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;

        const MetricSet m = compute_metrics(c);
        CAPTURE(trial);
        CHECK(m.accuracy == doctest::Approx(acc).epsilon(1e-14));
        CHECK(m.far == doctest::Approx(far).epsilon(1e-14));
        CHECK(m.precision == doctest::Approx(prec).epsilon(1e-14));
        CHECK(m.recall == doctest::Approx(rec).epsilon(1e-14));
        CHECK(m.f1 == doctest::Approx(f1).epsilon(1e-14));
        for (double v : {m.accuracy, m.far, m.precision, m.recall, m.f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-15);
        CHECK(compute_metrics({c.tn, c.tp, c.fn, c.fp}).accuracy == doctest::Approx(m.accuracy));
    }
}
