#include <sstream>

#include "doctest.h"
#include "flowids/cascade.hpp"
#include "flowids/config.hpp"
#include "support.hpp"

using namespace flowids;
using num::Matrix;

namespace {

using Outputs = std::array<LayerOutput, kLayerCount>;

Outputs votes(std::array<int, kLayerCount> v) {
    Outputs o;
    for (std::size_t i = 0; i < kLayerCount; ++i)
        o[i] = {v[i] > 0 ? Vote::positive : Vote::negative, static_cast<double>(v[i])};
    return o;
}

// Constant-output ELM: one hidden unit fixed at g(0) = 0.5.
ElmModel constant_elm(Vote v) {
    ElmModel m;
    m.input_weights = Matrix::Zero(1, kFeatureDim);
    m.biases = num::Vector::Zero(1);
    m.output_weights = Matrix::Constant(1, 1, to_target(v));
    return m;
}

CascadeModel stub_model(std::array<Vote, kLayerCount> v) {
    CascadeModel m;
    m.scaler.max.fill(1.0);
    m.dos = knn_train(Matrix::Zero(1, kFeatureDim), {v[0]}, 1);
    m.probe = constant_elm(v[1]);
    m.u2r.head = constant_elm(v[2]);
    m.r2l.head = constant_elm(v[3]);
    m.unknown.head = constant_elm(v[4]);
    return m;
}

CascadeConfig small_config() {
    CascadeConfig c;
    c.knn_k = 5;
    c.elm = {40, 1e2};
    c.helm_u2r = {6, 6, 40};
    c.helm_r2l = {6, 6, 40};
    c.helm_unknown = {6, 6, 40};
    return c;
}

}  // namespace

TEST_CASE("routing picks the first positive layer") {
    CHECK(route(votes({-1, -1, -1, -1, -1})).predicted == Category::normal);
    CHECK(!route(votes({-1, -1, -1, -1, -1})).deciding_layer);

    const Decision d1 = route(votes({1, 1, 1, 1, 1}));
    CHECK(d1.predicted == Category::dos);
    CHECK(d1.deciding_layer == 1);
    CHECK(route(votes({-1, 1, -1, 1, -1})).predicted == Category::probe);
    CHECK(route(votes({-1, -1, 1, -1, -1})).predicted == Category::u2r);
    CHECK(route(votes({-1, -1, -1, 1, 1})).predicted == Category::r2l);
    const Decision d5 = route(votes({-1, -1, -1, -1, 1}));
    CHECK(d5.predicted == Category::unknown);
    CHECK(d5.deciding_layer == 5);
}

TEST_CASE("routing invariants over all vote patterns") {
    for (int mask = 0; mask < 32; ++mask) {
        std::array<int, kLayerCount> v{};
        for (std::size_t i = 0; i < kLayerCount; ++i) v[i] = (mask >> i) & 1 ? 1 : -1;
        const Decision d = route(votes(v));
        // exclusivity and consistency
        if (d.deciding_layer) {
            const int k = *d.deciding_layer;
            CHECK(d.predicted == layer_detection(k));
            CHECK(v[static_cast<std::size_t>(k - 1)] == 1);
            for (int j = 1; j < k; ++j) CHECK(v[static_cast<std::size_t>(j - 1)] == -1);
        } else {
            CHECK(d.predicted == Category::normal);
            CHECK(mask == 0);
        }
        // flipping a later layer to +1 never changes an earlier decision
        for (std::size_t k = 0; k < kLayerCount; ++k) {
            if (v[k] == 1) continue;
            auto flipped = v;
            flipped[k] = 1;
            const Decision f = route(votes(flipped));
            if (d.deciding_layer && *d.deciding_layer <= static_cast<int>(k))
                CHECK(f.predicted == d.predicted);
            else
                CHECK(f.deciding_layer == static_cast<int>(k + 1));
        }
    }
}

TEST_CASE("stub models route as forced") {
    const double x[kFeatureDim] = {0.1, 1, 0, 0, 0.2, 0.3, 0.4, 0.5};
    const auto P = Vote::positive, N = Vote::negative;
    CHECK(classify_vector(stub_model({N, N, N, N, P}), x).predicted == Category::unknown);
    CHECK(classify_vector(stub_model({N, N, N, N, P}), x).deciding_layer == 5);
    CHECK(classify_vector(stub_model({P, P, N, N, N}), x).predicted == Category::dos);
    const Decision none = classify_vector(stub_model({N, N, N, N, N}), x);
    CHECK(none.predicted == Category::normal);
    for (const auto& l : none.layers) CHECK(l.vote == N);
}

TEST_CASE("always-negative stubs never alarm") {
    const auto N = Vote::negative;
    const CascadeModel m = stub_model({N, N, N, N, N});
    const Taxonomy t = testing::shipped_taxonomy();
    const auto recs = synthetic_flows(300, 2, t);
    const PreparedSet set = prepare_set(recs, m.scaler, t);
    const EvalReport r = evaluate_cascade(m, set, t);
    const MetricSet overall = compute_metrics(r.overall);
    CHECK(overall.recall == 0.0);
    CHECK(overall.far == 0.0);
    CHECK(r.overall.total() == set.size());

    // all-normal test set
    PreparedSet normals;
    normals.features = Matrix::Zero(4, kFeatureDim);
    normals.categories.assign(4, Category::normal);
    normals.attack_names.assign(4, "normal");
    const EvalReport rn = evaluate_cascade(m, normals, t);
    CHECK(compute_metrics(rn.overall).accuracy == 1.0);
    CHECK(compute_metrics(rn.overall).far == 0.0);
}

TEST_CASE("report counts against hand enumeration") {
    using C = Category;
    const std::vector<Outputs> out{
        votes({1, -1, -1, -1, 1}),   // DoS truth, decided DoS
        votes({-1, 1, -1, -1, -1}),  // DoS truth, decided Probe
        votes({-1, -1, -1, -1, -1}), // Normal truth, Normal
        votes({-1, -1, -1, -1, 1}),  // Normal truth, Unknown (false alarm)
        votes({-1, -1, 1, -1, -1}),  // U2R truth, U2R
        votes({-1, -1, -1, 1, 1}),   // R2L truth, R2L
        votes({-1, -1, -1, -1, -1}), // R2L truth, missed
        votes({1, -1, -1, -1, -1}),  // Normal truth, DoS (false alarm)
        votes({-1, -1, -1, -1, 1}),  // Probe truth, Unknown
        votes({-1, -1, -1, -1, -1}), // Normal truth, Normal
    };
    const std::vector<C> truth{C::dos, C::dos, C::normal, C::normal, C::u2r,
                               C::r2l, C::r2l, C::normal, C::probe, C::normal};
    const bool novel[] = {false, true, false, false, false, true, false, false, true, false};
    const EvalReport r = evaluate_outputs(out, truth, novel);

    CHECK(r.size == 10);
    CHECK(r.overall == ConfusionCounts{5, 2, 2, 1});
    // layer 1 on everything: votes + at rows 0,7; DoS truth rows 0,1
    CHECK(r.layers[0].full == ConfusionCounts{1, 7, 1, 1});
    CHECK(r.layers[0].surviving == r.layers[0].full);
    // layer 2 sees rows 1..6, 8, 9
    CHECK(r.layers[1].surviving == ConfusionCounts{0, 6, 1, 1});
    CHECK(r.layers[1].full == ConfusionCounts{0, 8, 1, 1});
    // layer 5 full population: attack vs normal
    CHECK(r.layers[4].full == ConfusionCounts{3, 3, 1, 3});
    CHECK(r.known_attacks == 3);
    CHECK(r.known_detected == 2);
    CHECK(r.novel_attacks == 3);
    CHECK(r.novel_detected == 3);
    CHECK(r.categories[static_cast<std::size_t>(C::dos)][static_cast<std::size_t>(C::probe)] == 1);
    CHECK(r.categories[static_cast<std::size_t>(C::normal)][static_cast<std::size_t>(C::unknown)] == 1);
    CHECK(r.categories[static_cast<std::size_t>(C::r2l)][static_cast<std::size_t>(C::normal)] == 1);

    std::size_t sum = 0;
    for (const auto& row : r.categories)
        for (auto v : row) sum += v;
    CHECK(sum == 10);

    CHECK_THROWS(evaluate_outputs(std::span<const Outputs>{}, std::span<const C>{}, std::span<const bool>{}));
}

TEST_CASE("config defaults and validation") {
    const CascadeConfig c;
    CHECK(c.knn_k == 65);
    CHECK(c.elm.n_hidden == 400);
    CHECK(c.helm_u2r == HelmWidths{40, 40, 200});
    CHECK(c.helm_r2l == HelmWidths{10, 10, 300});
    CHECK(c.helm_unknown == HelmWidths{10, 10, 200});
    CHECK(c.helm_params(4).widths == c.helm_r2l);
    CHECK(c.layer_seed(1) != c.layer_seed(2));
    CHECK_NOTHROW(c.validate());
    CascadeConfig even = c;
    even.knn_k = 64;
    CHECK_THROWS_AS(even.validate(), ConfigError);
}

TEST_CASE("train, classify and persist a cascade") {
    const Taxonomy t = testing::shipped_taxonomy();
    const auto train = synthetic_flows(4000, 11, t);
    const auto test = synthetic_flows(1000, 12, t);
    const CascadeModel m = train_cascade(train, t, small_config());

    const PreparedSet set = prepare_set(test, m.scaler, t);
    const EvalReport r = evaluate_cascade(m, set, t);
    CHECK(r.overall.total() == test.size());
    CHECK(compute_metrics(r.overall).accuracy > 0.8);

    // flow and vector paths agree
    for (std::size_t i = 0; i < 50; ++i) {
        const auto x = transform(m.scaler, test[i]);
        const Decision a = classify_flow(m, test[i]);
        const Decision b = classify_vector(m, x);
        CHECK(a.predicted == b.predicted);
        CHECK(a.deciding_layer == b.deciding_layer);
    }

    std::stringstream first, second;
    save_model(m, first);
    save_model(m, second);
    CHECK(first.str() == second.str());

    std::istringstream in(first.str());
    const CascadeModel loaded = load_model(in);
    CHECK(evaluate_cascade(loaded, set, t) == r);
    std::stringstream resaved;
    save_model(loaded, resaved);
    CHECK(resaved.str() == first.str());
    CHECK(loaded.config.knn_k == 5);
    CHECK(loaded.taxonomy == t);

    SUBCASE("corrupt and truncated files are rejected") {
        const std::string bytes = first.str();
        for (std::size_t cut : {std::size_t{0}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
            std::istringstream trunc(bytes.substr(0, cut));
            CHECK_THROWS_AS(load_model(trunc), FormatError);
        }
        std::string flipped = bytes;
        flipped[flipped.size() - 9] ^= 0x40;
        std::istringstream bad(flipped);
        CHECK_THROWS_AS(load_model(bad), FormatError);

        std::string version = bytes;
        version.replace(version.find("version 1"), 9, "version 9");
        std::istringstream v(version);
        CHECK_THROWS_AS(load_model(v), FormatError);
    }

    SUBCASE("threaded training gives the same model") {
        CascadeConfig threaded = small_config();
        threaded.train_threads = 4;
        std::stringstream out;
        save_model(train_cascade(train, t, threaded), out);
        CHECK(out.str() == first.str());
    }
}

TEST_CASE("training preconditions") {
    const Taxonomy t = testing::shipped_taxonomy();
    auto recs = synthetic_flows(500, 3, t);
    std::erase_if(recs, [&](const FlowRecord& r) { return map_attack_category(r.raw_label, t) == Category::u2r; });
    CHECK_THROWS_AS(train_cascade(recs, t, small_config()), DataError);

    CascadeConfig even = small_config();
    even.knn_k = 4;
    CHECK_THROWS_AS(train_cascade(synthetic_flows(500, 3, t), t, even), ConfigError);
}

TEST_CASE("run config key values") {
    RunConfig cfg;
    std::istringstream in("# comment\nseed = 9\nknn.k = 7\nhelm4 = 5,6,70\nfista.lambda = 0.01\ntrain = a b.txt\n\n");
    apply_settings(cfg, parse_key_values(in));
    CHECK(cfg.cascade.seed == 9);
    CHECK(cfg.cascade.knn_k == 7);
    CHECK(cfg.cascade.helm_r2l == HelmWidths{5, 6, 70});
    CHECK(cfg.cascade.fista.l1_weight == 0.01);
    CHECK(cfg.train_path == "a b.txt");

    RunConfig copy;
    apply_settings(copy, to_key_values(cfg));
    CHECK(to_key_values(copy) == to_key_values(cfg));

    CHECK_THROWS_AS(apply_setting(cfg, "no.such.key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(cfg, "knn.k", "seven"), ConfigError);
    CHECK_THROWS_AS(apply_setting(cfg, "helm3", "1,2"), ConfigError);
    CHECK(format_widths(parse_widths("40,40,200")) == "40,40,200");
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(parse_key_values(bad), ParseError);
}
