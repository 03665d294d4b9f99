#include "flowids/report.hpp"

#include <cstdio>
#include <iomanip>

#include "json.hpp"

namespace flowids {

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

namespace {

std::string ratio_text(std::size_t num, std::size_t den) {
    return percent(den ? static_cast<double>(num) / static_cast<double>(den) : 0.0) + "% (" +
           std::to_string(num) + "/" + std::to_string(den) + ")";
}

nlohmann::ordered_json counts_json(const ConfusionCounts& c) {
    const MetricSet m = compute_metrics(c);
    return {{"tp", c.tp},
            {"tn", c.tn},
            {"fp", c.fp},
            {"fn", c.fn},
            {"accuracy", m.accuracy},
            {"far", m.far},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1}};
}

}  // namespace

void render_text(std::ostream& out, const EvalReport& r, const KeyValues& config) {
    out << "Per-layer results on " << r.size << " test flows\n";
    out << std::left << std::setw(12) << "Layer" << std::setw(20) << "Classifier" << std::setw(11)
        << "Detected" << std::right << std::setw(10) << "Acc(%)" << std::setw(9) << "FAR(%)"
        << std::setw(14) << "Surv.Acc(%)" << std::setw(12) << "Surv.FAR(%)" << std::setw(10) << "Surv.n"
        << '\n';
    for (const auto& l : r.layers) {
        const MetricSet full = compute_metrics(l.full);
        const MetricSet surv = compute_metrics(l.surviving);
        out << std::left << std::setw(12) << l.layer << std::setw(20) << l.classifier << std::setw(11)
            << category_name(l.target) << std::right << std::setw(10) << percent(full.accuracy)
            << std::setw(9) << percent(full.far) << std::setw(14) << percent(surv.accuracy)
            << std::setw(12) << percent(surv.far) << std::setw(10) << l.surviving.total() << '\n';
    }
    const MetricSet all = compute_metrics(r.overall);
    out << std::left << std::setw(12) << "All layers" << std::setw(20) << "kNN + ELM + H-ELM"
        << std::setw(11) << "All types" << std::right << std::setw(10) << percent(all.accuracy)
        << std::setw(9) << percent(all.far) << '\n';
    out << "(Acc/FAR: layer scored one-vs-all on every test flow; Surv.*: only flows that\n"
           " reached the layer because all earlier layers voted Other.)\n\n";

    out << std::left << std::setw(16) << "Method" << std::right << std::setw(10) << "Accuracy"
        << std::setw(8) << "FAR" << std::setw(11) << "Precision" << std::setw(8) << "Recall"
        << std::setw(8) << "F1" << '\n';
    out << std::left << std::setw(16) << "Cascade" << std::right << std::setw(10)
        << percent(all.accuracy) << std::setw(8) << percent(all.far) << std::setw(11)
        << percent(all.precision) << std::setw(8) << percent(all.recall) << std::setw(8)
        << percent(all.f1) << "\n\n";

    out << "Detection rate, known attacks: " << ratio_text(r.known_detected, r.known_attacks) << '\n';
    out << "Detection rate, new attacks:   " << ratio_text(r.novel_detected, r.novel_attacks) << "\n\n";

    out << "Truth \\ predicted";
    for (int p = 0; p < 6; ++p) out << std::setw(9) << category_name(static_cast<Category>(p));
    out << '\n';
    for (int t = 0; t < 5; ++t) {
        out << std::left << std::setw(17) << category_name(static_cast<Category>(t)) << std::right;
        for (int p = 0; p < 6; ++p)
            out << std::setw(9) << r.categories[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
        out << '\n';
    }

    out << "\nConfiguration\n";
    for (const auto& [k, v] : config) out << "  " << k << " = " << v << '\n';
}

void render_json(std::ostream& out, const EvalReport& r, const KeyValues& config) {
    nlohmann::ordered_json j;
    j["test_flows"] = r.size;
    j["overall"] = counts_json(r.overall);
    auto& layers = j["layers"] = nlohmann::ordered_json::array();
    for (const auto& l : r.layers) {
        layers.push_back({{"layer", l.layer},
                          {"classifier", l.classifier},
                          {"detects", category_name(l.target)},
                          {"full_population", counts_json(l.full)},
                          {"surviving_population", counts_json(l.surviving)}});
    }
    j["known_attacks"] = {{"total", r.known_attacks}, {"detected", r.known_detected}};
    j["new_attacks"] = {{"total", r.novel_attacks}, {"detected", r.novel_detected}};
    auto& matrix = j["category_matrix"];
    for (int t = 0; t < 5; ++t) {
        auto& row = matrix[std::string(category_name(static_cast<Category>(t)))];
        for (int p = 0; p < 6; ++p)
            row[std::string(category_name(static_cast<Category>(p)))] =
                r.categories[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    }
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    out << j.dump(2) << '\n';
}

void render_csv(std::ostream& out, const EvalReport& r) {
    out << "scope,layer,population,tp,tn,fp,fn,accuracy,far,precision,recall,f1\n";
    auto row = [&](std::string_view scope, const std::string& layer, std::string_view pop,
                   const ConfusionCounts& c) {
        const MetricSet m = compute_metrics(c);
        out << scope << ',' << layer << ',' << pop << ',' << c.tp << ',' << c.tn << ',' << c.fp << ','
            << c.fn << ',' << percent(m.accuracy) << ',' << percent(m.far) << ','
            << percent(m.precision) << ',' << percent(m.recall) << ',' << percent(m.f1) << '\n';
    };
    for (const auto& l : r.layers) {
        row(category_name(l.target), std::to_string(l.layer), "full", l.full);
        row(category_name(l.target), std::to_string(l.layer), "surviving", l.surviving);
    }
    row("overall", "all", "full", r.overall);
}

void render_census(std::ostream& out, const Census& c) {
    out << std::left << std::setw(16) << "" << std::right;
    for (auto name : {"DoS", "R2L", "U2R", "Probe"}) out << std::setw(8) << name;
    out << '\n';
    // Columns: DoS, R2L, U2R, Probe.
    constexpr std::size_t order[] = {0, 3, 2, 1};
    auto line = [&](const char* label, const std::array<std::size_t, 4>& v) {
        out << std::left << std::setw(16) << label << std::right;
        for (std::size_t i : order) out << std::setw(8) << v[i];
        out << '\n';
    };
    line("Known attacks", c.known);
    line("New attacks", c.novel);
    std::array<std::size_t, 4> total{};
    for (std::size_t i = 0; i < 4; ++i) total[i] = c.known[i] + c.novel[i];
    line("Total", total);
    out << "Normal records: " << c.normal << '\n';
}

}  // namespace flowids
