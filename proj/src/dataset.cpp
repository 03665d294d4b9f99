#include "flowids/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flowids {

namespace {

constexpr std::size_t kDurationCol = 0;
constexpr std::size_t kProtocolCol = 1;
constexpr std::size_t kServiceCol = 2;
constexpr std::size_t kFlagCol = 3;
constexpr std::size_t kSrcBytesCol = 4;
constexpr std::size_t kDstBytesCol = 5;
constexpr std::size_t kCountCol = 22;
constexpr std::size_t kSrvCountCol = 23;

constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "duration", "tcp", "udp", "icmp", "src_bytes", "dst_bytes", "count", "srv_count"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool is_symbolic_column(std::size_t col) {
    return col == kProtocolCol || col == kServiceCol || col == kFlagCol;
}

double numeric_field(std::string_view token, std::size_t col, std::size_t line_no) {
    try {
        return parse_double(token);
    } catch (const std::invalid_argument&) {
        throw ParseError(line_no, "field " + std::to_string(col + 1) + " is not numeric: '" +
                                      std::string(token) + "'");
    }
}

double non_negative(double v, std::string_view name, std::size_t line_no) {
    if (v < 0) throw ParseError(line_no, std::string(name) + " must be non-negative");
    return v;
}

Protocol parse_protocol(std::string_view token, std::size_t line_no) {
    const std::string p = to_lower_trimmed(token);
    if (p == "tcp") return Protocol::tcp;
    if (p == "udp") return Protocol::udp;
    if (p == "icmp") return Protocol::icmp;
    throw ParseError(line_no, "unknown protocol '" + std::string(token) + "'");
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::tcp: return "tcp";
        case Protocol::udp: return "udp";
        case Protocol::icmp: return "icmp";
    }
    return "tcp";
}

FlowRecord parse_flow_line(std::string_view line, std::size_t line_no) {
    const auto fields = split_csv(line);
    if (fields.size() < kAttributeCount || fields.size() > kAttributeCount + 2)
        throw ParseError(line_no, "expected 41, 42 or 43 fields, found " +
                                      std::to_string(fields.size()));

    FlowRecord r;
    r.attributes.reserve(kAttributeCount);
    for (std::size_t col = 0; col < kAttributeCount; ++col) {
        if (!is_symbolic_column(col)) numeric_field(fields[col], col, line_no);
        r.attributes.emplace_back(fields[col]);
    }
    r.duration = non_negative(numeric_field(fields[kDurationCol], kDurationCol, line_no),
                              "duration", line_no);
    r.protocol = parse_protocol(fields[kProtocolCol], line_no);
    r.src_bytes = non_negative(numeric_field(fields[kSrcBytesCol], kSrcBytesCol, line_no),
                               "src_bytes", line_no);
    r.dst_bytes = non_negative(numeric_field(fields[kDstBytesCol], kDstBytesCol, line_no),
                               "dst_bytes", line_no);
    r.count = non_negative(numeric_field(fields[kCountCol], kCountCol, line_no), "count", line_no);
    r.srv_count = non_negative(numeric_field(fields[kSrvCountCol], kSrvCountCol, line_no),
                               "srv_count", line_no);

    if (fields.size() > kAttributeCount) {
        r.raw_label = to_lower_trimmed(fields[kAttributeCount]);
        if (r.raw_label.empty()) throw ParseError(line_no, "empty label");
    }
    if (fields.size() == kAttributeCount + 2) {
        numeric_field(fields[kAttributeCount + 1], kAttributeCount + 1, line_no);
        r.difficulty = std::string(fields[kAttributeCount + 1]);
    }
    return r;
}

std::vector<FlowRecord> parse_nslkdd(std::istream& in, DifficultyColumn difficulty) {
    std::vector<FlowRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        FlowRecord r = parse_flow_line(line, line_no);
        const std::size_t width = kAttributeCount + 1 + (r.difficulty ? 1 : 0);
        const bool ok = r.raw_label.empty() ? false
                        : difficulty == DifficultyColumn::present ? width == kAttributeCount + 2
                        : difficulty == DifficultyColumn::absent  ? width == kAttributeCount + 1
                                                                  : true;
        if (!ok) {
            const char* expected = difficulty == DifficultyColumn::present ? "43"
                                   : difficulty == DifficultyColumn::absent ? "42"
                                                                            : "42 or 43";
            throw ParseError(line_no, std::string("expected ") + expected +
                                          " fields for a labelled record");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string format_nslkdd(const FlowRecord& r) {
    std::string out;
    for (std::size_t i = 0; i < r.attributes.size(); ++i) {
        if (i) out += ',';
        out += r.attributes[i];
    }
    if (!r.raw_label.empty()) {
        out += ',';
        out += r.raw_label;
        if (r.difficulty) {
            out += ',';
            out += *r.difficulty;
        }
    }
    return out;
}

RawFeatures extract_features(const FlowRecord& r) {
    return {r.duration, r.protocol, r.src_bytes, r.dst_bytes, r.count, r.srv_count};
}

const std::array<std::string_view, kFeatureDim>& feature_names() { return kFeatureNames; }

FeatureVector encode(const RawFeatures& f) {
    return {std::log1p(f.duration),
            f.protocol == Protocol::tcp ? 1.0 : 0.0,
            f.protocol == Protocol::udp ? 1.0 : 0.0,
            f.protocol == Protocol::icmp ? 1.0 : 0.0,
            std::log1p(f.src_bytes),
            std::log1p(f.dst_bytes),
            f.count,
            f.srv_count};
}

Scaler fit_scaler(std::span<const FlowRecord> records) {
    if (records.empty()) throw DataError("cannot fit a scaler on an empty record set");
    Scaler s;
    s.min = encode(extract_features(records.front()));
    s.max = s.min;
    for (const auto& r : records.subspan(1)) {
        const FeatureVector v = encode(extract_features(r));
        for (std::size_t i = 0; i < kFeatureDim; ++i) {
            s.min[i] = std::min(s.min[i], v[i]);
            s.max[i] = std::max(s.max[i], v[i]);
        }
    }
    return s;
}

FeatureVector transform_encoded(const Scaler& scaler, const FeatureVector& encoded) {
    FeatureVector out;
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        const double range = scaler.max[i] - scaler.min[i];
        out[i] = range > 0 ? std::clamp((encoded[i] - scaler.min[i]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
}

FeatureVector transform(const Scaler& scaler, const FlowRecord& r) {
    return transform_encoded(scaler, encode(extract_features(r)));
}

PreparedSet prepare_set(std::span<const FlowRecord> records, const Scaler& scaler,
                        const Taxonomy& taxonomy) {
    PreparedSet set;
    set.features.resize(static_cast<Eigen::Index>(records.size()), kFeatureDim);
    set.categories.reserve(records.size());
    set.attack_names.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const FeatureVector v = transform(scaler, records[i]);
        for (std::size_t j = 0; j < kFeatureDim; ++j)
            set.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
        set.categories.push_back(taxonomy.category_of(records[i].raw_label));
        set.attack_names.push_back(records[i].raw_label);
    }
    return set;
}

Category layer_target(int layer) {
    switch (layer) {
        case 1: return Category::dos;
        case 2: return Category::probe;
        case 3: return Category::u2r;
        case 4: return Category::r2l;
        case 5: return Category::unknown;
        default: throw std::out_of_range("cascade layer must be 1..5");
    }
}

Vote layer_truth(Category c, int layer) {
    if (layer == 5) return is_attack(c) ? Vote::positive : Vote::negative;
    return c == layer_target(layer) ? Vote::positive : Vote::negative;
}

LayerDataset build_layer_dataset(const PreparedSet& set, int layer) {
    layer_target(layer);
    LayerDataset ds;
    ds.layer = layer;
    ds.features = set.features;
    ds.targets.reserve(set.size());
    std::size_t positives = 0;
    for (Category c : set.categories) {
        if (c == Category::unknown) throw DataError("training labels may not be Unknown");
        ds.targets.push_back(layer_truth(c, layer));
        positives += ds.targets.back() == Vote::positive;
    }
    if (positives == 0)
        throw DataError("layer " + std::to_string(layer) + ": no records of the target class");
    if (positives == set.size())
        throw DataError("layer " + std::to_string(layer) + ": no records outside the target class");
    return ds;
}

void write_prepared_csv(std::ostream& out, const PreparedSet& set) {
    for (auto name : kFeatureNames) out << name << ',';
    out << "category,attack\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kFeatureDim); ++j)
            out << format_double(set.features(static_cast<Eigen::Index>(i), j)) << ',';
        out << category_name(set.categories[i]) << ',' << set.attack_names[i] << '\n';
    }
}

PreparedSet read_prepared_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    {
        const auto header = split_csv(line);
        if (header.size() != kFeatureDim + 2) throw ParseError(1, "unexpected header");
        for (std::size_t j = 0; j < kFeatureDim; ++j)
            if (header[j] != kFeatureNames[j]) throw ParseError(1, "unexpected header");
    }

    std::vector<FeatureVector> rows;
    PreparedSet set;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_csv(line);
        if (fields.size() != kFeatureDim + 2)
            throw ParseError(line_no, "expected " + std::to_string(kFeatureDim + 2) + " fields");
        FeatureVector v;
        for (std::size_t j = 0; j < kFeatureDim; ++j) v[j] = numeric_field(fields[j], j, line_no);
        rows.push_back(v);
        try {
            set.categories.push_back(parse_category(fields[kFeatureDim]));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        set.attack_names.emplace_back(fields[kFeatureDim + 1]);
    }
    set.features.resize(static_cast<Eigen::Index>(rows.size()), kFeatureDim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < kFeatureDim; ++j)
            set.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return set;
}

void write_scaler(std::ostream& out, const Scaler& s) {
    out << "min";
    for (double v : s.min) out << ' ' << format_double(v);
    out << "\nmax";
    for (double v : s.max) out << ' ' << format_double(v);
    out << '\n';
}

Scaler read_scaler(std::istream& in) {
    Scaler s;
    for (auto [name, target] : {std::pair{"min", &s.min}, std::pair{"max", &s.max}}) {
        std::string line;
        if (!std::getline(in, line)) throw DataError("scaler file truncated");
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key != name) throw DataError(std::string("scaler file: expected '") + name + "'");
        for (double& v : *target) {
            std::string tok;
            if (!(ss >> tok)) throw DataError("scaler file: too few values");
            v = parse_double(tok);
        }
    }
    for (std::size_t i = 0; i < kFeatureDim; ++i)
        if (s.min[i] > s.max[i]) throw DataError("scaler file: min exceeds max");
    return s;
}

std::size_t Census::total(Category c) const {
    switch (c) {
        case Category::normal: return normal;
        case Category::dos: return known[0] + novel[0];
        case Category::probe: return known[1] + novel[1];
        case Category::u2r: return known[2] + novel[2];
        case Category::r2l: return known[3] + novel[3];
        case Category::unknown: return 0;
    }
    return 0;
}

Census census(std::span<const FlowRecord> records, const Taxonomy& taxonomy) {
    Census c;
    for (const auto& r : records) {
        const Category cat = taxonomy.category_of(r.raw_label);
        if (cat == Category::normal) {
            ++c.normal;
            continue;
        }
        const auto slot = static_cast<std::size_t>(cat) - 1;
        (taxonomy.is_novel(r.raw_label) ? c.novel : c.known)[slot]++;
    }
    return c;
}

}  // namespace flowids
