#pragma once

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowids/core.hpp"
#include "flowids/numkernels.hpp"
#include "flowids/taxonomy.hpp"

namespace flowids {

enum class Protocol : std::uint8_t { tcp, udp, icmp };

std::string_view protocol_name(Protocol p);

/// Number of connection attributes in an NSL-KDD row, label excluded.
inline constexpr std::size_t kAttributeCount = 41;

/// One NSL-KDD connection record. The six selected flow features are parsed
/// into typed fields; every attribute token is also kept verbatim so the
/// record can be written back unchanged.
struct FlowRecord {
    double duration = 0;   // column 1
    Protocol protocol = Protocol::tcp;  // column 2
    double src_bytes = 0;  // column 5
    double dst_bytes = 0;  // column 6
    double count = 0;      // column 23
    double srv_count = 0;  // column 24
    std::string raw_label;  // lower-cased; empty for unlabeled stream records
    std::optional<std::string> difficulty;
    std::vector<std::string> attributes;  // kAttributeCount raw tokens

    bool operator==(const FlowRecord&) const = default;
};

enum class DifficultyColumn { absent, present, detect };

/// Parse an NSL-KDD CSV stream (no header). Blank lines are skipped.
/// Throws ParseError naming the offending line.
std::vector<FlowRecord> parse_nslkdd(std::istream& in, DifficultyColumn difficulty);

/// Parse a single row. Accepts 41 fields (unlabeled stream record), 42 (with
/// label) or 43 (label + difficulty).
FlowRecord parse_flow_line(std::string_view line, std::size_t line_no);

/// Inverse of parse_flow_line.
std::string format_nslkdd(const FlowRecord& r);

struct RawFeatures {
    double duration;
    Protocol protocol;
    double src_bytes;
    double dst_bytes;
    double count;
    double srv_count;

    bool operator==(const RawFeatures&) const = default;
};

RawFeatures extract_features(const FlowRecord& r);

inline constexpr std::size_t kFeatureDim = 8;
using FeatureVector = std::array<double, kFeatureDim>;

/// Column names of the encoded vector, in order.
const std::array<std::string_view, kFeatureDim>& feature_names();

/// Log/one-hot encoding prior to scaling:
/// (log1p duration, tcp, udp, icmp, log1p src_bytes, log1p dst_bytes, count, srv_count).
FeatureVector encode(const RawFeatures& f);

struct Scaler {
    FeatureVector min{};
    FeatureVector max{};

    bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(std::span<const FlowRecord> records);

/// Encode, min-max scale and clamp to [0,1]. Components whose fitted range is
/// empty map to 0.
FeatureVector transform(const Scaler& scaler, const FlowRecord& r);
FeatureVector transform_encoded(const Scaler& scaler, const FeatureVector& encoded);

/// Scaled features plus ground truth for a record set.
struct PreparedSet {
    num::Matrix features;  // n x kFeatureDim
    std::vector<Category> categories;
    std::vector<std::string> attack_names;

    std::size_t size() const { return categories.size(); }
};

PreparedSet prepare_set(std::span<const FlowRecord> records, const Scaler& scaler,
                        const Taxonomy& taxonomy);

/// Target category of cascade layers 1-4; layer 5 separates any attack from Normal.
Category layer_target(int layer);

struct LayerDataset {
    int layer = 0;
    num::Matrix features;
    std::vector<Vote> targets;
};

/// One-vs-all training set for `layer` (1..5) over the full prepared set.
LayerDataset build_layer_dataset(const PreparedSet& set, int layer);

/// Truth vote of a record for `layer`.
Vote layer_truth(Category c, int layer);

/// Prepared-set cache file: header of feature names, then category and attack
/// name columns. Values are written in shortest round-trip form.
void write_prepared_csv(std::ostream& out, const PreparedSet& set);
PreparedSet read_prepared_csv(std::istream& in);

void write_scaler(std::ostream& out, const Scaler& s);
Scaler read_scaler(std::istream& in);

/// Attack records by category, split into training-known and test-only names.
struct Census {
    std::size_t normal = 0;
    std::array<std::size_t, 4> known{};  // DoS, Probe, U2R, R2L
    std::array<std::size_t, 4> novel{};

    std::size_t total(Category c) const;
};

Census census(std::span<const FlowRecord> records, const Taxonomy& taxonomy);

}  // namespace flowids
