// Model file layout
//
//   FLOWIDS-MODEL
//   version 1
//   config.<key> <value>            one line per cascade setting
//   taxonomy <name> <category>[ new]
//   knn.k <k>
//   <elm>.c, <elm>.seed             per ELM: layer2, layer3.head, ...
//   <helm>.seed, <helm>.stages      per H-ELM: layer3, layer4, layer5
//   payload_bytes <n>
//   payload_fnv1a64 <16 hex digits>
//   end
//   <payload>
//
// The payload is a sequence of named matrices:
//   u32 name length | name bytes | u64 rows | u64 cols | rows*cols f64
// all little-endian, row-major.

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "flowids/cascade.hpp"
#include "flowids/config.hpp"

namespace flowids {

namespace {

constexpr std::string_view kMagic = "FLOWIDS-MODEL";

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class PayloadWriter {
public:
    void matrix(std::string_view name, const num::Matrix& m) {
        u32(static_cast<std::uint32_t>(name.size()));
        buf_.append(name);
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) u64(std::bit_cast<std::uint64_t>(m(i, j)));
    }

    void vector(std::string_view name, const num::Vector& v) {
        num::Matrix m = v;
        matrix(name, m);
    }

    void scalar(std::string_view name, double v) {
        num::Matrix m(1, 1);
        m(0, 0) = v;
        matrix(name, m);
    }

    const std::string& bytes() const { return buf_; }

private:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    std::string buf_;
};

class PayloadReader {
public:
    explicit PayloadReader(std::string_view bytes) : bytes_(bytes) {}

    num::Matrix matrix(std::string_view expected) {
        const std::uint32_t len = u32();
        const std::string_view name = take(len);
        if (name != expected)
            throw FormatError("model payload: expected block '" + std::string(expected) +
                              "', found '" + std::string(name) + "'");
        const std::uint64_t rows = u64();
        const std::uint64_t cols = u64();
        if (cols != 0 && rows > (bytes_.size() - pos_) / 8 / cols)
            throw FormatError("model payload: block '" + std::string(name) + "' overruns the file");
        num::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = std::bit_cast<double>(u64());
        return m;
    }

    num::Vector vector(std::string_view expected) {
        const num::Matrix m = matrix(expected);
        if (m.cols() != 1) throw FormatError("model payload: '" + std::string(expected) + "' is not a column");
        return m.col(0);
    }

    double scalar(std::string_view expected) {
        const num::Matrix m = matrix(expected);
        if (m.rows() != 1 || m.cols() != 1)
            throw FormatError("model payload: '" + std::string(expected) + "' is not a scalar");
        return m(0, 0);
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    std::string_view take(std::size_t n) {
        if (bytes_.size() - pos_ < n) throw FormatError("model payload truncated");
        const std::string_view out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

struct Header {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }

    const std::string& get(std::string_view key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        throw FormatError("model header: missing '" + std::string(key) + "'");
    }
};

void write_elm(PayloadWriter& p, Header& h, const std::string& prefix, const ElmModel& m) {
    h.add(prefix + ".c", format_double(m.c));
    h.add(prefix + ".seed", std::to_string(m.seed));
    p.matrix(prefix + ".weights", m.input_weights);
    p.vector(prefix + ".biases", m.biases);
    p.matrix(prefix + ".beta", m.output_weights);
}

void write_helm(PayloadWriter& p, Header& h, const std::string& prefix, const HelmModel& m) {
    h.add(prefix + ".seed", std::to_string(m.seed));
    h.add(prefix + ".stages", std::to_string(m.stages.size()));
    for (std::size_t i = 0; i < m.stages.size(); ++i) {
        const std::string s = prefix + ".stage" + std::to_string(i);
        p.matrix(s + ".decoder", m.stages[i].decoder);
        p.scalar(s + ".scale", m.stages[i].input_scale);
    }
    write_elm(p, h, prefix + ".head", m.head);
}

std::uint64_t header_u64(const Header& h, std::string_view key) {
    const std::string& v = h.get(key);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw FormatError("model header: '" + std::string(key) + "' is not an integer");
    return out;
}

ElmModel read_elm(PayloadReader& p, const Header& h, const std::string& prefix) {
    ElmModel m;
    try {
        m.c = parse_double(h.get(prefix + ".c"));
    } catch (const std::invalid_argument&) {
        throw FormatError("model header: bad " + prefix + ".c");
    }
    m.seed = header_u64(h, prefix + ".seed");
    m.input_weights = p.matrix(prefix + ".weights");
    m.biases = p.vector(prefix + ".biases");
    m.output_weights = p.matrix(prefix + ".beta");
    if (m.biases.size() != m.hidden() || m.output_weights.rows() != m.hidden() ||
        m.output_weights.cols() != 1)
        throw FormatError("model payload: inconsistent ELM block '" + prefix + "'");
    return m;
}

HelmModel read_helm(PayloadReader& p, const Header& h, const std::string& prefix) {
    HelmModel m;
    m.seed = header_u64(h, prefix + ".seed");
    const std::uint64_t stages = header_u64(h, prefix + ".stages");
    if (stages > 64) throw FormatError("model header: implausible stage count");
    Eigen::Index width = -1;
    for (std::uint64_t i = 0; i < stages; ++i) {
        const std::string s = prefix + ".stage" + std::to_string(i);
        AutoencoderStage st;
        st.decoder = p.matrix(s + ".decoder");
        st.input_scale = p.scalar(s + ".scale");
        if (width >= 0 && st.input_dim() != width)
            throw FormatError("model payload: H-ELM stage widths do not chain");
        width = st.output_dim();
        m.stages.push_back(std::move(st));
    }
    m.head = read_elm(p, h, prefix + ".head");
    if (width >= 0 && m.head.dim() != width)
        throw FormatError("model payload: H-ELM head width does not match the last stage");
    return m;
}

num::Matrix feature_row(const FeatureVector& v) {
    num::Matrix m(1, static_cast<Eigen::Index>(kFeatureDim));
    for (std::size_t i = 0; i < kFeatureDim; ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
    return m;
}

FeatureVector to_feature(const num::Matrix& m, std::string_view name) {
    if (m.rows() != 1 || m.cols() != static_cast<Eigen::Index>(kFeatureDim))
        throw FormatError("model payload: '" + std::string(name) + "' has the wrong shape");
    FeatureVector v;
    for (std::size_t i = 0; i < kFeatureDim; ++i) v[i] = m(0, static_cast<Eigen::Index>(i));
    return v;
}

}  // namespace

void save_model(const CascadeModel& model, std::ostream& out) {
    Header h;
    PayloadWriter p;
    for (auto& [k, v] : to_key_values(model.config)) h.add("config." + k, v);

    p.matrix("scaler.min", feature_row(model.scaler.min));
    p.matrix("scaler.max", feature_row(model.scaler.max));

    h.add("knn.k", std::to_string(model.dos.k));
    p.matrix("layer1.samples", model.dos.samples);
    num::Matrix targets(model.dos.samples.rows(), 1);
    for (Eigen::Index i = 0; i < targets.rows(); ++i)
        targets(i, 0) = to_target(model.dos.targets[static_cast<std::size_t>(i)]);
    p.matrix("layer1.targets", targets);

    write_elm(p, h, "layer2", model.probe);
    write_helm(p, h, "layer3", model.u2r);
    write_helm(p, h, "layer4", model.r2l);
    write_helm(p, h, "layer5", model.unknown);

    out << kMagic << '\n' << "version " << kModelFormatVersion << '\n';
    for (const auto& [k, v] : h.entries) out << k << ' ' << v << '\n';
    for (const auto& [name, e] : model.taxonomy.entries())
        out << "taxonomy " << name << ' ' << category_name(e.category) << (e.novel ? " new" : "") << '\n';
    std::ostringstream checksum;
    checksum << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(p.bytes());
    out << "payload_bytes " << p.bytes().size() << '\n'
        << "payload_fnv1a64 " << checksum.str() << '\n'
        << "end\n";
    out.write(p.bytes().data(), static_cast<std::streamsize>(p.bytes().size()));
    if (!out) throw std::runtime_error("failed writing model");
}

CascadeModel load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) throw FormatError("not a flowids model file");
    if (!std::getline(in, line)) throw FormatError("model header truncated");
    if (line != "version " + std::to_string(kModelFormatVersion))
        throw FormatError("unsupported model version: '" + line + "' (this build reads version " +
                          std::to_string(kModelFormatVersion) + ")");

    Header h;
    CascadeModel model;
    RunConfig cfg;
    for (;;) {
        if (!std::getline(in, line)) throw FormatError("model header truncated");
        if (line == "end") break;
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw FormatError("model header: malformed line '" + line + "'");
        std::string key = line.substr(0, sp);
        std::string value = line.substr(sp + 1);
        if (key == "taxonomy") {
            std::istringstream ss(value);
            std::string name, cat, flag;
            ss >> name >> cat >> flag;
            try {
                model.taxonomy.add(name, parse_category(cat), flag == "new");
            } catch (const std::invalid_argument& e) {
                throw FormatError(std::string("model header: ") + e.what());
            }
        } else if (key.starts_with("config.")) {
            try {
                apply_setting(cfg, key.substr(7), value);
            } catch (const std::exception& e) {
                throw FormatError(std::string("model header: ") + e.what());
            }
        } else {
            h.add(std::move(key), std::move(value));
        }
    }
    model.config = cfg.cascade;

    const std::uint64_t size = header_u64(h, "payload_bytes");
    std::string payload(size, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(size));
    if (static_cast<std::uint64_t>(in.gcount()) != size) throw FormatError("model payload truncated");
    std::ostringstream checksum;
    checksum << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(payload);
    if (checksum.str() != h.get("payload_fnv1a64")) throw FormatError("model payload checksum mismatch");

    PayloadReader p(payload);
    model.scaler.min = to_feature(p.matrix("scaler.min"), "scaler.min");
    model.scaler.max = to_feature(p.matrix("scaler.max"), "scaler.max");

    const num::Matrix samples = p.matrix("layer1.samples");
    const num::Matrix targets = p.matrix("layer1.targets");
    if (targets.rows() != samples.rows() || targets.cols() != 1)
        throw FormatError("model payload: kNN targets do not match samples");
    std::vector<Vote> votes;
    votes.reserve(static_cast<std::size_t>(targets.rows()));
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
        if (targets(i, 0) != 1.0 && targets(i, 0) != -1.0)
            throw FormatError("model payload: kNN target is not +-1");
        votes.push_back(targets(i, 0) > 0 ? Vote::positive : Vote::negative);
    }
    try {
        model.dos = knn_train(samples, std::move(votes), static_cast<int>(header_u64(h, "knn.k")));
    } catch (const ConfigError& e) {
        throw FormatError(std::string("model payload: ") + e.what());
    }

    model.probe = read_elm(p, h, "layer2");
    model.u2r = read_helm(p, h, "layer3");
    model.r2l = read_helm(p, h, "layer4");
    model.unknown = read_helm(p, h, "layer5");
    if (!p.done()) throw FormatError("model payload has trailing bytes");

    const Eigen::Index dim = static_cast<Eigen::Index>(kFeatureDim);
    if (model.dos.dim() != dim || model.probe.dim() != dim || model.u2r.dim() != dim ||
        model.r2l.dim() != dim || model.unknown.dim() != dim)
        throw FormatError("model payload: layer input widths disagree with the scaler");
    return model;
}

void save_model_file(const CascadeModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    save_model(model, out);
}

CascadeModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file '" + path + "'");
    return load_model(in);
}

}  // namespace flowids
