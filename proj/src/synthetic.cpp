#include "flowids/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace flowids {

namespace {

struct Draw {
    Rng& rng;

    double unit() { return rng.uniform(0.0, 1.0); }
    bool chance(double p) { return unit() < p; }
    double between(double lo, double hi) { return std::floor(rng.uniform(lo, hi + 1.0)); }
    double normal() {
        const double u1 = 1.0 - unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double lognormal(double mu, double sigma) { return std::floor(std::exp(mu + sigma * normal())); }
};

void fill(Draw& d, Category c, FlowRecord& r) {
    switch (c) {
        case Category::normal:
            r.protocol = d.chance(0.8) ? Protocol::tcp : d.chance(0.75) ? Protocol::udp : Protocol::icmp;
            r.duration = d.chance(0.85) ? 0 : d.lognormal(3.0, 2.0);
            r.src_bytes = d.lognormal(5.5, 1.2);
            r.dst_bytes = d.chance(0.3) ? 0 : d.lognormal(7.5, 1.5);
            r.count = d.between(1, 30);
            r.srv_count = std::max(1.0, r.count - d.between(0, 5));
            break;
        case Category::dos:
            if (d.chance(0.15)) {
                r.protocol = Protocol::icmp;
                r.src_bytes = d.chance(0.8) ? 1032 : 520;
                r.count = d.between(200, 511);
                r.srv_count = r.count;
            } else {
                r.protocol = Protocol::tcp;
                r.src_bytes = d.chance(0.9) ? 0 : d.lognormal(6.0, 2.0);
                r.count = d.between(50, 511);
                r.srv_count = d.between(1, 40);
            }
            r.duration = 0;
            r.dst_bytes = d.chance(0.95) ? 0 : d.lognormal(8.0, 1.0);
            break;
        case Category::probe:
            r.protocol = d.chance(0.55) ? Protocol::tcp : d.chance(0.7) ? Protocol::icmp : Protocol::udp;
            r.duration = d.chance(0.9) ? 0 : d.lognormal(4.0, 2.0);
            r.src_bytes = d.chance(0.7) ? 0 : d.between(1, 40);
            r.dst_bytes = d.chance(0.9) ? 0 : d.between(1, 300);
            r.count = d.chance(0.6) ? d.between(1, 4) : d.between(100, 511);
            r.srv_count = d.between(1, 3);
            break;
        case Category::u2r:
            r.protocol = Protocol::tcp;
            r.duration = d.lognormal(4.0, 1.0);
            r.src_bytes = d.lognormal(7.0, 1.0);
            r.dst_bytes = d.lognormal(8.5, 1.0);
            r.count = d.between(1, 3);
            r.srv_count = d.between(1, 3);
            break;
        case Category::r2l:
            r.protocol = d.chance(0.95) ? Protocol::tcp : Protocol::udp;
            r.duration = d.chance(0.6) ? d.between(0, 5) : d.lognormal(2.5, 1.0);
            r.src_bytes = d.chance(0.5) ? d.between(100, 140) : d.lognormal(6.0, 1.5);
            r.dst_bytes = d.chance(0.4) ? 0 : d.lognormal(5.5, 1.5);
            r.count = d.between(1, 6);
            r.srv_count = d.between(1, 6);
            break;
        case Category::unknown:
            break;
    }
}

std::string integer_token(double v) {
    return std::to_string(static_cast<long long>(v));
}

}  // namespace

std::vector<FlowRecord> synthetic_flows(std::size_t n, std::uint64_t seed, const Taxonomy& taxonomy,
                                        const SyntheticMix& mix) {
    std::array<std::vector<std::string>, 6> names;
    for (const auto& [name, e] : taxonomy.entries())
        if (!e.novel) names[static_cast<std::size_t>(e.category)].push_back(name);
    names[0] = {"normal"};
    for (std::size_t c = 1; c < 5; ++c)
        if (names[c].empty())
            throw DataError("taxonomy has no training attacks for " +
                            std::string(category_name(static_cast<Category>(c))));

    const double weights[] = {mix.normal, mix.dos, mix.probe, mix.u2r, mix.r2l};
    double total = 0;
    for (double w : weights) total += w;

    Rng rng(seed);
    Draw d{rng};
    std::vector<FlowRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pick = d.unit() * total;
        std::size_t c = 0;
        while (c < 4 && pick >= weights[c]) pick -= weights[c++];
        const auto cat = static_cast<Category>(c);

        FlowRecord r;
        fill(d, cat, r);
        const auto& pool = names[c];
        r.raw_label = pool[static_cast<std::size_t>(d.unit() * static_cast<double>(pool.size())) % pool.size()];
        r.difficulty = integer_token(d.between(1, 21));

        r.attributes.assign(kAttributeCount, "0");
        r.attributes[0] = integer_token(r.duration);
        r.attributes[1] = std::string(protocol_name(r.protocol));
        r.attributes[2] = r.protocol == Protocol::icmp ? "ecr_i" : r.protocol == Protocol::udp ? "domain_u" : "http";
        r.attributes[3] = cat == Category::dos && r.protocol == Protocol::tcp ? "S0" : "SF";
        r.attributes[4] = integer_token(r.src_bytes);
        r.attributes[5] = integer_token(r.dst_bytes);
        r.attributes[22] = integer_token(r.count);
        r.attributes[23] = integer_token(r.srv_count);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace flowids
