#include "d2d/topology.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace d2d {

std::string fadingKindName(FadingKind k) {
    switch (k) {
        case FadingKind::none: return "none";
        case FadingKind::rayleigh_per_slot: return "rayleigh_per_slot";
    }
    throw std::logic_error("fadingKindName: bad enum");
}

FadingKind fadingKindFromName(const std::string& name) {
    if (name == "none") return FadingKind::none;
    if (name == "rayleigh_per_slot") return FadingKind::rayleigh_per_slot;
    throw std::invalid_argument("unknown fading kind: " + name);
}

void TopologyConfig::validate() const {
    if (num_links < 1) throw std::invalid_argument("TopologyConfig: num_links must be >= 1");
    if (!(cell_side_m > 0.0)) throw std::invalid_argument("TopologyConfig: cell_side_m must be > 0");
    if (!(max_d2d_distance_m > 0.0) || max_d2d_distance_m >= cell_side_m)
        throw std::invalid_argument("TopologyConfig: max_d2d_distance_m must be in (0, cell_side_m)");
    if (!(pathloss_exponent > 0.0))
        throw std::invalid_argument("TopologyConfig: pathloss_exponent must be > 0");
    if (!(pathloss_ref_gain > 0.0))
        throw std::invalid_argument("TopologyConfig: pathloss_ref_gain must be > 0");
}

double pathlossGain(double ref_gain, double exponent, double d_m) {
    return ref_gain * std::pow(d_m, -exponent);
}

void ConflictGraph::setEdge(int j, int k) {
    if (j == k) throw std::invalid_argument("ConflictGraph: self-loop rejected");
    adj_[static_cast<std::size_t>(j) * n_ + k] = 1;
    adj_[static_cast<std::size_t>(k) * n_ + j] = 1;
}

int ConflictGraph::degree(int i) const {
    int d = 0;
    for (int k = 0; k < n_; ++k) d += edge(i, k) ? 1 : 0;
    return d;
}

int ConflictGraph::numEdges() const {
    int m = 0;
    for (int j = 0; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k) m += edge(j, k) ? 1 : 0;
    return m;
}

void ConflictGraph::validate() const {
    for (int j = 0; j < n_; ++j) {
        if (edge(j, j)) throw std::invalid_argument("ConflictGraph: self-loop at " + std::to_string(j));
        for (int k = 0; k < n_; ++k)
            if (edge(j, k) != edge(k, j))
                throw std::invalid_argument("ConflictGraph: asymmetric entry (" + std::to_string(j) +
                                            "," + std::to_string(k) + ")");
    }
}

std::pair<LinkSet, ChannelGains> generateTopology(const TopologyConfig& cfg) {
    cfg.validate();
    SimRng rng(cfg.seed);

    constexpr int kMaxAttempts = 10000;

    LinkSet links;
    links.links.reserve(static_cast<std::size_t>(cfg.num_links));
    for (int i = 0; i < cfg.num_links; ++i) {
        Link l;
        l.id = i;
        l.tx_position = {rng.uniform(0.0, cfg.cell_side_m), rng.uniform(0.0, cfg.cell_side_m)};

        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            double r = cfg.max_d2d_distance_m * std::sqrt(rng.uniform01());
            double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            Vec2 rx{l.tx_position.x + r * std::cos(theta), l.tx_position.y + r * std::sin(theta)};
            if (rx.x < 0.0 || rx.x > cfg.cell_side_m || rx.y < 0.0 || rx.y > cfg.cell_side_m)
                continue;
            if (!(distance(l.tx_position, rx) > 0.0)) continue;
            l.rx_position = rx;
            placed = true;
            break;
        }
        if (!placed)
            throw std::runtime_error("generateTopology: could not place RX for link " +
                                     std::to_string(i) + " (infeasible config)");
        links.links.push_back(l);
    }
    links.validate();

    ChannelGains gains(cfg.num_links);
    for (int j = 0; j < cfg.num_links; ++j)
        for (int i = 0; i < cfg.num_links; ++i) {
            double d = distance(links[j].tx_position, links[i].rx_position);
            gains.set(j, i, pathlossGain(cfg.pathloss_ref_gain, cfg.pathloss_exponent, d));
        }
    gains.validate();
    return {std::move(links), std::move(gains)};
}

ConflictGraph buildConflictGraph(const LinkSet& links, const ChannelGains& gains,
                                 const RadioParams& radio) {
    if (gains.size() != links.size())
        throw std::invalid_argument("buildConflictGraph: gains dimension does not match links");
    radio.validate();

    const int n = links.size();
    const double limit = radio.gammaPowerW();
    ConflictGraph g(n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            double jk = radio.tx_power_w * gains.at(j, k);  // TX j at RX k
            double kj = radio.tx_power_w * gains.at(k, j);
            if (jk > limit || kj > limit) g.setEdge(j, k);
        }
    return g;
}

const ChannelGains& GainSampler::sampleSlot(SimRng& rng) {
    if (kind_ == FadingKind::none) return *mean_;
    const int n = mean_->size();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            slot_.set(j, i, mean_->at(j, i) * rng.exponential(1.0));
    return slot_;
}

std::string topologyToJson(const LinkSet& links, const ChannelGains& gains, std::uint64_t seed) {
    nlohmann::json doc;
    doc["seed"] = seed;
    auto& jlinks = doc["links"] = nlohmann::json::array();
    for (const Link& l : links.links) {
        jlinks.push_back({{"id", l.id},
                          {"tx", {l.tx_position.x, l.tx_position.y}},
                          {"rx", {l.rx_position.x, l.rx_position.y}},
                          {"file_id", l.file_id}});
    }
    auto& jg = doc["gains"] = nlohmann::json::array();
    for (int j = 0; j < gains.size(); ++j) {
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < gains.size(); ++i) row.push_back(gains.at(j, i));
        jg.push_back(std::move(row));
    }
    return doc.dump(2);
}

std::pair<LinkSet, ChannelGains> topologyFromJson(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text);
    LinkSet links;
    for (const auto& jl : doc.at("links")) {
        Link l;
        l.id = jl.at("id").get<int>();
        l.tx_position = {jl.at("tx").at(0).get<double>(), jl.at("tx").at(1).get<double>()};
        l.rx_position = {jl.at("rx").at(0).get<double>(), jl.at("rx").at(1).get<double>()};
        l.file_id = jl.at("file_id").get<int>();
        links.links.push_back(l);
    }
    links.validate();

    const int n = links.size();
    const auto& jg = doc.at("gains");
    if (static_cast<int>(jg.size()) != n)
        throw std::invalid_argument("topologyFromJson: gains dimension does not match links");
    ChannelGains gains(n);
    for (int j = 0; j < n; ++j) {
        if (static_cast<int>(jg.at(j).size()) != n)
            throw std::invalid_argument("topologyFromJson: gains row " + std::to_string(j) +
                                        " has wrong length");
        for (int i = 0; i < n; ++i) gains.set(j, i, jg.at(j).at(i).get<double>());
    }
    gains.validate();
    return {std::move(links), std::move(gains)};
}

}  // namespace d2d
