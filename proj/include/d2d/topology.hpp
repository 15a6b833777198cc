#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "d2d/core.hpp"
#include "d2d/rng.hpp"

namespace d2d {

enum class FadingKind { none, rayleigh_per_slot };

std::string fadingKindName(FadingKind k);
FadingKind fadingKindFromName(const std::string& name);

struct TopologyConfig {
    double cell_side_m = 500.0;
    int num_links = 8;
    double max_d2d_distance_m = 60.0;
    double pathloss_exponent = 3.68;
    double pathloss_ref_gain = 1.3803842646028852e-4;  // 10^-3.86, gain at 1 m
    FadingKind fading = FadingKind::none;
    std::uint64_t seed = 1;

    void validate() const;
};

// Mean pathloss gain at distance d (meters).
double pathlossGain(double ref_gain, double exponent, double d_m);

// Symmetric boolean adjacency over links; edge (j,k) marks a pair that must
// not transmit simultaneously.
class ConflictGraph {
public:
    ConflictGraph() = default;
    explicit ConflictGraph(int num_nodes)
        : n_(num_nodes), adj_(static_cast<std::size_t>(num_nodes) * num_nodes, 0) {}

    int numNodes() const { return n_; }
    bool edge(int j, int k) const { return adj_[static_cast<std::size_t>(j) * n_ + k] != 0; }
    void setEdge(int j, int k);  // symmetric; self-loops rejected
    int degree(int i) const;
    int numEdges() const;

    void validate() const;

private:
    int n_ = 0;
    std::vector<std::uint8_t> adj_;
};

// TX positions uniform in the square cell; each RX uniform in a disk around
// its TX, redrawn until inside the cell. Deterministic given cfg.seed.
// Returned gains are mean (non-faded) pathloss gains for every (tx_j, rx_i).
std::pair<LinkSet, ChannelGains> generateTopology(const TopologyConfig& cfg);

// Edge (j,k) iff either TX's received power at the other RX exceeds the
// admissible single-interferer level gamma relative to noise, on mean gains.
ConflictGraph buildConflictGraph(const LinkSet& links, const ChannelGains& gains,
                                 const RadioParams& radio);

// Per-slot gain source. With rayleigh_per_slot fading every entry gets an
// independent unit-mean exponential multiplier each slot; otherwise the mean
// gains are returned untouched.
class GainSampler {
public:
    GainSampler(const ChannelGains& mean_gains, FadingKind kind)
        : mean_(&mean_gains), kind_(kind), slot_(mean_gains) {}

    const ChannelGains& meanGains() const { return *mean_; }
    const ChannelGains& sampleSlot(SimRng& rng);

private:
    const ChannelGains* mean_;
    FadingKind kind_;
    ChannelGains slot_;
};

// Replayable topology snapshot (positions, gains, seed) as a JSON document.
std::string topologyToJson(const LinkSet& links, const ChannelGains& gains, std::uint64_t seed);
std::pair<LinkSet, ChannelGains> topologyFromJson(const std::string& json_text);

}  // namespace d2d
