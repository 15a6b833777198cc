#include "d2d/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace d2d {

std::string schedulerKindName(SchedulerKind k) {
    switch (k) {
        case SchedulerKind::CentralizedMaxWeight: return "max-weight";
        case SchedulerKind::DistributedFlashLinQ: return "flashlinq";
        case SchedulerKind::RandomizedBaseline: return "random";
    }
    throw std::logic_error("schedulerKindName: bad enum");
}

SchedulerKind schedulerKindFromName(const std::string& name) {
    if (name == "max-weight") return SchedulerKind::CentralizedMaxWeight;
    if (name == "flashlinq") return SchedulerKind::DistributedFlashLinQ;
    if (name == "random") return SchedulerKind::RandomizedBaseline;
    throw std::invalid_argument("unknown scheduler kind: " + name);
}

double estimateRate(int link_index, const ChannelGains& gains, const RadioParams& radio) {
    double signal = radio.tx_power_w * gains.at(link_index, link_index);
    double denom = radio.noise_power_w + radio.gammaPowerW();
    return std::log2(1.0 + signal / denom);
}

Schedule scheduleCentralized(std::int64_t slot, const std::vector<QueueState>& queues,
                             const ChannelGains& gains, const RadioParams& radio,
                             const ConflictGraph& graph, const MwisParams& mwis_params) {
    const int n = graph.numNodes();
    if (static_cast<int>(queues.size()) != n || gains.size() != n)
        throw std::invalid_argument("scheduleCentralized: dimension mismatch");

    MwisProblem problem;
    problem.graph = graph;
    problem.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        problem.weights[i] = queues[i].backlog_bits * estimateRate(i, gains, radio);

    MwisSolution sol = solveMessagePassing(problem, mwis_params);

    Schedule s;
    s.active_links = std::move(sol.selected);
    s.slot_index = slot;
    return s;
}

double flashlinqPriority(int link_index, const std::vector<QueueState>& queues,
                         const ChannelGains& gains, const RadioParams& radio) {
    double product = estimateRate(link_index, gains, radio) * queues[link_index].backlog_bits;
    if (!(product > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / product;
}

Schedule scheduleFlashlinq(std::int64_t slot, const std::vector<QueueState>& queues,
                           const ChannelGains& gains, const RadioParams& radio, bool randomize,
                           SimRng& rng, bool ignore_yielding) {
    const int n = gains.size();
    if (static_cast<int>(queues.size()) != n)
        throw std::invalid_argument("scheduleFlashlinq: dimension mismatch");

    // Idle links (infinite U) never contend, in the randomized variant too.
    std::vector<int> contenders;
    std::vector<double> priority(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        priority[i] = flashlinqPriority(i, queues, gains, radio);
        if (std::isfinite(priority[i])) contenders.push_back(i);
    }

    if (randomize) {
        rng.shuffle(contenders);
    } else {
        std::stable_sort(contenders.begin(), contenders.end(),
                         [&](int a, int b) { return priority[a] < priority[b]; });
    }

    const double limit = radio.gammaPowerW();
    Schedule s;
    s.active_links.assign(static_cast<std::size_t>(n), 0);
    s.slot_index = slot;
    std::vector<int> active;
    for (int cand : contenders) {
        bool yields = false;
        if (!ignore_yielding) {
            for (int a : active) {
                if (radio.tx_power_w * gains.at(cand, a) > limit ||   // candidate TX at active RX
                    radio.tx_power_w * gains.at(a, cand) > limit) {   // active TX at candidate RX
                    yields = true;
                    break;
                }
            }
        }
        if (!yields) {
            active.push_back(cand);
            s.active_links[static_cast<std::size_t>(cand)] = 1;
        }
    }
    return s;
}

}  // namespace d2d
