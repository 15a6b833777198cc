#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2d/core.hpp"
#include "d2d/mwis.hpp"
#include "d2d/rng.hpp"
#include "d2d/topology.hpp"

namespace d2d {

// Per-slot activation decision.
struct Schedule {
    std::vector<std::uint8_t> active_links;
    std::int64_t slot_index = 0;

    bool isActive(int i) const { return active_links[static_cast<std::size_t>(i)] != 0; }
};

enum class SchedulerKind {
    CentralizedMaxWeight,   // message-passing MWIS on backlog*rate weights
    DistributedFlashLinQ,   // priority-ordered yielding, priority 1/(rate*backlog)
    RandomizedBaseline      // FlashLinQ yielding with random per-slot priorities
};

std::string schedulerKindName(SchedulerKind k);
SchedulerKind schedulerKindFromName(const std::string& name);

// Single-interferer rate bound in bits/s/Hz:
//   log2(1 + P*g_ii / (sigma^2 + gamma_power)).
double estimateRate(int link_index, const ChannelGains& gains, const RadioParams& radio);

// Weights w_i = backlog_i * estimateRate(i); zero-backlog links never activate.
Schedule scheduleCentralized(std::int64_t slot, const std::vector<QueueState>& queues,
                             const ChannelGains& gains, const RadioParams& radio,
                             const ConflictGraph& graph, const MwisParams& mwis_params);

// Waiting-time priority U_i = 1/(r_i * Q_i); +infinity when the product is
// zero (such a link never transmits). Smaller is higher priority.
double flashlinqPriority(int link_index, const std::vector<QueueState>& queues,
                         const ChannelGains& gains, const RadioParams& radio);

// Links join in priority order (ascending U, ties by id) unless either
// pairwise interference test against an already-active link fails. With
// randomize=true the order is a uniform random permutation instead; with
// ignore_yielding=true (randomized variant only) the interference tests are
// skipped entirely.
Schedule scheduleFlashlinq(std::int64_t slot, const std::vector<QueueState>& queues,
                           const ChannelGains& gains, const RadioParams& radio, bool randomize,
                           SimRng& rng, bool ignore_yielding = false);

}  // namespace d2d
