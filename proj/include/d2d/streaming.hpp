#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "d2d/core.hpp"
#include "d2d/mwis.hpp"
#include "d2d/playback.hpp"
#include "d2d/rng.hpp"
#include "d2d/schedulers.hpp"
#include "d2d/streaming_types.hpp"
#include "d2d/topology.hpp"
#include "d2d/trace.hpp"

namespace d2d {

// Picks the mode maximizing psnr - alpha * bits * backlog; ties go to fewer
// bits. entries must be non-empty and sorted by bits ascending.
ChunkDecision chooseQuality(std::span<const ChunkQualityEntry> entries, double backlog_bits,
                            double alpha, int link_id = 0, std::int64_t chunk_index = 0);

// Streaming progress of one link through its trace.
struct LinkSession {
    const VideoTrace* trace = nullptr;
    std::int64_t next_chunk = 0;
    bool finished = false;                  // trace exhausted
    std::vector<double> chunk_bits_prefix;  // FIFO ledger, placement order
    std::vector<ChunkDecision> decisions;
};

// At chunk boundaries (slot % slots_per_chunk == 0) runs the quality choice
// for every unfinished link and records the placement in its ledger; returns
// per-link arrival bits (zero elsewhere). Queues are read, not written.
std::vector<double> placeChunks(std::int64_t slot_index, const TimingConfig& timing,
                                std::vector<LinkSession>& sessions,
                                const std::vector<QueueState>& queues,
                                const StreamingConfig& cfg,
                                std::vector<ChunkDecision>* out_decisions = nullptr);

// Shannon service with the actual aggregate interference over active links:
//   mu_i = slot_seconds * B * log2(1 + P*g_ii / (sigma^2 + sum_j P*g_ji)).
std::vector<double> departures(const Schedule& schedule, const ChannelGains& gains,
                               const RadioParams& radio, const TimingConfig& timing);

struct SchedulerSpec {
    SchedulerKind kind = SchedulerKind::CentralizedMaxWeight;
    MwisParams mwis;
    bool random_ignore_yielding = false;  // RandomizedBaseline only
};

struct SlotRecord {
    std::int64_t slot = 0;
    int link = 0;
    double backlog_bits = 0.0;
    double mu_bits = 0.0;
    int active = 0;
};

// Discrete-time simulation: one step is schedule -> departures -> arrivals ->
// queue update -> playout. All randomness (fading, randomized priorities)
// comes from the single per-run stream handed to the constructor.
class SimEngine {
public:
    SimEngine(LinkSet links, ChannelGains mean_gains, RadioParams radio, TimingConfig timing,
              StreamingConfig streaming, SchedulerSpec scheduler,
              std::vector<const VideoTrace*> traces_per_link, double pbt_seconds,
              FadingKind fading, std::uint64_t sim_seed);

    SimEngine(const SimEngine&) = delete;
    SimEngine& operator=(const SimEngine&) = delete;

    void step();
    void run(std::int64_t num_slots);

    std::int64_t slot() const { return slot_; }
    const LinkSet& links() const { return links_; }
    const ConflictGraph& conflictGraph() const { return graph_; }
    const std::vector<QueueState>& queues() const { return queues_; }
    const std::vector<LinkSession>& sessions() const { return sessions_; }
    const std::vector<PlaybackState>& playback() const { return playback_; }
    const Schedule& lastSchedule() const { return last_schedule_; }

    // Per-slot feasibility assertions (independence / pairwise interference),
    // counted every slot on mean gains.
    std::int64_t invariantViolations() const { return invariant_violations_; }

    // max_i |backlog - (arrivals - departures + credit)| over links.
    double conservationError() const;

    RunMetrics metrics() const;

    void enableSlotLog(std::vector<SlotRecord>* sink) { slot_log_ = sink; }

private:
    LinkSet links_;
    ChannelGains mean_gains_;
    RadioParams radio_;
    TimingConfig timing_;
    StreamingConfig streaming_;
    SchedulerSpec scheduler_;
    ConflictGraph graph_;
    GainSampler sampler_;
    SimRng rng_;
    std::vector<QueueState> queues_;
    std::vector<LinkSession> sessions_;
    std::vector<PlaybackState> playback_;
    Schedule last_schedule_;
    std::int64_t slot_ = 0;
    std::int64_t invariant_violations_ = 0;
    double backlog_slot_sum_ = 0.0;  // sum over slots of mean-over-links backlog
    std::vector<SlotRecord>* slot_log_ = nullptr;

    void checkScheduleInvariants(const Schedule& s);
};

}  // namespace d2d
