#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2d/core.hpp"
#include "d2d/streaming_types.hpp"

namespace d2d {

enum class PlayPhase { prebuffering, playing, stalled, finished };

std::string playPhaseName(PlayPhase p);

// One contiguous starvation interval. end_slot is -1 while the stall is open.
struct StallInterval {
    std::int64_t start_slot = 0;
    std::int64_t end_slot = -1;

    bool open() const { return end_slot < 0; }
};

// Receiver-side playout model for one link. Chunks are consumed at one chunk
// per chunk_seconds once the prebuffer target is met; a missing chunk at its
// boundary opens a stall that closes the slot the chunk completes.
struct PlaybackState {
    int link_id = 0;
    std::int64_t total_chunks = 0;        // length of the requested file
    double prebuffer_target_s = 0.0;      // PBT
    std::int64_t delivered_chunks = 0;    // contiguous fully received chunks
    std::int64_t playhead_chunk = 0;      // chunk currently being played
    PlayPhase phase = PlayPhase::prebuffering;
    std::int64_t stall_count = 0;
    std::vector<StallInterval> stall_log;
    std::int64_t played_slots = 0;        // slots of content consumed
    std::int64_t playback_start_slot = -1;

    std::int64_t prebufferTargetChunks(const TimingConfig& timing) const;
};

// Advances delivered_chunks from the drained queue bits against the FIFO
// ledger of placed chunk sizes (prefix sums, placement order).
void registerDelivery(PlaybackState& state, double drained_bits,
                      const std::vector<double>& chunk_bits_prefix);

// One slot of the playout automaton; call after registerDelivery each slot.
void advancePlayout(PlaybackState& state, std::int64_t slot_index, const TimingConfig& timing);

struct RunMetrics {
    double expected_stalls = 0.0;     // mean stall events per link
    double avg_psnr_db = 0.0;         // mean over all placed chunks, all links
    double mean_backlog_bits = 0.0;   // time and link average
    std::int64_t total_stall_events = 0;
    std::int64_t chunks_placed = 0;
    std::int64_t links_finished = 0;
};

// Aggregates stall and quality measures; mean_backlog_bits is filled by the
// caller (it is a queue-side quantity).
RunMetrics summarize(const std::vector<PlaybackState>& states,
                     const std::vector<std::vector<ChunkDecision>>& decisions);

}  // namespace d2d
