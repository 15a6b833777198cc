#include "d2d/playback.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d {

std::string playPhaseName(PlayPhase p) {
    switch (p) {
        case PlayPhase::prebuffering: return "prebuffering";
        case PlayPhase::playing: return "playing";
        case PlayPhase::stalled: return "stalled";
        case PlayPhase::finished: return "finished";
    }
    throw std::logic_error("playPhaseName: bad enum");
}

std::int64_t PlaybackState::prebufferTargetChunks(const TimingConfig& timing) const {
    auto target = static_cast<std::int64_t>(std::ceil(prebuffer_target_s / timing.chunk_seconds - 1e-12));
    if (target < 1) target = 1;                       // playback always waits for the first chunk
    if (target > total_chunks) target = total_chunks; // short files: wait for everything
    return target;
}

void registerDelivery(PlaybackState& state, double drained_bits,
                      const std::vector<double>& chunk_bits_prefix) {
    const auto placed = static_cast<std::int64_t>(chunk_bits_prefix.size());
    while (state.delivered_chunks < placed &&
           drained_bits >= chunk_bits_prefix[static_cast<std::size_t>(state.delivered_chunks)] - 1e-6)
        ++state.delivered_chunks;
}

void advancePlayout(PlaybackState& state, std::int64_t slot_index, const TimingConfig& timing) {
    const std::int64_t spc = timing.slotsPerChunk();

    if (state.phase == PlayPhase::prebuffering) {
        if (state.delivered_chunks >= state.prebufferTargetChunks(timing)) {
            state.phase = PlayPhase::playing;
            state.playback_start_slot = slot_index;
        } else {
            return;
        }
    }

    if (state.phase == PlayPhase::stalled) {
        if (state.delivered_chunks > state.playhead_chunk) {
            state.stall_log.back().end_slot = slot_index;  // resume the slot the chunk completes
            state.phase = PlayPhase::playing;
        } else {
            return;
        }
    }

    if (state.phase != PlayPhase::playing) return;

    if (state.delivered_chunks <= state.playhead_chunk) {
        state.phase = PlayPhase::stalled;
        state.stall_log.push_back({slot_index, -1});
        ++state.stall_count;
        return;
    }

    ++state.played_slots;
    if (state.played_slots % spc == 0) {
        state.playhead_chunk = state.played_slots / spc;
        if (state.playhead_chunk >= state.total_chunks) state.phase = PlayPhase::finished;
    }
}

RunMetrics summarize(const std::vector<PlaybackState>& states,
                     const std::vector<std::vector<ChunkDecision>>& decisions) {
    RunMetrics m;
    if (states.empty()) return m;

    std::int64_t stall_sum = 0;
    for (const auto& s : states) {
        stall_sum += s.stall_count;
        if (s.phase == PlayPhase::finished) ++m.links_finished;
    }
    m.total_stall_events = stall_sum;
    m.expected_stalls = static_cast<double>(stall_sum) / static_cast<double>(states.size());

    double psnr_sum = 0.0;
    std::int64_t placed = 0;
    for (const auto& link_decisions : decisions)
        for (const auto& d : link_decisions) {
            psnr_sum += d.psnr_db;
            ++placed;
        }
    m.chunks_placed = placed;
    m.avg_psnr_db = placed > 0 ? psnr_sum / static_cast<double>(placed) : 0.0;
    return m;
}

}  // namespace d2d
