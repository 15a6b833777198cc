#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "d2d/playback.hpp"
#include "d2d/rng.hpp"

using namespace d2d;

namespace {

TimingConfig fastTiming() {
    TimingConfig t;
    t.slot_seconds = 0.25;
    t.chunk_seconds = 0.5;  // 2 slots per chunk
    return t;
}

PlaybackState makeState(std::int64_t total_chunks, double pbt_s) {
    PlaybackState st;
    st.total_chunks = total_chunks;
    st.prebuffer_target_s = pbt_s;
    return st;
}

std::vector<double> prefixSums(const std::vector<double>& sizes) {
    std::vector<double> prefix;
    double acc = 0.0;
    for (double s : sizes) {
        acc += s;
        prefix.push_back(acc);
    }
    return prefix;
}

void checkStallLog(const PlaybackState& st) {
    CHECK(st.stall_count == static_cast<std::int64_t>(st.stall_log.size()));
    for (std::size_t k = 0; k < st.stall_log.size(); ++k) {
        const auto& iv = st.stall_log[k];
        if (iv.open())
            CHECK(k + 1 == st.stall_log.size());  // only the last interval may be open
        else
            CHECK(iv.end_slot >= iv.start_slot);
        if (k > 0) {
            CHECK_FALSE(st.stall_log[k - 1].open());
            CHECK(iv.start_slot > st.stall_log[k - 1].end_slot);
        }
    }
}

}  // namespace

TEST_CASE("phase names") {
    CHECK(playPhaseName(PlayPhase::prebuffering) == "prebuffering");
    CHECK(playPhaseName(PlayPhase::playing) == "playing");
    CHECK(playPhaseName(PlayPhase::stalled) == "stalled");
    CHECK(playPhaseName(PlayPhase::finished) == "finished");
}

TEST_CASE("prebuffer target in chunks") {
    TimingConfig t = fastTiming();
    PlaybackState st = makeState(100, 0.0);
    CHECK(st.prebufferTargetChunks(t) == 1);  // never starts on an empty buffer
    st.prebuffer_target_s = 0.5;
    CHECK(st.prebufferTargetChunks(t) == 1);
    st.prebuffer_target_s = 1.0;
    CHECK(st.prebufferTargetChunks(t) == 2);
    st.prebuffer_target_s = 1.2;
    CHECK(st.prebufferTargetChunks(t) == 3);
    st.prebuffer_target_s = 8.0;
    CHECK(st.prebufferTargetChunks(t) == 16);
    st.total_chunks = 5;  // short file: cannot wait for more than exists
    CHECK(st.prebufferTargetChunks(t) == 5);
}

TEST_CASE("delivery against the FIFO ledger") {
    PlaybackState st = makeState(2, 0.0);
    std::vector<double> prefix = prefixSums({100.0, 200.0});

    registerDelivery(st, 0.0, prefix);
    CHECK(st.delivered_chunks == 0);
    registerDelivery(st, 150.0, prefix);
    CHECK(st.delivered_chunks == 1);
    registerDelivery(st, 150.0, prefix);  // idempotent
    CHECK(st.delivered_chunks == 1);
    registerDelivery(st, 300.0, prefix);
    CHECK(st.delivered_chunks == 2);

    PlaybackState st2 = makeState(2, 0.0);
    registerDelivery(st2, 299.9999995, prefix);  // within the rounding slack
    CHECK(st2.delivered_chunks == 2);

    PlaybackState st3 = makeState(2, 0.0);
    registerDelivery(st3, 99.9, prefix);
    CHECK(st3.delivered_chunks == 0);
}

TEST_CASE("smooth playout with a mid-file rebuffer") {
    TimingConfig t = fastTiming();
    PlaybackState st = makeState(2, 0.0);
    std::vector<double> prefix = prefixSums({100.0, 100.0});

    registerDelivery(st, 100.0, prefix);  // chunk 0 arrives before slot 0
    advancePlayout(st, 0, t);
    CHECK(st.phase == PlayPhase::playing);
    CHECK(st.playback_start_slot == 0);
    CHECK(st.played_slots == 1);

    advancePlayout(st, 1, t);
    CHECK(st.playhead_chunk == 1);
    CHECK(st.phase == PlayPhase::playing);

    advancePlayout(st, 2, t);  // chunk 1 still missing at its boundary
    CHECK(st.phase == PlayPhase::stalled);
    CHECK(st.stall_count == 1);
    CHECK(st.stall_log.back().start_slot == 2);
    CHECK(st.stall_log.back().open());

    advancePlayout(st, 3, t);  // still starving
    CHECK(st.stall_count == 1);
    CHECK(st.played_slots == 2);

    registerDelivery(st, 200.0, prefix);  // chunk 1 completes during slot 4
    advancePlayout(st, 4, t);
    CHECK(st.phase == PlayPhase::playing);
    CHECK(st.stall_log.back().end_slot == 4);
    CHECK(st.played_slots == 3);

    advancePlayout(st, 5, t);
    CHECK(st.phase == PlayPhase::finished);
    CHECK(st.playhead_chunk == 2);
    CHECK(st.stall_count == 1);
    checkStallLog(st);

    for (std::int64_t s = 6; s < 12; ++s) advancePlayout(st, s, t);  // no further change
    CHECK(st.phase == PlayPhase::finished);
    CHECK(st.stall_count == 1);
    CHECK(st.played_slots == 4);
}

TEST_CASE("prebuffering holds playback until the target") {
    TimingConfig t = fastTiming();
    PlaybackState st = makeState(4, 1.0);  // two chunks of prebuffer
    std::vector<double> prefix = prefixSums({10.0, 10.0, 10.0, 10.0});

    registerDelivery(st, 10.0, prefix);  // one chunk is not enough
    advancePlayout(st, 0, t);
    CHECK(st.phase == PlayPhase::prebuffering);
    CHECK(st.played_slots == 0);
    advancePlayout(st, 1, t);
    CHECK(st.phase == PlayPhase::prebuffering);

    registerDelivery(st, 20.0, prefix);
    advancePlayout(st, 2, t);
    CHECK(st.phase == PlayPhase::playing);
    CHECK(st.playback_start_slot == 2);
    CHECK(st.played_slots == 1);
    CHECK(st.stall_count == 0);
}

TEST_CASE("delivery halted for good leaves one open stall") {
    TimingConfig t = fastTiming();
    PlaybackState st = makeState(3, 0.0);
    std::vector<double> prefix = prefixSums({10.0, 10.0, 10.0});

    registerDelivery(st, 10.0, prefix);
    for (std::int64_t s = 0; s < 40; ++s) advancePlayout(st, s, t);
    CHECK(st.phase == PlayPhase::stalled);
    CHECK(st.stall_count == 1);
    CHECK(st.stall_log.size() == 1);
    CHECK(st.stall_log[0].start_slot == 2);
    CHECK(st.stall_log[0].open());
    CHECK(st.playhead_chunk == 1);
    checkStallLog(st);
}

TEST_CASE("everything delivered up front never stalls") {
    TimingConfig t = fastTiming();
    PlaybackState st = makeState(10, 1.5);
    std::vector<double> prefix = prefixSums(std::vector<double>(10, 5.0));

    registerDelivery(st, 50.0, prefix);
    for (std::int64_t s = 0; s < 40; ++s) {
        advancePlayout(st, s, t);
        CHECK(st.playhead_chunk <= st.delivered_chunks);
    }
    CHECK(st.phase == PlayPhase::finished);
    CHECK(st.stall_count == 0);
    CHECK(st.playback_start_slot == 0);
}

TEST_CASE("randomized trajectories keep every invariant") {
    TimingConfig t = fastTiming();
    SimRng rng(2024);

    for (int trial = 0; trial < 60; ++trial) {
        auto total = static_cast<std::int64_t>(3 + rng.uniformInt(28));
        std::vector<double> sizes;
        for (std::int64_t c = 0; c < total; ++c) sizes.push_back(rng.uniform(50.0, 500.0));
        std::vector<double> prefix = prefixSums(sizes);

        PlaybackState st = makeState(total, rng.uniform(0.0, 3.0));
        double drained = 0.0;
        double mean_step = rng.uniform(20.0, 300.0);
        std::int64_t horizon = total * t.slotsPerChunk() * 20 + 50;

        for (std::int64_t s = 0; s < horizon; ++s) {
            if (rng.uniform01() < 0.7) drained += rng.exponential(mean_step);
            registerDelivery(st, drained, prefix);
            std::int64_t before = st.delivered_chunks;
            advancePlayout(st, s, t);
            CHECK(st.delivered_chunks == before);          // playout never touches delivery
            REQUIRE(st.playhead_chunk <= st.delivered_chunks);
            REQUIRE(st.delivered_chunks <= total);
            if (st.phase == PlayPhase::finished) break;
        }
        checkStallLog(st);
        if (st.phase == PlayPhase::finished) CHECK(st.playhead_chunk >= st.total_chunks);
    }
}

TEST_CASE("raising the prebuffer target never adds stalls on a fixed trajectory") {
    TimingConfig t = fastTiming();
    const double pbt_grid[] = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};

    for (int trial = 0; trial < 50; ++trial) {
        SimRng traj(900 + trial);
        auto total = static_cast<std::int64_t>(6 + traj.uniformInt(25));
        std::vector<double> sizes;
        for (std::int64_t c = 0; c < total; ++c) sizes.push_back(traj.uniform(50.0, 500.0));
        std::vector<double> prefix = prefixSums(sizes);

        std::int64_t horizon = total * t.slotsPerChunk() * 30 + 200;
        std::vector<double> drained_at(static_cast<std::size_t>(horizon));
        double drained = 0.0;
        double mean_step = traj.uniform(10.0, 150.0);
        for (std::int64_t s = 0; s < horizon; ++s) {
            if (traj.uniform01() < 0.6) drained += traj.exponential(mean_step);
            drained_at[static_cast<std::size_t>(s)] = drained;
        }

        std::int64_t prev_stalls = -1;
        for (double pbt : pbt_grid) {
            PlaybackState st = makeState(total, pbt);
            for (std::int64_t s = 0; s < horizon; ++s) {
                registerDelivery(st, drained_at[static_cast<std::size_t>(s)], prefix);
                advancePlayout(st, s, t);
                if (st.phase == PlayPhase::finished) break;
            }
            if (prev_stalls >= 0) CHECK(st.stall_count <= prev_stalls);
            prev_stalls = st.stall_count;
        }
    }
}

TEST_CASE("summarize") {
    SUBCASE("empty input gives zeros") {
        RunMetrics m = summarize({}, {});
        CHECK(m.expected_stalls == 0.0);
        CHECK(m.avg_psnr_db == 0.0);
        CHECK(m.chunks_placed == 0);
    }

    SUBCASE("stall counts (1,3) average to 2") {
        PlaybackState a = makeState(5, 0.0);
        a.stall_count = 1;
        PlaybackState b = makeState(5, 0.0);
        b.stall_count = 3;
        b.phase = PlayPhase::finished;
        RunMetrics m = summarize({a, b}, {{}, {}});
        CHECK(m.expected_stalls == 2.0);
        CHECK(m.total_stall_events == 4);
        CHECK(m.links_finished == 1);
    }

    SUBCASE("uniform 38 dB chunks average to 38") {
        std::vector<std::vector<ChunkDecision>> decisions(2);
        for (int link = 0; link < 2; ++link)
            for (int c = 0; c < 3; ++c) {
                ChunkDecision d;
                d.link_id = link;
                d.chunk_index = c;
                d.chosen_mode = 1;
                d.psnr_db = 38.0;
                d.bits = 1000.0;
                decisions[static_cast<std::size_t>(link)].push_back(d);
            }
        RunMetrics m = summarize({makeState(3, 0.0), makeState(3, 0.0)}, decisions);
        CHECK(m.avg_psnr_db == doctest::Approx(38.0).epsilon(1e-12));
        CHECK(m.chunks_placed == 6);
        CHECK(m.expected_stalls == 0.0);
    }

    SUBCASE("mixed psnr averages over all links' chunks") {
        std::vector<std::vector<ChunkDecision>> decisions(2);
        ChunkDecision d;
        d.psnr_db = 30.0;
        decisions[0].push_back(d);
        d.psnr_db = 40.0;
        decisions[0].push_back(d);
        d.psnr_db = 50.0;
        decisions[1].push_back(d);
        RunMetrics m = summarize({makeState(2, 0.0), makeState(1, 0.0)}, decisions);
        CHECK(m.avg_psnr_db == doctest::Approx(40.0).epsilon(1e-12));
        CHECK(m.chunks_placed == 3);
    }
}
