#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "d2d/streaming.hpp"

using namespace d2d;

namespace {

ChunkQualityEntry entry(double psnr, double total_bits) {
    ChunkQualityEntry e;
    e.psnr_db = psnr;
    e.bits_per_pixel = total_bits / 1000.0;
    e.total_bits = total_bits;
    return e;
}

RadioParams testRadio() {
    RadioParams r;
    r.bandwidth_hz = 2.0e6;
    return r;
}

double rateDenom(const RadioParams& r) { return r.noise_power_w + r.gammaPowerW(); }

TimingConfig testTiming() {
    TimingConfig t;
    t.slot_seconds = 0.1;
    t.chunk_seconds = 0.5;  // 5 slots per chunk
    return t;
}

// n links in a row, 10 m pairs spaced 1 km apart; gains set by hand.
LinkSet rowLinks(int n) {
    LinkSet ls;
    for (int i = 0; i < n; ++i) {
        Link l;
        l.id = i;
        l.tx_position = {1000.0 * i, 0.0};
        l.rx_position = {1000.0 * i + 10.0, 0.0};
        l.file_id = i;
        ls.links.push_back(l);
    }
    return ls;
}

// Every link at rate 2 bits/s/Hz; cross gains uniform (0 = isolated).
ChannelGains uniformGains(int n, const RadioParams& radio, double cross) {
    ChannelGains g(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.set(j, i, j == i ? 3.0 * rateDenom(radio) / radio.tx_power_w : cross);
    return g;
}

VideoTrace smallTrace(std::int64_t chunks, int modes, std::uint64_t seed, double min_mbps,
                      double max_mbps) {
    RdParams rd;
    rd.pixels_per_chunk = 1000;
    rd.chunk_seconds = 0.5;
    rd.min_bitrate_bps = min_mbps * 1e6;
    rd.max_bitrate_bps = max_mbps * 1e6;
    rd.psnr_at_unit_bpp_db = 30.0;
    return generateSynthetic(chunks, modes, seed, rd);
}

struct EngineParts {
    std::vector<VideoTrace> traces;
    std::unique_ptr<SimEngine> engine;
};

EngineParts makeEngine(int n, double cross, SchedulerKind kind, double pbt, std::uint64_t seed,
                       double min_mbps, double max_mbps, double alpha,
                       FadingKind fading = FadingKind::none, std::int64_t chunks = 40,
                       bool ignore_yielding = false) {
    EngineParts parts;
    RadioParams radio = testRadio();
    for (int i = 0; i < n; ++i)
        parts.traces.push_back(smallTrace(chunks, 4, 100 + static_cast<std::uint64_t>(i),
                                          min_mbps, max_mbps));
    std::vector<const VideoTrace*> ptrs;
    for (const auto& t : parts.traces) ptrs.push_back(&t);

    StreamingConfig streaming;
    streaming.alpha = alpha;
    SchedulerSpec spec;
    spec.kind = kind;
    spec.random_ignore_yielding = ignore_yielding;

    parts.engine = std::make_unique<SimEngine>(rowLinks(n), uniformGains(n, radio, cross), radio,
                                               testTiming(), streaming, spec, ptrs, pbt, fading,
                                               seed);
    return parts;
}

}  // namespace

TEST_CASE("quality choice") {
    std::vector<ChunkQualityEntry> modes = {entry(30.0, 5000.0), entry(40.0, 20000.0)};

    SUBCASE("alpha zero picks the highest psnr") {
        ChunkDecision d = chooseQuality(modes, 1e9, 0.0);
        CHECK(d.chosen_mode == 2);
        CHECK(d.psnr_db == 40.0);
        CHECK(d.bits == 20000.0);
    }

    SUBCASE("backlog penalty flips the choice") {
        // scores: 30 - 1e-6*5000*1000 = 25 and 40 - 1e-6*20000*1000 = 20
        ChunkDecision d = chooseQuality(modes, 1000.0, 1e-6, 3, 17);
        CHECK(d.chosen_mode == 1);
        CHECK(d.psnr_db == 30.0);
        CHECK(d.bits == 5000.0);
        CHECK(d.link_id == 3);
        CHECK(d.chunk_index == 17);
    }

    SUBCASE("empty queue removes the penalty") {
        ChunkDecision d = chooseQuality(modes, 0.0, 1e-6);
        CHECK(d.chosen_mode == 2);
        CHECK(d.psnr_db == 40.0);
    }

    SUBCASE("exact ties go to the cheaper mode") {
        // power-of-two arithmetic: 30 - 0.25*4*1 = 31 - 0.25*8*1 = 29
        std::vector<ChunkQualityEntry> tie = {entry(30.0, 4.0), entry(31.0, 8.0)};
        ChunkDecision d = chooseQuality(tie, 1.0, 0.25);
        CHECK(d.chosen_mode == 1);
        CHECK(d.bits == 4.0);
    }

    SUBCASE("bad input throws") {
        CHECK_THROWS_AS(chooseQuality({}, 0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(chooseQuality(modes, -1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(chooseQuality(modes, 0.0, -1e-9), std::invalid_argument);
    }

    SUBCASE("raising alpha never buys more bits") {
        SimRng rng(51);
        for (int trial = 0; trial < 300; ++trial) {
            int m = 2 + static_cast<int>(rng.uniformInt(5));
            std::vector<ChunkQualityEntry> set;
            double bits = rng.uniform(1e3, 1e5);
            double psnr = rng.uniform(20.0, 30.0);
            for (int k = 0; k < m; ++k) {
                set.push_back(entry(psnr, bits));
                bits *= rng.uniform(1.3, 2.5);
                psnr += rng.uniform(0.5, 4.0);
            }
            double q = rng.uniform(0.0, 1e7);
            double prev_bits = -1.0;
            for (double a : {0.0, 1e-13, 1e-12, 4e-12, 1e-11, 1e-9}) {
                ChunkDecision d = chooseQuality(set, q, a);
                if (prev_bits >= 0.0) CHECK(d.bits <= prev_bits);
                prev_bits = d.bits;
            }
        }
    }
}

TEST_CASE("chunk placement") {
    TimingConfig t = testTiming();
    StreamingConfig cfg;
    cfg.alpha = 0.0;
    VideoTrace trace = smallTrace(2, 3, 5, 0.5, 2.0);

    SUBCASE("mid-chunk slots place nothing") {
        std::vector<LinkSession> sessions(2);
        sessions[0].trace = &trace;
        sessions[1].trace = &trace;
        std::vector<QueueState> queues(2);
        std::vector<ChunkDecision> decisions;
        auto arrivals = placeChunks(1, t, sessions, queues, cfg, &decisions);
        CHECK(arrivals == std::vector<double>{0.0, 0.0});
        CHECK(decisions.empty());
        CHECK(sessions[0].next_chunk == 0);
    }

    SUBCASE("a chunk boundary places one chunk per link") {
        std::vector<LinkSession> sessions(2);
        sessions[0].trace = &trace;
        sessions[1].trace = &trace;
        std::vector<QueueState> queues(2);
        std::vector<ChunkDecision> decisions;
        auto arrivals = placeChunks(0, t, sessions, queues, cfg, &decisions);
        REQUIRE(decisions.size() == 2);
        CHECK(arrivals[0] == decisions[0].bits);
        CHECK(arrivals[1] == decisions[1].bits);
        CHECK(decisions[0].link_id == 0);
        CHECK(decisions[1].link_id == 1);
        CHECK(decisions[0].chunk_index == 0);
        CHECK(sessions[0].next_chunk == 1);
        CHECK(sessions[0].chunk_bits_prefix == std::vector<double>{decisions[0].bits});
        CHECK(sessions[0].decisions.size() == 1);
    }

    SUBCASE("an exhausted trace marks the link finished") {
        VideoTrace one = smallTrace(1, 2, 6, 0.5, 2.0);
        std::vector<LinkSession> sessions(1);
        sessions[0].trace = &one;
        std::vector<QueueState> queues(1);
        auto first = placeChunks(0, t, sessions, queues, cfg);
        CHECK(first[0] > 0.0);
        CHECK(sessions[0].finished);

        auto second = placeChunks(5, t, sessions, queues, cfg);
        CHECK(second[0] == 0.0);
        CHECK(sessions[0].decisions.size() == 1);
    }

    SUBCASE("backlog steers the mode choice") {
        StreamingConfig pressured;
        pressured.alpha = 1e-9;
        std::vector<LinkSession> a(1), b(1);
        a[0].trace = &trace;
        b[0].trace = &trace;
        std::vector<QueueState> empty(1), loaded(1);
        loaded[0].backlog_bits = 1e8;
        placeChunks(0, t, a, empty, pressured);
        placeChunks(0, t, b, loaded, pressured);
        CHECK(a[0].decisions[0].chosen_mode == 3);
        CHECK(b[0].decisions[0].chosen_mode == 1);
    }
}

TEST_CASE("departures") {
    SUBCASE("snr one, unit bandwidth, unit slot gives one bit") {
        RadioParams radio;
        radio.bandwidth_hz = 1.0;
        TimingConfig t;
        t.slot_seconds = 1.0;
        t.chunk_seconds = 1.0;
        ChannelGains g(1);
        g.set(0, 0, radio.noise_power_w / radio.tx_power_w);
        Schedule s;
        s.active_links = {1};
        auto mu = departures(s, g, radio, t);
        CHECK(mu[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("inactive links get zero") {
        RadioParams radio = testRadio();
        ChannelGains g = uniformGains(2, radio, 0.0);
        Schedule s;
        s.active_links = {1, 0};
        auto mu = departures(s, g, radio, testTiming());
        CHECK(mu[0] > 0.0);
        CHECK(mu[1] == 0.0);
    }

    SUBCASE("aggregate interference with a known answer") {
        RadioParams radio;
        radio.bandwidth_hz = 1.0;
        TimingConfig t;
        t.slot_seconds = 1.0;
        t.chunk_seconds = 1.0;
        ChannelGains g(2);
        double sigma2 = radio.noise_power_w;
        g.set(0, 0, 6.0 * sigma2 / radio.tx_power_w);  // SINR = 6/(1+1) = 3
        g.set(1, 1, 6.0 * sigma2 / radio.tx_power_w);
        g.set(1, 0, sigma2 / radio.tx_power_w);
        g.set(0, 1, sigma2 / radio.tx_power_w);
        Schedule s;
        s.active_links = {1, 1};
        auto mu = departures(s, g, radio, t);
        CHECK(mu[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(mu[1] == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("interference never helps") {
        RadioParams radio = testRadio();
        TimingConfig t = testTiming();
        SimRng rng(8);
        for (int trial = 0; trial < 40; ++trial) {
            int n = 2 + static_cast<int>(rng.uniformInt(6));
            ChannelGains g(n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    g.set(j, i, rng.uniform(1e-14, 1e-10) * (j == i ? 100.0 : 1.0));
            Schedule all;
            all.active_links.assign(static_cast<std::size_t>(n), 1);
            auto joint = departures(all, g, radio, t);
            for (int i = 0; i < n; ++i) {
                Schedule solo;
                solo.active_links.assign(static_cast<std::size_t>(n), 0);
                solo.active_links[static_cast<std::size_t>(i)] = 1;
                auto alone = departures(solo, g, radio, t);
                CHECK(joint[i] <= alone[i] + 1e-12);
            }
        }
    }
}

TEST_CASE("engine drains a light load within each chunk period") {
    // rate 2 bits/s/Hz, B=2 MHz, slot 0.1 s -> 400k bits per scheduled slot,
    // chunks at most ~120k bits
    EngineParts p = makeEngine(1, 0.0, SchedulerKind::CentralizedMaxWeight, 0.0, 1, 0.05, 0.2,
                               0.0, FadingKind::none, 4);
    SimEngine& e = *p.engine;

    e.step();  // slot 0: placement only, nothing scheduled on an empty queue
    CHECK(e.queues()[0].backlog_bits == e.sessions()[0].decisions[0].bits);
    e.step();  // slot 1: drained in one scheduled slot
    CHECK(e.queues()[0].backlog_bits == 0.0);
    CHECK(e.playback()[0].delivered_chunks == 1);

    e.run(23);  // through slot 24: all 4 chunks placed, played out 20 slots
    CHECK(e.sessions()[0].finished);
    CHECK(e.playback()[0].phase == PlayPhase::finished);
    CHECK(e.playback()[0].stall_count == 0);

    RunMetrics m = e.metrics();
    CHECK(m.chunks_placed == 4);
    CHECK(m.links_finished == 1);
    CHECK(m.expected_stalls == 0.0);
    CHECK(m.mean_backlog_bits > 0.0);
    CHECK(e.invariantViolations() == 0);
    CHECK(e.conservationError() < 1e-9);
}

TEST_CASE("engine reaches a fixed point after the trace ends") {
    EngineParts p = makeEngine(2, 0.0, SchedulerKind::DistributedFlashLinQ, 0.0, 2, 0.1, 0.5,
                               0.0, FadingKind::none, 3);
    SimEngine& e = *p.engine;
    e.run(40);
    REQUIRE(e.sessions()[0].finished);
    REQUIRE(e.sessions()[1].finished);
    REQUIRE(e.queues()[0].backlog_bits == 0.0);
    REQUIRE(e.queues()[1].backlog_bits == 0.0);

    auto queues = e.queues();
    auto delivered0 = e.playback()[0].delivered_chunks;
    auto stall_logs = e.playback()[0].stall_log.size();
    auto decisions = e.sessions()[0].decisions.size();
    e.run(25);
    for (int i = 0; i < 2; ++i) {
        CHECK(e.queues()[i].backlog_bits == queues[i].backlog_bits);
        CHECK(e.queues()[i].cumulative_arrivals_bits == queues[i].cumulative_arrivals_bits);
        CHECK(e.queues()[i].cumulative_departures_bits == queues[i].cumulative_departures_bits);
        CHECK(e.queues()[i].truncation_credit_bits == queues[i].truncation_credit_bits);
    }
    CHECK(e.playback()[0].delivered_chunks == delivered0);
    CHECK(e.playback()[0].stall_log.size() == stall_logs);
    CHECK(e.sessions()[0].decisions.size() == decisions);
    CHECK(e.slot() == 65);
}

TEST_CASE("same seed gives an identical trajectory, different seed diverges") {
    auto build = [](std::uint64_t seed) {
        return makeEngine(3, 1e-6, SchedulerKind::RandomizedBaseline, 1.0, seed, 2.0, 6.0,
                          2e-12, FadingKind::rayleigh_per_slot, 60);
    };
    EngineParts a = build(7), b = build(7), c = build(8);
    a.engine->run(150);
    b.engine->run(150);
    c.engine->run(150);

    bool any_diff = false;
    for (int i = 0; i < 3; ++i) {
        CHECK(a.engine->queues()[i].backlog_bits == b.engine->queues()[i].backlog_bits);
        CHECK(a.engine->queues()[i].cumulative_departures_bits ==
              b.engine->queues()[i].cumulative_departures_bits);
        CHECK(a.engine->playback()[i].stall_count == b.engine->playback()[i].stall_count);
        CHECK(a.engine->sessions()[i].chunk_bits_prefix == b.engine->sessions()[i].chunk_bits_prefix);
        if (a.engine->queues()[i].cumulative_departures_bits !=
            c.engine->queues()[i].cumulative_departures_bits)
            any_diff = true;
    }
    CHECK(any_diff);

    RunMetrics ma = a.engine->metrics(), mb = b.engine->metrics();
    CHECK(ma.avg_psnr_db == mb.avg_psnr_db);
    CHECK(ma.expected_stalls == mb.expected_stalls);
    CHECK(ma.mean_backlog_bits == mb.mean_backlog_bits);
}

TEST_CASE("schedules stay feasible under load for every policy") {
    for (SchedulerKind kind : {SchedulerKind::CentralizedMaxWeight,
                               SchedulerKind::DistributedFlashLinQ,
                               SchedulerKind::RandomizedBaseline}) {
        EngineParts p = makeEngine(4, 1e-6, kind, 1.0, 3, 2.0, 6.0, 2e-12,
                                   FadingKind::rayleigh_per_slot, 60);
        REQUIRE(p.engine->conflictGraph().numEdges() > 0);
        p.engine->run(200);
        CHECK(p.engine->invariantViolations() == 0);
        CHECK(p.engine->conservationError() < 1e-6);
    }
}

TEST_CASE("ignoring the yield tests is counted as infeasible") {
    EngineParts p = makeEngine(3, 1e-6, SchedulerKind::RandomizedBaseline, 1.0, 4, 2.0, 6.0,
                               2e-12, FadingKind::none, 60, true);
    REQUIRE(p.engine->conflictGraph().numEdges() > 0);
    p.engine->run(100);
    CHECK(p.engine->invariantViolations() > 0);
}

TEST_CASE("logged decisions always attain the quality objective maximum") {
    EngineParts p = makeEngine(2, 1e-6, SchedulerKind::DistributedFlashLinQ, 1.0, 5, 3.0, 6.0,
                               3e-12, FadingKind::rayleigh_per_slot, 50);
    SimEngine& e = *p.engine;
    std::vector<SlotRecord> log;
    e.enableSlotLog(&log);
    e.run(260);

    const double alpha = 3e-12;
    const std::int64_t spc = 5;
    const int n = 2;
    int distinct_modes = 0;
    for (int link = 0; link < n; ++link) {
        const LinkSession& s = e.sessions()[static_cast<std::size_t>(link)];
        bool saw[5] = {};
        for (const ChunkDecision& d : s.decisions) {
            std::int64_t slot = d.chunk_index * spc;
            double backlog = 0.0;
            if (slot > 0) {
                const SlotRecord& rec = log[static_cast<std::size_t>((slot - 1) * n + link)];
                REQUIRE(rec.slot == slot - 1);
                REQUIRE(rec.link == link);
                backlog = rec.backlog_bits;
            }
            const auto& modes = s.trace->chunks[static_cast<std::size_t>(d.chunk_index)];
            double chosen_score = d.psnr_db - alpha * d.bits * backlog;
            double best = chosen_score;
            for (const auto& m : modes)
                best = std::max(best, m.psnr_db - alpha * m.total_bits * backlog);
            CHECK(chosen_score == best);
            CHECK(modes[static_cast<std::size_t>(d.chosen_mode - 1)].total_bits == d.bits);
            if (!saw[d.chosen_mode]) {
                saw[d.chosen_mode] = true;
                ++distinct_modes;
            }
        }
    }
    CHECK(distinct_modes > 2);  // the load actually exercises the tradeoff
    CHECK(log.size() == static_cast<std::size_t>(260 * n));
}

TEST_CASE("the prebuffer target only affects playback") {
    auto build = [](double pbt) {
        return makeEngine(2, 1e-6, SchedulerKind::CentralizedMaxWeight, pbt, 6, 3.0, 8.0,
                          1e-12, FadingKind::rayleigh_per_slot, 60);
    };
    EngineParts lo = build(0.5), hi = build(4.0);
    lo.engine->run(400);
    hi.engine->run(400);

    for (int i = 0; i < 2; ++i) {
        CHECK(lo.engine->queues()[i].backlog_bits == hi.engine->queues()[i].backlog_bits);
        CHECK(lo.engine->queues()[i].cumulative_arrivals_bits ==
              hi.engine->queues()[i].cumulative_arrivals_bits);
        CHECK(lo.engine->sessions()[i].chunk_bits_prefix ==
              hi.engine->sessions()[i].chunk_bits_prefix);
        CHECK(hi.engine->playback()[i].stall_count <= lo.engine->playback()[i].stall_count);
    }
    CHECK(lo.engine->metrics().total_stall_events > 0);  // load heavy enough to matter
}

TEST_CASE("engine rejects inconsistent construction") {
    RadioParams radio = testRadio();
    VideoTrace trace = smallTrace(5, 2, 9, 0.5, 1.0);
    std::vector<const VideoTrace*> one = {&trace};
    std::vector<const VideoTrace*> null_trace = {nullptr};

    CHECK_THROWS_AS(SimEngine(rowLinks(2), uniformGains(2, radio, 0.0), radio, testTiming(), {},
                              {}, one, 0.0, FadingKind::none, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(SimEngine(rowLinks(1), uniformGains(1, radio, 0.0), radio, testTiming(), {},
                              {}, null_trace, 0.0, FadingKind::none, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(SimEngine(rowLinks(1), uniformGains(1, radio, 0.0), radio, testTiming(), {},
                              {}, one, -1.0, FadingKind::none, 1),
                    std::invalid_argument);

    SimEngine ok(rowLinks(1), uniformGains(1, radio, 0.0), radio, testTiming(), {}, {}, one, 0.0,
                 FadingKind::none, 1);
    CHECK_THROWS_AS(ok.run(-1), std::invalid_argument);
}
