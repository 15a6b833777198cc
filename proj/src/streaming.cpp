#include "d2d/streaming.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace d2d {

void StreamingConfig::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("StreamingConfig: alpha must be finite and >= 0");
    if (quality_modes < 1)
        throw std::invalid_argument("StreamingConfig: quality_modes must be >= 1");
}

ChunkDecision chooseQuality(std::span<const ChunkQualityEntry> entries, double backlog_bits,
                            double alpha, int link_id, std::int64_t chunk_index) {
    if (entries.empty()) throw std::invalid_argument("chooseQuality: no quality modes");
    if (!(backlog_bits >= 0.0)) throw std::invalid_argument("chooseQuality: negative backlog");
    if (!(alpha >= 0.0)) throw std::invalid_argument("chooseQuality: negative alpha");

    int best = 0;
    double best_score = entries[0].psnr_db - alpha * entries[0].total_bits * backlog_bits;
    for (std::size_t m = 1; m < entries.size(); ++m) {
        double score = entries[m].psnr_db - alpha * entries[m].total_bits * backlog_bits;
        if (score > best_score) {  // strict: ties keep the cheaper mode
            best_score = score;
            best = static_cast<int>(m);
        }
    }
    ChunkDecision d;
    d.link_id = link_id;
    d.chunk_index = chunk_index;
    d.chosen_mode = best + 1;
    d.psnr_db = entries[best].psnr_db;
    d.bits = entries[best].total_bits;
    return d;
}

std::vector<double> placeChunks(std::int64_t slot_index, const TimingConfig& timing,
                                std::vector<LinkSession>& sessions,
                                const std::vector<QueueState>& queues,
                                const StreamingConfig& cfg,
                                std::vector<ChunkDecision>* out_decisions) {
    std::vector<double> arrivals(sessions.size(), 0.0);
    if (slot_index % timing.slotsPerChunk() != 0) return arrivals;

    for (std::size_t i = 0; i < sessions.size(); ++i) {
        LinkSession& s = sessions[i];
        if (s.finished || s.trace == nullptr) continue;
        if (s.next_chunk >= s.trace->numChunks()) {
            s.finished = true;
            continue;
        }
        const auto& modes = s.trace->chunks[static_cast<std::size_t>(s.next_chunk)];
        ChunkDecision d = chooseQuality(modes, queues[i].backlog_bits, cfg.alpha,
                                        static_cast<int>(i), s.next_chunk);
        arrivals[i] = d.bits;
        double prev = s.chunk_bits_prefix.empty() ? 0.0 : s.chunk_bits_prefix.back();
        s.chunk_bits_prefix.push_back(prev + d.bits);
        s.decisions.push_back(d);
        if (out_decisions) out_decisions->push_back(d);
        ++s.next_chunk;
        if (s.next_chunk >= s.trace->numChunks()) s.finished = true;
    }
    return arrivals;
}

std::vector<double> departures(const Schedule& schedule, const ChannelGains& gains,
                               const RadioParams& radio, const TimingConfig& timing) {
    const int n = static_cast<int>(schedule.active_links.size());
    std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        if (!schedule.isActive(i)) continue;
        double interference = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i || !schedule.isActive(j)) continue;
            interference += radio.tx_power_w * gains.at(j, i);
        }
        double sinr = radio.tx_power_w * gains.at(i, i) / (radio.noise_power_w + interference);
        mu[static_cast<std::size_t>(i)] =
            timing.slot_seconds * radio.bandwidth_hz * std::log2(1.0 + sinr);
    }
    return mu;
}

SimEngine::SimEngine(LinkSet links, ChannelGains mean_gains, RadioParams radio,
                     TimingConfig timing, StreamingConfig streaming, SchedulerSpec scheduler,
                     std::vector<const VideoTrace*> traces_per_link, double pbt_seconds,
                     FadingKind fading, std::uint64_t sim_seed)
    : links_(std::move(links)),
      mean_gains_(std::move(mean_gains)),
      radio_(radio),
      timing_(timing),
      streaming_(streaming),
      scheduler_(scheduler),
      graph_(buildConflictGraph(links_, mean_gains_, radio_)),
      sampler_(mean_gains_, fading),
      rng_(sim_seed) {
    links_.validate();
    radio_.validate();
    timing_.validate();
    streaming_.validate();
    const std::size_t n = links_.size();
    if (traces_per_link.size() != n)
        throw std::invalid_argument("SimEngine: one trace per link required");
    if (!(pbt_seconds >= 0.0))
        throw std::invalid_argument("SimEngine: prebuffer target must be non-negative");

    queues_.resize(n);
    sessions_.resize(n);
    playback_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (traces_per_link[i] == nullptr)
            throw std::invalid_argument("SimEngine: null trace");
        traces_per_link[i]->validate();
        sessions_[i].trace = traces_per_link[i];
        playback_[i].link_id = static_cast<int>(i);
        playback_[i].total_chunks = traces_per_link[i]->numChunks();
        playback_[i].prebuffer_target_s = pbt_seconds;
    }
    last_schedule_.active_links.assign(n, 0);
}

void SimEngine::checkScheduleInvariants(const Schedule& s) {
    const int n = static_cast<int>(links_.size());
    for (int i = 0; i < n; ++i) {
        if (!s.isActive(i)) continue;
        for (int j = i + 1; j < n; ++j) {
            if (s.isActive(j) && graph_.edge(i, j)) ++invariant_violations_;
        }
    }
}

void SimEngine::step() {
    const std::size_t n = links_.size();
    double backlog_sum = 0.0;
    for (const auto& q : queues_) backlog_sum += q.backlog_bits;
    backlog_slot_sum_ += n ? backlog_sum / static_cast<double>(n) : 0.0;

    const ChannelGains& slot_gains = sampler_.sampleSlot(rng_);

    Schedule sched;
    switch (scheduler_.kind) {
        case SchedulerKind::CentralizedMaxWeight:
            sched = scheduleCentralized(slot_, queues_, mean_gains_, radio_, graph_,
                                        scheduler_.mwis);
            break;
        case SchedulerKind::DistributedFlashLinQ:
            sched = scheduleFlashlinq(slot_, queues_, mean_gains_, radio_, false, rng_);
            break;
        case SchedulerKind::RandomizedBaseline:
            sched = scheduleFlashlinq(slot_, queues_, mean_gains_, radio_, true, rng_,
                                      scheduler_.random_ignore_yielding);
            break;
    }
    checkScheduleInvariants(sched);

    std::vector<double> mu = departures(sched, slot_gains, radio_, timing_);
    std::vector<double> lambda = placeChunks(slot_, timing_, sessions_, queues_, streaming_);

    for (std::size_t i = 0; i < n; ++i) {
        queues_[i] = queueUpdate(queues_[i], mu[i], lambda[i]);
        registerDelivery(playback_[i], queues_[i].drainedBits(), sessions_[i].chunk_bits_prefix);
        advancePlayout(playback_[i], slot_, timing_);
        if (slot_log_) {
            slot_log_->push_back({slot_, static_cast<int>(i), queues_[i].backlog_bits, mu[i],
                                  sched.isActive(static_cast<int>(i)) ? 1 : 0});
        }
    }
    last_schedule_ = std::move(sched);
    ++slot_;
}

void SimEngine::run(std::int64_t num_slots) {
    if (num_slots < 0) throw std::invalid_argument("SimEngine::run: negative slot count");
    for (std::int64_t s = 0; s < num_slots; ++s) step();
}

double SimEngine::conservationError() const {
    double worst = 0.0;
    for (const auto& q : queues_) {
        double expect = q.totalArrivals() - q.totalDepartures() + q.totalCredit();
        worst = std::max(worst, std::abs(q.totalBacklog() - expect));
    }
    return worst;
}

RunMetrics SimEngine::metrics() const {
    std::vector<std::vector<ChunkDecision>> per_link;
    per_link.reserve(sessions_.size());
    for (const auto& s : sessions_) per_link.push_back(s.decisions);
    RunMetrics m = summarize(playback_, per_link);
    m.mean_backlog_bits = slot_ > 0 ? backlog_slot_sum_ / static_cast<double>(slot_) : 0.0;
    return m;
}

}  // namespace d2d
