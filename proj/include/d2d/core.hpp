#pragma once

#include <cstdint>
#include <cmath>
#include <string>
#include <vector>

namespace d2d {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

// One D2D transmitter-receiver pair.
struct Link {
    int id = 0;
    Vec2 tx_position;
    Vec2 rx_position;
    int file_id = 0;

    double length() const { return distance(tx_position, rx_position); }
};

// Ordered collection of links; link ids must equal their position in the set.
struct LinkSet {
    std::vector<Link> links;

    int size() const { return static_cast<int>(links.size()); }
    const Link& operator[](int i) const { return links[static_cast<std::size_t>(i)]; }
    Link& operator[](int i) { return links[static_cast<std::size_t>(i)]; }

    // Throws std::invalid_argument on id/ordering mismatch or zero-length links.
    void validate() const;
};

double dbToLinear(double x_db);
double linearToDb(double x_linear);

// Shared radio constants. The interference threshold is kept in dB and
// converted at the point of use.
struct RadioParams {
    double tx_power_w = 1.0;
    double noise_power_w = 4.0e-13;
    double interference_threshold_db = 5.0;
    double bandwidth_hz = 2.0e6;

    double gammaLinear() const { return dbToLinear(interference_threshold_db); }
    // Admissible single-interferer power: gamma expressed relative to noise.
    double gammaPowerW() const { return gammaLinear() * noise_power_w; }

    void validate() const;
};

// |L| x |L| matrix of power gains; entry (j, i) is TX of link j -> RX of link i.
class ChannelGains {
public:
    ChannelGains() = default;
    explicit ChannelGains(int num_links) : n_(num_links), g_(static_cast<std::size_t>(num_links) * num_links, 0.0) {}

    int size() const { return n_; }
    double at(int j, int i) const { return g_[static_cast<std::size_t>(j) * n_ + i]; }
    void set(int j, int i, double v) { g_[static_cast<std::size_t>(j) * n_ + i] = v; }

    // Finite, non-negative, positive diagonal.
    void validate() const;

private:
    int n_ = 0;
    std::vector<double> g_;
};

// Two clocks: scheduling slots t and chunk times tau. Chunk duration must be
// an exact integer multiple of the slot duration.
struct TimingConfig {
    double slot_seconds = 0.01;
    double chunk_seconds = 0.5;

    std::int64_t slotsPerChunk() const;
    void validate() const;
};

// Per-link transmit queue, bit-fluid. The truncation credit accounts for
// service offered to an empty queue, so that
//   backlog == arrivals - departures + truncation_credit
// holds at all times. Each quantity carries a compensation term (two-sum /
// Neumaier) so the identity stays below 1e-6 bits even when the cumulative
// counters reach 1e9+ bits over tens of thousands of slots.
struct QueueState {
    double backlog_bits = 0.0;
    double cumulative_arrivals_bits = 0.0;
    double cumulative_departures_bits = 0.0;
    double truncation_credit_bits = 0.0;
    double backlog_carry_bits = 0.0;
    double arrivals_carry_bits = 0.0;
    double departures_carry_bits = 0.0;
    double credit_carry_bits = 0.0;

    double totalBacklog() const { return backlog_bits + backlog_carry_bits; }
    double totalArrivals() const { return cumulative_arrivals_bits + arrivals_carry_bits; }
    double totalDepartures() const { return cumulative_departures_bits + departures_carry_bits; }
    double totalCredit() const { return truncation_credit_bits + credit_carry_bits; }

    // Bits that actually left the queue (eligible for playout delivery).
    double drainedBits() const { return totalArrivals() - totalBacklog(); }
};

// One step of the backlog recursion: Q' = max(0, Q - mu) + lambda.
// Negative or non-finite inputs are contract violations.
QueueState queueUpdate(const QueueState& q, double mu_bits, double lambda_bits);

}  // namespace d2d
