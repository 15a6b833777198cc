#include "d2d/core.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d {

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

void LinkSet::validate() const {
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (links[i].id != static_cast<int>(i))
            throw std::invalid_argument("LinkSet: link id " + std::to_string(links[i].id) +
                                        " does not match position " + std::to_string(i));
        if (!(links[i].length() > 0.0))
            throw std::invalid_argument("LinkSet: link " + std::to_string(i) +
                                        " has non-positive tx-rx distance");
    }
}

double dbToLinear(double x_db) {
    if (!std::isfinite(x_db)) throw std::invalid_argument("dbToLinear: non-finite input");
    return std::pow(10.0, x_db / 10.0);
}

double linearToDb(double x_linear) {
    if (!(x_linear > 0.0)) throw std::invalid_argument("linearToDb: input must be > 0");
    return 10.0 * std::log10(x_linear);
}

void RadioParams::validate() const {
    if (!(tx_power_w > 0.0)) throw std::invalid_argument("RadioParams: tx_power_w must be > 0");
    if (!(noise_power_w > 0.0)) throw std::invalid_argument("RadioParams: noise_power_w must be > 0");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("RadioParams: bandwidth_hz must be > 0");
    if (!std::isfinite(interference_threshold_db))
        throw std::invalid_argument("RadioParams: interference_threshold_db must be finite");
}

void ChannelGains::validate() const {
    for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) {
            double v = at(j, i);
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("ChannelGains: entry (" + std::to_string(j) + "," +
                                            std::to_string(i) + ") must be finite and >= 0");
        }
        if (!(at(j, j) > 0.0))
            throw std::invalid_argument("ChannelGains: diagonal entry " + std::to_string(j) +
                                        " must be > 0");
    }
}

std::int64_t TimingConfig::slotsPerChunk() const {
    double ratio = chunk_seconds / slot_seconds;
    auto k = static_cast<std::int64_t>(std::llround(ratio));
    if (k < 1 || std::abs(chunk_seconds - static_cast<double>(k) * slot_seconds) > 1e-9 * slot_seconds)
        throw std::invalid_argument("TimingConfig: chunk_seconds must be an integer multiple of slot_seconds");
    return k;
}

void TimingConfig::validate() const {
    if (!(slot_seconds > 0.0)) throw std::invalid_argument("TimingConfig: slot_seconds must be > 0");
    if (!(chunk_seconds > 0.0)) throw std::invalid_argument("TimingConfig: chunk_seconds must be > 0");
    (void)slotsPerChunk();
}

namespace {

struct SumErr {
    double s;
    double e;
};

// Error-free transform: a + b == s + e exactly (Knuth).
SumErr twoSum(double a, double b) {
    double s = a + b;
    double bv = s - a;
    return {s, (a - (s - bv)) + (b - bv)};
}

void neumaierAdd(double& sum, double& carry, double x) {
    SumErr t = twoSum(sum, x);
    sum = t.s;
    carry += t.e;
}

}  // namespace

QueueState queueUpdate(const QueueState& q, double mu_bits, double lambda_bits) {
    if (!(mu_bits >= 0.0) || !std::isfinite(mu_bits))
        throw std::invalid_argument("queueUpdate: mu_bits must be finite and >= 0");
    if (!(lambda_bits >= 0.0) || !std::isfinite(lambda_bits))
        throw std::invalid_argument("queueUpdate: lambda_bits must be finite and >= 0");

    QueueState out = q;
    SumErr served = twoSum(q.backlog_bits, -mu_bits);
    double lo = served.e + q.backlog_carry_bits;
    double after_service = served.s + lo;
    if (after_service < 0.0) {
        // service offered past empty
        neumaierAdd(out.truncation_credit_bits, out.credit_carry_bits, -after_service);
        out.backlog_bits = 0.0;
        out.backlog_carry_bits = 0.0;
    } else {
        SumErr norm = twoSum(served.s, lo);
        out.backlog_bits = norm.s;
        out.backlog_carry_bits = norm.e;
    }
    SumErr arrived = twoSum(out.backlog_bits, lambda_bits);
    out.backlog_bits = arrived.s;
    out.backlog_carry_bits += arrived.e;
    neumaierAdd(out.cumulative_arrivals_bits, out.arrivals_carry_bits, lambda_bits);
    neumaierAdd(out.cumulative_departures_bits, out.departures_carry_bits, mu_bits);
    return out;
}

}  // namespace d2d
