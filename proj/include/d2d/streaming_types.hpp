#pragma once

#include <cstdint>

namespace d2d {

// Quality controller knobs. alpha scales the backlog penalty in the per-chunk
// mode choice (units: quality dB per bit^2); quality_modes is the mode count
// used when synthesizing traces.
struct StreamingConfig {
    double alpha = 2.0e-12;
    int quality_modes = 4;

    void validate() const;
};

// Outcome of one quality-mode choice. chosen_mode is 1-based.
struct ChunkDecision {
    int link_id = 0;
    std::int64_t chunk_index = 0;
    int chosen_mode = 0;
    double psnr_db = 0.0;
    double bits = 0.0;
};

}  // namespace d2d
