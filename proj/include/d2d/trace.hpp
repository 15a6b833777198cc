#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace d2d {

// One quality mode of one chunk. total_bits = pixels_per_chunk * bits_per_pixel.
struct ChunkQualityEntry {
    double psnr_db = 0.0;
    double bits_per_pixel = 0.0;
    double total_bits = 0.0;
};

// Per-chunk multi-quality rate/quality table for one video file. Within each
// chunk, entries are sorted by bits ascending with strictly increasing PSNR;
// dominated modes are rejected at ingest.
struct VideoTrace {
    int file_id = 0;
    std::int64_t pixels_per_chunk = 0;
    double chunk_seconds = 0.5;
    std::vector<std::vector<ChunkQualityEntry>> chunks;

    std::int64_t numChunks() const { return static_cast<std::int64_t>(chunks.size()); }
    int modeCount() const { return chunks.empty() ? 0 : static_cast<int>(chunks.front().size()); }

    void validate() const;
};

// Trace files are a CSV (header: chunk,mode,psnr_db,bits_per_pixel) plus a
// JSON sidecar {file_id, pixels_per_chunk, chunk_seconds} next to it.
std::string sidecarPathFor(const std::string& csv_path);
VideoTrace loadTrace(const std::string& csv_path);
void saveTrace(const VideoTrace& trace, const std::string& csv_path);

// Synthetic rate-quality model: per-mode mean bitrates spaced geometrically
// between min and max, log-normal per-chunk bit jitter, and
// psnr = a + b*log2(bits_per_pixel) with shared per-chunk jitter.
struct RdParams {
    std::int64_t pixels_per_chunk = 13824000;  // 1280x720, 30 fps, 0.5 s
    double chunk_seconds = 0.5;
    double min_bitrate_bps = 5.0e5;
    double max_bitrate_bps = 8.0e6;
    double psnr_at_unit_bpp_db = 50.0;  // a
    double psnr_per_octave_db = 4.3;    // b
    double psnr_jitter_db = 0.8;
    double bits_jitter_sigma = 0.25;
};

VideoTrace generateSynthetic(std::int64_t num_chunks, int modes, std::uint64_t seed,
                             const RdParams& rd = {}, int file_id = 0);

}  // namespace d2d
