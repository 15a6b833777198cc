#include "d2d/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "d2d/rng.hpp"

namespace d2d {

namespace {

[[noreturn]] void traceError(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

double parseDouble(const std::string& path, int line, const std::string& field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        traceError(path, line, "not a number: '" + field + "'");
    return v;
}

std::int64_t parseInt(const std::string& path, int line, const std::string& field) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        traceError(path, line, "not an integer: '" + field + "'");
    return v;
}

// Shortest representation that round-trips.
std::string formatDouble(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

void VideoTrace::validate() const {
    if (pixels_per_chunk <= 0) throw std::runtime_error("VideoTrace: pixels_per_chunk must be > 0");
    if (!(chunk_seconds > 0.0)) throw std::runtime_error("VideoTrace: chunk_seconds must be > 0");
    if (chunks.empty()) throw std::runtime_error("VideoTrace: empty trace");
    const int m = modeCount();
    if (m < 1) throw std::runtime_error("VideoTrace: chunk 0 has no modes");
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        const auto& entries = chunks[c];
        if (static_cast<int>(entries.size()) != m)
            throw std::runtime_error("VideoTrace: chunk " + std::to_string(c) + " has " +
                                     std::to_string(entries.size()) + " modes, expected " +
                                     std::to_string(m));
        for (std::size_t q = 0; q < entries.size(); ++q) {
            const auto& e = entries[q];
            if (!(e.psnr_db > 0.0 && e.psnr_db < 100.0))
                throw std::runtime_error("VideoTrace: chunk " + std::to_string(c) + " mode " +
                                         std::to_string(q + 1) + ": psnr_db out of (0, 100)");
            if (!(e.bits_per_pixel > 0.0))
                throw std::runtime_error("VideoTrace: chunk " + std::to_string(c) + " mode " +
                                         std::to_string(q + 1) + ": bits_per_pixel must be > 0");
            if (!(e.total_bits > 0.0))
                throw std::runtime_error("VideoTrace: chunk " + std::to_string(c) + " mode " +
                                         std::to_string(q + 1) + ": total_bits must be > 0");
            if (q > 0) {
                if (!(e.bits_per_pixel > entries[q - 1].bits_per_pixel))
                    throw std::runtime_error("VideoTrace: chunk " + std::to_string(c) + " mode " +
                                             std::to_string(q + 1) +
                                             ": bits not strictly increasing");
                if (!(e.psnr_db > entries[q - 1].psnr_db))
                    throw std::runtime_error("VideoTrace: chunk " + std::to_string(c) + " mode " +
                                             std::to_string(q + 1) +
                                             ": psnr not strictly increasing with bits (dominated mode)");
            }
        }
    }
}

std::string sidecarPathFor(const std::string& csv_path) {
    auto dot = csv_path.find_last_of('.');
    auto slash = csv_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

VideoTrace loadTrace(const std::string& csv_path) {
    std::ifstream sidecar(sidecarPathFor(csv_path));
    if (!sidecar) throw std::runtime_error("cannot open trace sidecar " + sidecarPathFor(csv_path));
    nlohmann::json meta = nlohmann::json::parse(sidecar);

    VideoTrace trace;
    trace.file_id = meta.at("file_id").get<int>();
    trace.pixels_per_chunk = meta.at("pixels_per_chunk").get<std::int64_t>();
    trace.chunk_seconds = meta.at("chunk_seconds").get<double>();

    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open trace file " + csv_path);

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) traceError(csv_path, 1, "empty file");
    ++line_no;
    if (line == "chunk,mode,psnr_db,bits_per_pixel\r") line.pop_back();
    if (line != "chunk,mode,psnr_db,bits_per_pixel")
        traceError(csv_path, line_no, "bad header, expected 'chunk,mode,psnr_db,bits_per_pixel'");

    std::int64_t cur_chunk = -1;
    int expected_modes = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::stringstream ss(line);
        std::string f0, f1, f2, f3, extra;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') ||
            !std::getline(ss, f2, ',') || !std::getline(ss, f3, ','))
            traceError(csv_path, line_no, "expected 4 comma-separated fields");
        if (std::getline(ss, extra, ','))
            traceError(csv_path, line_no, "expected 4 comma-separated fields");

        std::int64_t chunk = parseInt(csv_path, line_no, f0);
        std::int64_t mode = parseInt(csv_path, line_no, f1);
        ChunkQualityEntry e;
        e.psnr_db = parseDouble(csv_path, line_no, f2);
        e.bits_per_pixel = parseDouble(csv_path, line_no, f3);
        e.total_bits = static_cast<double>(trace.pixels_per_chunk) * e.bits_per_pixel;

        if (chunk == cur_chunk + 1) {
            if (cur_chunk >= 0) {
                if (expected_modes < 0)
                    expected_modes = static_cast<int>(trace.chunks.back().size());
                else if (static_cast<int>(trace.chunks.back().size()) != expected_modes)
                    traceError(csv_path, line_no, "chunk " + std::to_string(cur_chunk) +
                                                      " has inconsistent mode count");
            }
            trace.chunks.emplace_back();
            cur_chunk = chunk;
        } else if (chunk != cur_chunk) {
            traceError(csv_path, line_no, "chunk index must advance by 1 (got " +
                                              std::to_string(chunk) + " after " +
                                              std::to_string(cur_chunk) + ")");
        }

        auto& entries = trace.chunks.back();
        if (mode != static_cast<std::int64_t>(entries.size()) + 1)
            traceError(csv_path, line_no, "mode index must be " +
                                              std::to_string(entries.size() + 1) + ", got " +
                                              std::to_string(mode));
        if (!(e.psnr_db > 0.0 && e.psnr_db < 100.0))
            traceError(csv_path, line_no, "psnr_db out of (0, 100)");
        if (!(e.bits_per_pixel > 0.0)) traceError(csv_path, line_no, "bits_per_pixel must be > 0");
        if (!entries.empty()) {
            if (!(e.bits_per_pixel > entries.back().bits_per_pixel))
                traceError(csv_path, line_no, "bits_per_pixel not strictly increasing within chunk");
            if (!(e.psnr_db > entries.back().psnr_db))
                traceError(csv_path, line_no, "psnr_db not strictly increasing with bits (dominated mode)");
        }
        entries.push_back(e);
    }
    if (trace.chunks.empty()) traceError(csv_path, line_no, "no data rows");
    if (expected_modes >= 0 &&
        static_cast<int>(trace.chunks.back().size()) != expected_modes)
        traceError(csv_path, line_no,
                   "last chunk has inconsistent mode count");
    trace.validate();
    return trace;
}

void saveTrace(const VideoTrace& trace, const std::string& csv_path) {
    trace.validate();

    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write trace file " + csv_path);
    out << "chunk,mode,psnr_db,bits_per_pixel\n";
    for (std::size_t c = 0; c < trace.chunks.size(); ++c)
        for (std::size_t q = 0; q < trace.chunks[c].size(); ++q) {
            const auto& e = trace.chunks[c][q];
            out << c << ',' << (q + 1) << ',' << formatDouble(e.psnr_db) << ','
                << formatDouble(e.bits_per_pixel) << '\n';
        }

    nlohmann::json meta;
    meta["file_id"] = trace.file_id;
    meta["pixels_per_chunk"] = trace.pixels_per_chunk;
    meta["chunk_seconds"] = trace.chunk_seconds;
    std::ofstream side(sidecarPathFor(csv_path));
    if (!side) throw std::runtime_error("cannot write trace sidecar " + sidecarPathFor(csv_path));
    side << meta.dump(2) << '\n';
}

VideoTrace generateSynthetic(std::int64_t num_chunks, int modes, std::uint64_t seed,
                             const RdParams& rd, int file_id) {
    if (modes < 1) throw std::invalid_argument("generateSynthetic: modes must be >= 1");
    if (num_chunks < 1) throw std::invalid_argument("generateSynthetic: num_chunks must be >= 1");
    if (!(rd.min_bitrate_bps > 0.0) || rd.max_bitrate_bps < rd.min_bitrate_bps)
        throw std::invalid_argument("generateSynthetic: bad bitrate range");

    std::vector<double> mean_rate(static_cast<std::size_t>(modes));
    for (int k = 0; k < modes; ++k) {
        double t = modes == 1 ? 0.0 : static_cast<double>(k) / (modes - 1);
        mean_rate[k] = rd.min_bitrate_bps * std::pow(rd.max_bitrate_bps / rd.min_bitrate_bps, t);
    }

    SimRng rng(seed);
    const double sig = rd.bits_jitter_sigma;
    const double sig_mode = sig / 3.0;

    VideoTrace trace;
    trace.file_id = file_id;
    trace.pixels_per_chunk = rd.pixels_per_chunk;
    trace.chunk_seconds = rd.chunk_seconds;
    trace.chunks.reserve(static_cast<std::size_t>(num_chunks));

    for (std::int64_t c = 0; c < num_chunks; ++c) {
        double z_scene = rng.normal();  // shared per-chunk complexity
        double z_psnr = rng.normal();
        std::vector<ChunkQualityEntry> entries(static_cast<std::size_t>(modes));
        for (int k = 0; k < modes; ++k) {
            double z_mode = rng.normal();
            double jitter = std::exp(sig * z_scene - 0.5 * sig * sig +
                                     sig_mode * z_mode - 0.5 * sig_mode * sig_mode);
            double bits = mean_rate[k] * rd.chunk_seconds * jitter;
            if (k > 0 && bits <= entries[k - 1].total_bits)
                bits = entries[k - 1].total_bits * 1.05;
            entries[k].total_bits = bits;
            entries[k].bits_per_pixel = bits / static_cast<double>(rd.pixels_per_chunk);
        }
        for (int k = 0; k < modes; ++k) {
            double psnr = rd.psnr_at_unit_bpp_db +
                          rd.psnr_per_octave_db * std::log2(entries[k].bits_per_pixel) +
                          rd.psnr_jitter_db * z_psnr;
            psnr = std::min(99.0, std::max(1.0, psnr));
            if (k > 0 && psnr <= entries[k - 1].psnr_db) psnr = entries[k - 1].psnr_db + 0.01;
            if (psnr >= 100.0)
                throw std::invalid_argument("generateSynthetic: rd params push psnr past 100 dB");
            entries[k].psnr_db = psnr;
        }
        trace.chunks.push_back(std::move(entries));
    }
    trace.validate();
    return trace;
}

}  // namespace d2d
