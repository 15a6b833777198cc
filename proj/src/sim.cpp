#include "d2d/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "d2d/schedulers.hpp"

namespace d2d {

using nlohmann::json;

namespace {

[[noreturn]] void cfgError(const std::string& path, const std::string& what) {
    throw std::invalid_argument(path + ": " + what);
}

const json* findKey(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

std::string joinPath(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void checkKeys(const json& j, const std::string& path,
               std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) cfgError(joinPath(path, it.key()), "unknown field");
    }
}

const json* section(const json& j, const std::string& path, const char* key) {
    const json* v = findKey(j, key);
    if (v && !v->is_object()) cfgError(joinPath(path, key), "expected an object");
    return v;
}

double numField(const json& j, const std::string& path, const char* key, double def) {
    const json* v = findKey(j, key);
    if (!v) return def;
    if (!v->is_number()) cfgError(joinPath(path, key), "expected a number");
    return v->get<double>();
}

std::int64_t intField(const json& j, const std::string& path, const char* key, std::int64_t def) {
    const json* v = findKey(j, key);
    if (!v) return def;
    if (!v->is_number_integer()) cfgError(joinPath(path, key), "expected an integer");
    return v->get<std::int64_t>();
}

std::uint64_t seedField(const json& j, const std::string& path, const char* key,
                        std::uint64_t def) {
    const json* v = findKey(j, key);
    if (!v) return def;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v->get<std::int64_t>());
    cfgError(joinPath(path, key), "expected a non-negative integer");
}

std::string strField(const json& j, const std::string& path, const char* key,
                     const std::string& def) {
    const json* v = findKey(j, key);
    if (!v) return def;
    if (!v->is_string()) cfgError(joinPath(path, key), "expected a string");
    return v->get<std::string>();
}

bool boolField(const json& j, const std::string& path, const char* key, bool def) {
    const json* v = findKey(j, key);
    if (!v) return def;
    if (!v->is_boolean()) cfgError(joinPath(path, key), "expected a boolean");
    return v->get<bool>();
}

double sampleStderr(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double var = ss / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

void TraceSpec::validate() const {
    if (synthetic) {
        if (num_chunks < 1) cfgError("traces.num_chunks", "must be >= 1");
        if (modes < 0) cfgError("traces.modes", "must be >= 0 (0 uses streaming.quality_modes)");
    } else if (paths.empty()) {
        cfgError("traces.paths", "at least one trace file required");
    }
}

std::int64_t RunConfig::numSlots() const {
    return static_cast<std::int64_t>(duration_s / timing.slot_seconds + 1e-9);
}

void RunConfig::validate() const {
    topology.validate();
    radio.validate();
    timing.validate();
    streaming.validate();
    traces.validate();
    if (scheduler.mwis.max_iters < 1) cfgError("scheduler.mwis.max_iters", "must be >= 1");
    if (!(scheduler.mwis.damping >= 0.0 && scheduler.mwis.damping < 1.0))
        cfgError("scheduler.mwis.damping", "must be in [0, 1)");
    if (!(scheduler.mwis.tol > 0.0)) cfgError("scheduler.mwis.tol", "must be positive");
    if (!(pbt_seconds >= 0.0)) cfgError("pbt_seconds", "must be non-negative");
    if (!(duration_s >= pbt_seconds)) cfgError("duration_s", "must be >= pbt_seconds");
}

RunConfig runConfigFromJson(const json& doc) {
    if (!doc.is_object()) cfgError("config", "expected a JSON object");
    checkKeys(doc, "", {"seed", "duration_s", "pbt_seconds", "scheduler", "topology", "radio",
                        "timing", "streaming", "traces"});
    RunConfig cfg;
    cfg.seed = seedField(doc, "", "seed", cfg.seed);
    cfg.duration_s = numField(doc, "", "duration_s", cfg.duration_s);
    cfg.pbt_seconds = numField(doc, "", "pbt_seconds", cfg.pbt_seconds);

    if (const json* s = section(doc, "", "scheduler")) {
        checkKeys(*s, "scheduler", {"kind", "mwis", "ignore_yielding"});
        std::string kind = strField(*s, "scheduler", "kind",
                                    schedulerKindName(cfg.scheduler.kind));
        try {
            cfg.scheduler.kind = schedulerKindFromName(kind);
        } catch (const std::exception& e) {
            cfgError("scheduler.kind", e.what());
        }
        cfg.scheduler.random_ignore_yielding =
            boolField(*s, "scheduler", "ignore_yielding", cfg.scheduler.random_ignore_yielding);
        if (const json* m = section(*s, "scheduler", "mwis")) {
            checkKeys(*m, "scheduler.mwis", {"max_iters", "damping", "tol"});
            cfg.scheduler.mwis.max_iters = static_cast<int>(
                intField(*m, "scheduler.mwis", "max_iters", cfg.scheduler.mwis.max_iters));
            cfg.scheduler.mwis.damping =
                numField(*m, "scheduler.mwis", "damping", cfg.scheduler.mwis.damping);
            cfg.scheduler.mwis.tol = numField(*m, "scheduler.mwis", "tol", cfg.scheduler.mwis.tol);
        }
    }

    if (const json* t = section(doc, "", "topology")) {
        checkKeys(*t, "topology",
                  {"cell_side_m", "num_links", "max_d2d_distance_m", "pathloss_exponent",
                   "pathloss_ref_gain", "fading", "seed"});
        cfg.topology.cell_side_m = numField(*t, "topology", "cell_side_m",
                                            cfg.topology.cell_side_m);
        cfg.topology.num_links =
            static_cast<int>(intField(*t, "topology", "num_links", cfg.topology.num_links));
        cfg.topology.max_d2d_distance_m =
            numField(*t, "topology", "max_d2d_distance_m", cfg.topology.max_d2d_distance_m);
        cfg.topology.pathloss_exponent =
            numField(*t, "topology", "pathloss_exponent", cfg.topology.pathloss_exponent);
        cfg.topology.pathloss_ref_gain =
            numField(*t, "topology", "pathloss_ref_gain", cfg.topology.pathloss_ref_gain);
        std::string fading = strField(*t, "topology", "fading",
                                      fadingKindName(cfg.topology.fading));
        try {
            cfg.topology.fading = fadingKindFromName(fading);
        } catch (const std::exception& e) {
            cfgError("topology.fading", e.what());
        }
        cfg.topology.seed = seedField(*t, "topology", "seed", 0);
    } else {
        cfg.topology.seed = 0;  // derive from the run seed unless pinned
    }

    if (const json* r = section(doc, "", "radio")) {
        checkKeys(*r, "radio",
                  {"tx_power_w", "noise_power_w", "interference_threshold_db", "bandwidth_hz"});
        cfg.radio.tx_power_w = numField(*r, "radio", "tx_power_w", cfg.radio.tx_power_w);
        cfg.radio.noise_power_w = numField(*r, "radio", "noise_power_w", cfg.radio.noise_power_w);
        cfg.radio.interference_threshold_db = numField(
            *r, "radio", "interference_threshold_db", cfg.radio.interference_threshold_db);
        cfg.radio.bandwidth_hz = numField(*r, "radio", "bandwidth_hz", cfg.radio.bandwidth_hz);
    }

    if (const json* t = section(doc, "", "timing")) {
        checkKeys(*t, "timing", {"slot_seconds", "chunk_seconds"});
        cfg.timing.slot_seconds = numField(*t, "timing", "slot_seconds", cfg.timing.slot_seconds);
        cfg.timing.chunk_seconds =
            numField(*t, "timing", "chunk_seconds", cfg.timing.chunk_seconds);
    }

    if (const json* s = section(doc, "", "streaming")) {
        checkKeys(*s, "streaming", {"alpha", "quality_modes"});
        cfg.streaming.alpha = numField(*s, "streaming", "alpha", cfg.streaming.alpha);
        cfg.streaming.quality_modes = static_cast<int>(
            intField(*s, "streaming", "quality_modes", cfg.streaming.quality_modes));
    }

    if (const json* t = section(doc, "", "traces")) {
        checkKeys(*t, "traces",
                  {"kind", "num_chunks", "modes", "seed", "paths", "rd"});
        std::string kind = strField(*t, "traces", "kind", "synthetic");
        if (kind == "synthetic") {
            cfg.traces.synthetic = true;
        } else if (kind == "files") {
            cfg.traces.synthetic = false;
        } else {
            cfgError("traces.kind", "expected \"synthetic\" or \"files\"");
        }
        cfg.traces.num_chunks = intField(*t, "traces", "num_chunks", cfg.traces.num_chunks);
        cfg.traces.modes = static_cast<int>(intField(*t, "traces", "modes", cfg.traces.modes));
        cfg.traces.seed = seedField(*t, "traces", "seed", cfg.traces.seed);
        if (const json* p = findKey(*t, "paths")) {
            if (!p->is_array()) cfgError("traces.paths", "expected an array of strings");
            for (const auto& e : *p) {
                if (!e.is_string()) cfgError("traces.paths", "expected an array of strings");
                cfg.traces.paths.push_back(e.get<std::string>());
            }
        }
        if (const json* r = section(*t, "traces", "rd")) {
            checkKeys(*r, "traces.rd",
                      {"pixels_per_chunk", "chunk_seconds", "min_bitrate_bps", "max_bitrate_bps",
                       "psnr_at_unit_bpp_db", "psnr_per_octave_db", "psnr_jitter_db",
                       "bits_jitter_sigma"});
            RdParams& rd = cfg.traces.rd;
            rd.pixels_per_chunk =
                intField(*r, "traces.rd", "pixels_per_chunk", rd.pixels_per_chunk);
            rd.chunk_seconds = numField(*r, "traces.rd", "chunk_seconds", rd.chunk_seconds);
            rd.min_bitrate_bps = numField(*r, "traces.rd", "min_bitrate_bps", rd.min_bitrate_bps);
            rd.max_bitrate_bps = numField(*r, "traces.rd", "max_bitrate_bps", rd.max_bitrate_bps);
            rd.psnr_at_unit_bpp_db =
                numField(*r, "traces.rd", "psnr_at_unit_bpp_db", rd.psnr_at_unit_bpp_db);
            rd.psnr_per_octave_db =
                numField(*r, "traces.rd", "psnr_per_octave_db", rd.psnr_per_octave_db);
            rd.psnr_jitter_db = numField(*r, "traces.rd", "psnr_jitter_db", rd.psnr_jitter_db);
            rd.bits_jitter_sigma =
                numField(*r, "traces.rd", "bits_jitter_sigma", rd.bits_jitter_sigma);
        }
    } else {
        cfg.traces.seed = 0;
    }

    cfg.validate();
    return cfg;
}

json runConfigToJson(const RunConfig& cfg) {
    json doc;
    doc["seed"] = cfg.seed;
    doc["duration_s"] = cfg.duration_s;
    doc["pbt_seconds"] = cfg.pbt_seconds;
    doc["scheduler"] = {{"kind", schedulerKindName(cfg.scheduler.kind)},
                        {"ignore_yielding", cfg.scheduler.random_ignore_yielding},
                        {"mwis",
                         {{"max_iters", cfg.scheduler.mwis.max_iters},
                          {"damping", cfg.scheduler.mwis.damping},
                          {"tol", cfg.scheduler.mwis.tol}}}};
    doc["topology"] = {{"cell_side_m", cfg.topology.cell_side_m},
                       {"num_links", cfg.topology.num_links},
                       {"max_d2d_distance_m", cfg.topology.max_d2d_distance_m},
                       {"pathloss_exponent", cfg.topology.pathloss_exponent},
                       {"pathloss_ref_gain", cfg.topology.pathloss_ref_gain},
                       {"fading", fadingKindName(cfg.topology.fading)},
                       {"seed", cfg.topology.seed}};
    doc["radio"] = {{"tx_power_w", cfg.radio.tx_power_w},
                    {"noise_power_w", cfg.radio.noise_power_w},
                    {"interference_threshold_db", cfg.radio.interference_threshold_db},
                    {"bandwidth_hz", cfg.radio.bandwidth_hz}};
    doc["timing"] = {{"slot_seconds", cfg.timing.slot_seconds},
                     {"chunk_seconds", cfg.timing.chunk_seconds}};
    doc["streaming"] = {{"alpha", cfg.streaming.alpha},
                        {"quality_modes", cfg.streaming.quality_modes}};
    json traces = {{"kind", cfg.traces.synthetic ? "synthetic" : "files"},
                   {"num_chunks", cfg.traces.num_chunks},
                   {"modes", cfg.traces.modes},
                   {"seed", cfg.traces.seed},
                   {"rd",
                    {{"pixels_per_chunk", cfg.traces.rd.pixels_per_chunk},
                     {"chunk_seconds", cfg.traces.rd.chunk_seconds},
                     {"min_bitrate_bps", cfg.traces.rd.min_bitrate_bps},
                     {"max_bitrate_bps", cfg.traces.rd.max_bitrate_bps},
                     {"psnr_at_unit_bpp_db", cfg.traces.rd.psnr_at_unit_bpp_db},
                     {"psnr_per_octave_db", cfg.traces.rd.psnr_per_octave_db},
                     {"psnr_jitter_db", cfg.traces.rd.psnr_jitter_db},
                     {"bits_jitter_sigma", cfg.traces.rd.bits_jitter_sigma}}}};
    if (!cfg.traces.paths.empty()) traces["paths"] = cfg.traces.paths;
    doc["traces"] = traces;
    return doc;
}

void applyConfigOverride(json& doc, const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("--set expects path=value, got: " + assignment);
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare words stay strings
    }
    json* cur = &doc;
    std::size_t pos = 0;
    for (;;) {
        std::size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (key.empty()) throw std::invalid_argument("--set path has an empty segment: " + path);
        if (dot == std::string::npos) {
            (*cur)[key] = parsed;
            return;
        }
        json& next = (*cur)[key];
        if (!next.is_object() && !next.is_null())
            throw std::invalid_argument("--set path crosses a non-object field: " + key);
        cur = &next;
        pos = dot + 1;
    }
}

RunOutput runSingle(const RunConfig& cfg, std::vector<SlotRecord>* slot_log) {
    cfg.validate();

    TopologyConfig topo = cfg.topology;
    if (topo.seed == 0) topo.seed = deriveSeed(cfg.seed, 1);
    auto [links, gains] = generateTopology(topo);
    const int n = links.size();

    std::vector<VideoTrace> owned;
    if (cfg.traces.synthetic) {
        std::uint64_t tseed = cfg.traces.seed != 0 ? cfg.traces.seed : deriveSeed(cfg.seed, 2);
        int modes = cfg.traces.modes > 0 ? cfg.traces.modes : cfg.streaming.quality_modes;
        owned.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            owned.push_back(generateSynthetic(cfg.traces.num_chunks, modes,
                                              deriveSeed(tseed, static_cast<std::uint64_t>(i)),
                                              cfg.traces.rd, i));
    } else {
        owned.reserve(cfg.traces.paths.size());
        for (const auto& p : cfg.traces.paths) owned.push_back(loadTrace(p));
    }
    std::vector<const VideoTrace*> per_link(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        per_link[static_cast<std::size_t>(i)] =
            &owned[static_cast<std::size_t>(i) % owned.size()];

    SimEngine engine(std::move(links), std::move(gains), cfg.radio, cfg.timing, cfg.streaming,
                     cfg.scheduler, per_link, cfg.pbt_seconds, cfg.topology.fading,
                     deriveSeed(cfg.seed, 3));
    if (slot_log) engine.enableSlotLog(slot_log);
    engine.run(cfg.numSlots());

    RunOutput out;
    out.metrics = engine.metrics();
    out.invariant_violations = engine.invariantViolations();
    out.conservation_error_bits = engine.conservationError();
    return out;
}

std::string sweepAxisName(SweepAxis a) {
    switch (a) {
        case SweepAxis::Pbt: return "pbt";
        case SweepAxis::Alpha: return "alpha";
        case SweepAxis::Seed: return "seed";
    }
    return "?";
}

SweepAxis sweepAxisFromName(const std::string& name) {
    if (name == "pbt") return SweepAxis::Pbt;
    if (name == "alpha") return SweepAxis::Alpha;
    if (name == "seed") return SweepAxis::Seed;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

void SweepSpec::validate() const {
    base.validate();
    if (values.empty()) cfgError("sweep.values", "must be non-empty");
    if (repetitions < 1) cfgError("sweep.repetitions", "must be >= 1");
    for (double v : values) {
        if (!std::isfinite(v)) cfgError("sweep.values", "must be finite");
        if (axis == SweepAxis::Seed && v < 0) cfgError("sweep.values", "seeds must be >= 0");
    }
}

RunConfig configForSweepPoint(const SweepSpec& spec, std::size_t value_index, int rep) {
    RunConfig cfg = spec.base;
    double v = spec.values[value_index];
    std::uint64_t master = spec.base.seed;
    switch (spec.axis) {
        case SweepAxis::Pbt:
            cfg.pbt_seconds = v;
            if (cfg.duration_s < v) cfg.duration_s = v;
            break;
        case SweepAxis::Alpha:
            cfg.streaming.alpha = v;
            break;
        case SweepAxis::Seed:
            master = static_cast<std::uint64_t>(std::llround(v));
            break;
    }
    // Repetition r keeps one seed across all axis values so points are
    // paired per seed; rep 0 is the master itself (reps=1 == run_single).
    cfg.seed = rep == 0 ? master : deriveSeed(master, static_cast<std::uint64_t>(rep));
    return cfg;
}

int workerCap() {
    if (const char* env = std::getenv("D2DSIM_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

std::vector<RunResult> runSweep(const SweepSpec& spec, int workers) {
    spec.validate();
    const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
    const std::size_t total = spec.values.size() * reps;
    std::vector<RunResult> results(total);

    if (workers <= 0) workers = workerCap();
    if (static_cast<std::size_t>(workers) > total) workers = static_cast<int>(total);
    if (workers < 1) workers = 1;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::size_t err_index = total;
    std::string err_msg;

    auto work = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= total || failed.load()) return;
            std::size_t vi = k / reps;
            int rep = static_cast<int>(k % reps);
            RunConfig cfg = configForSweepPoint(spec, vi, rep);
            try {
                RunOutput out = runSingle(cfg);
                RunResult& r = results[k];
                r.run_index = static_cast<int>(k);
                r.scheduler = schedulerKindName(cfg.scheduler.kind);
                r.value = spec.values[vi];
                r.rep = rep;
                r.seed = cfg.seed;
                r.metrics = out.metrics;
                r.invariant_violations = out.invariant_violations;
                r.conservation_error_bits = out.conservation_error_bits;
            } catch (const std::exception& e) {
                std::scoped_lock lock(err_mu);
                if (k < err_index) {
                    err_index = k;
                    err_msg = std::string(e.what()) + "\nconfig:\n" + runConfigToJson(cfg).dump(2);
                }
                failed.store(true);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    if (err_index < total)
        throw std::runtime_error("sweep run " + std::to_string(err_index) + " failed: " + err_msg);
    return results;
}

std::vector<AggregatePoint> aggregate(const std::vector<RunResult>& results) {
    std::vector<AggregatePoint> points;
    std::vector<std::vector<double>> stalls, psnrs, backlogs;
    for (const auto& r : results) {
        std::size_t p = 0;
        for (; p < points.size(); ++p)
            if (points[p].scheduler == r.scheduler && points[p].value == r.value) break;
        if (p == points.size()) {
            points.push_back({r.scheduler, r.value, 0, 0, 0, 0, 0, 0});
            stalls.emplace_back();
            psnrs.emplace_back();
            backlogs.emplace_back();
        }
        stalls[p].push_back(r.metrics.expected_stalls);
        psnrs[p].push_back(r.metrics.avg_psnr_db);
        backlogs[p].push_back(r.metrics.mean_backlog_bits);
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
        AggregatePoint& a = points[p];
        a.count = static_cast<int>(stalls[p].size());
        double n = static_cast<double>(a.count);
        for (double x : stalls[p]) a.mean_stalls += x;
        for (double x : psnrs[p]) a.mean_psnr_db += x;
        for (double x : backlogs[p]) a.mean_backlog_bits += x;
        a.mean_stalls /= n;
        a.mean_psnr_db /= n;
        a.mean_backlog_bits /= n;
        a.stalls_stderr = sampleStderr(stalls[p], a.mean_stalls);
        a.psnr_stderr = sampleStderr(psnrs[p], a.mean_psnr_db);
    }
    return points;
}

std::string formatNum(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void writeResultsCsv(std::ostream& out, SweepAxis axis, const std::vector<RunResult>& results) {
    const std::string axis_name = sweepAxisName(axis);
    out << "row_type,scheduler,axis,value,rep,seed,stalls,stalls_stderr,psnr_db,psnr_stderr,"
           "backlog_bits,stall_events,chunks_placed,links_finished\n";
    for (const auto& r : results) {
        out << "run," << r.scheduler << ',' << axis_name << ',' << formatNum(r.value) << ','
            << r.rep << ',' << r.seed << ',' << formatNum(r.metrics.expected_stalls) << ",,"
            << formatNum(r.metrics.avg_psnr_db) << ",," << formatNum(r.metrics.mean_backlog_bits)
            << ',' << r.metrics.total_stall_events << ',' << r.metrics.chunks_placed << ','
            << r.metrics.links_finished << '\n';
    }
    for (const auto& a : aggregate(results)) {
        out << "aggregate," << a.scheduler << ',' << axis_name << ',' << formatNum(a.value) << ','
            << a.count << ",," << formatNum(a.mean_stalls) << ',' << formatNum(a.stalls_stderr)
            << ',' << formatNum(a.mean_psnr_db) << ',' << formatNum(a.psnr_stderr) << ','
            << formatNum(a.mean_backlog_bits) << ",,,\n";
    }
}

void emitPlotData(std::ostream& out, const std::vector<RunResult>& results, PlotKind kind) {
    if (results.empty()) throw std::runtime_error("emitPlotData: no results to plot");
    std::vector<AggregatePoint> points = aggregate(results);
    std::stable_sort(points.begin(), points.end(),
                     [](const AggregatePoint& a, const AggregatePoint& b) {
                         if (a.scheduler != b.scheduler) return a.scheduler < b.scheduler;
                         return a.value < b.value;
                     });
    switch (kind) {
        case PlotKind::StallVsPbt:
            out << "scheduler,pbt,mean_stalls,stderr\n";
            for (const auto& p : points)
                out << p.scheduler << ',' << formatNum(p.value) << ','
                    << formatNum(p.mean_stalls) << ',' << formatNum(p.stalls_stderr) << '\n';
            break;
        case PlotKind::QualityVsStalls:
            out << "scheduler,alpha,mean_stalls,mean_psnr_db\n";
            for (const auto& p : points)
                out << p.scheduler << ',' << formatNum(p.value) << ','
                    << formatNum(p.mean_stalls) << ',' << formatNum(p.mean_psnr_db) << '\n';
            break;
    }
}

}  // namespace d2d
