#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "d2d/core.hpp"
#include "d2d/streaming.hpp"
#include "d2d/topology.hpp"
#include "d2d/trace.hpp"

namespace d2d {

// Where chunk quality tables come from: CSV files (assigned to links round
// robin) or the synthetic generator. Seed 0 means "derive from the run seed".
struct TraceSpec {
    bool synthetic = true;
    std::int64_t num_chunks = 400;
    int modes = 4;
    std::uint64_t seed = 0;
    RdParams rd;
    std::vector<std::string> paths;

    void validate() const;
};

struct RunConfig {
    TopologyConfig topology;
    RadioParams radio;
    TimingConfig timing;
    StreamingConfig streaming;
    SchedulerSpec scheduler;
    TraceSpec traces;
    double pbt_seconds = 8.0;
    double duration_s = 200.0;
    std::uint64_t seed = 1;

    std::int64_t numSlots() const;
    void validate() const;
};

RunConfig runConfigFromJson(const nlohmann::json& doc);
nlohmann::json runConfigToJson(const RunConfig& cfg);

// Applies one "dotted.path=value" override onto a config document. The value
// is parsed as JSON when possible and kept as a string otherwise.
void applyConfigOverride(nlohmann::json& doc, const std::string& assignment);

struct RunOutput {
    RunMetrics metrics;
    std::int64_t invariant_violations = 0;
    double conservation_error_bits = 0.0;
};

// One full simulation: topology, traces, engine, metrics. Deterministic in
// cfg. Sub-streams (topology, traces, slot dynamics) are derived from
// cfg.seed so distinct runs never share RNG state.
RunOutput runSingle(const RunConfig& cfg, std::vector<SlotRecord>* slot_log = nullptr);

enum class SweepAxis { Pbt, Alpha, Seed };

std::string sweepAxisName(SweepAxis a);
SweepAxis sweepAxisFromName(const std::string& name);

struct SweepSpec {
    RunConfig base;
    SweepAxis axis = SweepAxis::Pbt;
    std::vector<double> values;
    int repetitions = 1;

    void validate() const;
};

struct RunResult {
    int run_index = 0;
    std::string scheduler;
    double value = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    RunMetrics metrics;
    std::int64_t invariant_violations = 0;
    double conservation_error_bits = 0.0;
};

// Axis value and per-repetition seed applied to a copy of the base config.
// Repetition r reuses the same seed across axis values so sweep points are
// paired (the per-seed stall monotonicity in PBT depends on this).
RunConfig configForSweepPoint(const SweepSpec& spec, std::size_t value_index, int rep);

// Runs every (value x repetition) combination on a worker pool and returns
// results ordered by run index. workers <= 0 picks the D2DSIM_WORKERS env
// var, then hardware concurrency. A failing run aborts the sweep; the thrown
// message echoes the offending config.
std::vector<RunResult> runSweep(const SweepSpec& spec, int workers = 0);

struct AggregatePoint {
    std::string scheduler;
    double value = 0.0;
    int count = 0;
    double mean_stalls = 0.0;
    double stalls_stderr = 0.0;
    double mean_psnr_db = 0.0;
    double psnr_stderr = 0.0;
    double mean_backlog_bits = 0.0;
};

// Mean and standard error per (scheduler, axis value), in first-seen order.
std::vector<AggregatePoint> aggregate(const std::vector<RunResult>& results);

// Per-run rows followed by per-point aggregate rows. All floats use nine
// significant digits so reruns are byte-identical.
void writeResultsCsv(std::ostream& out, SweepAxis axis, const std::vector<RunResult>& results);

enum class PlotKind { StallVsPbt, QualityVsStalls };

// Tidy plot-ready CSV, one series per scheduler, sorted by scheduler then x.
// Empty input is an error.
void emitPlotData(std::ostream& out, const std::vector<RunResult>& results, PlotKind kind);

// Shortest of fixed/scientific at nine significant digits.
std::string formatNum(double v);

int workerCap();

}  // namespace d2d
