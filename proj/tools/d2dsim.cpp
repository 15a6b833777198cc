#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "d2d/mwis.hpp"
#include "d2d/sim.hpp"
#include "d2d/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json loadConfigDoc(const std::string& path, const std::vector<std::string>& sets) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    for (const auto& s : sets) d2d::applyConfigOverride(doc, s);
    return doc;
}

void writeFile(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

json metricsToJson(const d2d::RunOutput& out) {
    return json{{"expected_stalls", out.metrics.expected_stalls},
                {"avg_psnr_db", out.metrics.avg_psnr_db},
                {"mean_backlog_bits", out.metrics.mean_backlog_bits},
                {"total_stall_events", out.metrics.total_stall_events},
                {"chunks_placed", out.metrics.chunks_placed},
                {"links_finished", out.metrics.links_finished},
                {"invariant_violations", out.invariant_violations},
                {"conservation_error_bits", out.conservation_error_bits}};
}

int cmdRun(const std::string& cfg_path, const std::string& out_dir,
           const std::vector<std::string>& sets, bool slot_log) {
    d2d::RunConfig cfg = d2d::runConfigFromJson(loadConfigDoc(cfg_path, sets));
    fs::create_directories(out_dir);

    std::vector<d2d::SlotRecord> slots;
    d2d::RunOutput out = d2d::runSingle(cfg, slot_log ? &slots : nullptr);

    writeFile(fs::path(out_dir) / "metrics.json", metricsToJson(out).dump(2) + "\n");

    std::ostringstream csv;
    csv << "scheduler,seed,stalls,psnr_db,backlog_bits,stall_events,chunks_placed,"
           "links_finished\n"
        << d2d::schedulerKindName(cfg.scheduler.kind) << ',' << cfg.seed << ','
        << d2d::formatNum(out.metrics.expected_stalls) << ','
        << d2d::formatNum(out.metrics.avg_psnr_db) << ','
        << d2d::formatNum(out.metrics.mean_backlog_bits) << ','
        << out.metrics.total_stall_events << ',' << out.metrics.chunks_placed << ','
        << out.metrics.links_finished << '\n';
    writeFile(fs::path(out_dir) / "results.csv", csv.str());

    if (slot_log) {
        std::ostringstream sl;
        sl << "slot,link,backlog_bits,mu_bits,active\n";
        for (const auto& r : slots)
            sl << r.slot << ',' << r.link << ',' << d2d::formatNum(r.backlog_bits) << ','
               << d2d::formatNum(r.mu_bits) << ',' << r.active << '\n';
        writeFile(fs::path(out_dir) / "slots.csv", sl.str());
    }

    std::cout << "stalls " << d2d::formatNum(out.metrics.expected_stalls) << "  psnr "
              << d2d::formatNum(out.metrics.avg_psnr_db) << " dB  violations "
              << out.invariant_violations << '\n';
    return 0;
}

int cmdSweep(const std::string& cfg_path, const std::string& out_dir,
             const std::vector<std::string>& sets, const std::string& axis,
             const std::vector<double>& values, int reps, const std::string& plot, int workers) {
    d2d::SweepSpec spec;
    spec.base = d2d::runConfigFromJson(loadConfigDoc(cfg_path, sets));
    spec.axis = d2d::sweepAxisFromName(axis);
    spec.values = values;
    spec.repetitions = reps;
    spec.validate();

    std::vector<d2d::RunResult> results = d2d::runSweep(spec, workers);
    fs::create_directories(out_dir);

    std::ostringstream csv;
    d2d::writeResultsCsv(csv, spec.axis, results);
    writeFile(fs::path(out_dir) / "results.csv", csv.str());

    if (plot != "none") {
        d2d::PlotKind kind = plot == "stall_vs_pbt" ? d2d::PlotKind::StallVsPbt
                                                    : d2d::PlotKind::QualityVsStalls;
        std::ostringstream pd;
        d2d::emitPlotData(pd, results, kind);
        writeFile(fs::path(out_dir) / (plot + ".csv"), pd.str());
    }

    for (const auto& a : d2d::aggregate(results))
        std::cout << a.scheduler << ' ' << axis << '=' << d2d::formatNum(a.value) << "  stalls "
                  << d2d::formatNum(a.mean_stalls) << " +- " << d2d::formatNum(a.stalls_stderr)
                  << "  psnr " << d2d::formatNum(a.mean_psnr_db) << '\n';
    return 0;
}

int cmdGenTrace(const std::string& out_path, std::int64_t chunks, int modes, std::uint64_t seed,
                int file_id, std::int64_t pixels, double chunk_seconds, double min_bps,
                double max_bps) {
    d2d::RdParams rd;
    rd.pixels_per_chunk = pixels;
    rd.chunk_seconds = chunk_seconds;
    rd.min_bitrate_bps = min_bps;
    rd.max_bitrate_bps = max_bps;
    d2d::VideoTrace t = d2d::generateSynthetic(chunks, modes, seed, rd, file_id);
    d2d::saveTrace(t, out_path);
    std::cout << out_path << ": " << t.numChunks() << " chunks, " << t.modeCount() << " modes\n";
    return 0;
}

int cmdSolveMwis(const std::string& in_path, const std::string& method) {
    std::ifstream in(in_path);
    if (!in) throw std::invalid_argument("cannot open instance file " + in_path);
    std::stringstream buf;
    buf << in.rdbuf();
    d2d::MwisProblem p = d2d::mwisFromJson(buf.str());

    auto report = [&](const char* name, const d2d::MwisSolution& s) {
        json sel = json::array();
        for (std::size_t i = 0; i < s.selected.size(); ++i)
            if (s.selected[i]) sel.push_back(i);
        json row{{"method", name},
                 {"selected", sel},
                 {"total_weight", s.total_weight},
                 {"exact", s.exact}};
        std::cout << row.dump() << '\n';
    };

    if (method == "exact" || method == "all") report("exact", d2d::solveExact(p));
    if (method == "mp" || method == "all") report("mp", d2d::solveMessagePassing(p));
    if (method == "greedy" || method == "all") report("greedy", d2d::greedyBaseline(p));
    return 0;
}

int cmdValidateTrace(const std::vector<std::string>& paths) {
    for (const auto& p : paths) {
        d2d::VideoTrace t = d2d::loadTrace(p);
        std::cout << p << ": OK, " << t.numChunks() << " chunks, " << t.modeCount()
                  << " modes, " << t.pixels_per_chunk << " px/chunk\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D2D video delivery simulator"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir = ".";
    std::vector<std::string> sets;
    bool slot_log = false;

    CLI::App* run = app.add_subcommand("run", "Run one simulation from a JSON config");
    run->add_option("--config", cfg_path, "Config JSON path")->required();
    run->add_option("--out", out_dir, "Output directory (metrics.json, results.csv)");
    run->add_option("--set", sets, "Override a config field, dotted.path=value");
    run->add_flag("--slot-log", slot_log, "Also write per-slot slots.csv");

    std::string axis = "pbt", plot = "none";
    std::vector<double> values;
    int reps = 1, workers = 0;

    CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep->add_option("--config", cfg_path, "Base config JSON path")->required();
    sweep->add_option("--axis", axis, "Sweep axis: pbt, alpha or seed")
        ->check(CLI::IsMember({"pbt", "alpha", "seed"}));
    sweep->add_option("--values", values, "Axis values")->required()->delimiter(',');
    sweep->add_option("--reps", reps, "Repetitions (seeds) per value");
    sweep->add_option("--out", out_dir, "Output directory (results.csv)");
    sweep->add_option("--set", sets, "Override a config field, dotted.path=value");
    sweep->add_option("--plot", plot, "Also emit plot data")
        ->check(CLI::IsMember({"none", "stall_vs_pbt", "quality_vs_stalls"}));
    sweep->add_option("--workers", workers, "Worker threads (default: D2DSIM_WORKERS or cores)");

    std::string trace_out = "trace.csv";
    std::int64_t chunks = 400, pixels = 13824000;
    int modes = 4, file_id = 0;
    std::uint64_t seed = 1;
    double chunk_seconds = 0.5, min_bps = 5.0e5, max_bps = 8.0e6;

    CLI::App* gen = app.add_subcommand("gen-trace", "Generate a synthetic video trace");
    gen->add_option("--out", trace_out, "Output CSV path (sidecar written next to it)");
    gen->add_option("--chunks", chunks, "Number of chunks");
    gen->add_option("--modes", modes, "Quality modes per chunk");
    gen->add_option("--seed", seed, "Generator seed");
    gen->add_option("--file-id", file_id, "File id for the sidecar");
    gen->add_option("--pixels-per-chunk", pixels, "Pixels per chunk");
    gen->add_option("--chunk-seconds", chunk_seconds, "Chunk duration");
    gen->add_option("--min-bitrate", min_bps, "Lowest mode mean bitrate, bits/s");
    gen->add_option("--max-bitrate", max_bps, "Highest mode mean bitrate, bits/s");

    std::string mwis_in, method = "all";
    CLI::App* solve = app.add_subcommand("solve-mwis", "Solve a dumped scheduling instance");
    solve->add_option("--in", mwis_in, "Instance JSON path")->required();
    solve->add_option("--method", method, "exact, mp, greedy or all")
        ->check(CLI::IsMember({"exact", "mp", "greedy", "all"}));

    std::vector<std::string> trace_paths;
    CLI::App* validate = app.add_subcommand("validate-trace", "Check trace files");
    validate->add_option("paths", trace_paths, "Trace CSV paths")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmdRun(cfg_path, out_dir, sets, slot_log);
        if (sweep->parsed())
            return cmdSweep(cfg_path, out_dir, sets, axis, values, reps, plot, workers);
        if (gen->parsed())
            return cmdGenTrace(trace_out, chunks, modes, seed, file_id, pixels, chunk_seconds,
                               min_bps, max_bps);
        if (solve->parsed()) return cmdSolveMwis(mwis_in, method);
        if (validate->parsed()) return cmdValidateTrace(trace_paths);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validate->parsed() ? 2 : 3;
    }
    return 0;
}
