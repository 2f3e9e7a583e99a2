// ebvs command line: simulate closed-loop trials, replay recorded streams
// through the perception stack, run the corner detector over event files,
// render heat maps, and batch trial suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ebvs/event_io.hpp"
#include "ebvs/pipeline.hpp"
#include "ebvs/trial.hpp"

namespace fs = std::filesystem;
using namespace ebvs;

namespace {

std::uint64_t seed_override(std::uint64_t config_seed) {
    if (const char* env = std::getenv("EBVS_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return config_seed;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& record_path,
                 const std::string& trace_dir) {
    TrialConfig cfg = trial_config_from_json_file(config_path);
    cfg.seed = seed_override(cfg.seed);

    std::ofstream record, trace, phases, corners;
    TrialSinks sinks;
    if (!record_path.empty()) {
        record = open_out(record_path);
        sinks.record = &record;
    }
    if (!trace_dir.empty()) {
        fs::create_directories(trace_dir);
        trace = open_out(trace_dir + "/perception_trace.csv");
        phases = open_out(trace_dir + "/phase_log.csv");
        corners = open_out(trace_dir + "/corner_events.v1");
        write_event_header(corners, cfg.camera.width, cfg.camera.height);
        sinks.perception_trace = &trace;
        sinks.phase_log = &phases;
        sinks.corner_events = &corners;
    }

    const TrialMetrics m = run_trial(cfg, sinks);
    std::cout << "trial " << cfg.name << ": " << (m.success ? "success" : "failure")
              << "\n  e_grasp " << m.e_grasp_mm << " mm (" << m.e_grasp_px << " px)"
              << "\n  N_switch " << m.n_switch << "\n  sim time " << m.sim_time_s << " s"
              << "\n  events " << m.events_in << ", corner events " << m.corner_events
              << "\n";
    return m.success ? 0 : 1;
}

int cmd_replay(const std::string& events_path, const std::string& config_path,
               const std::string& trace_dir) {
    TrialConfig cfg = trial_config_from_json_file(config_path);
    const EventFile file = read_event_file(events_path);
    if (file.width != cfg.camera.width || file.height != cfg.camera.height) {
        throw std::runtime_error("event file sensor size does not match the config");
    }

    PerceptionPipeline pipe(file.width, file.height, cfg.pipeline);
    std::ofstream trace, corners;
    if (!trace_dir.empty()) {
        fs::create_directories(trace_dir);
        trace = open_out(trace_dir + "/perception_trace.csv");
        corners = open_out(trace_dir + "/corner_events.v1");
        write_event_header(corners, file.width, file.height);
        pipe.set_trace_sink(&trace);
        pipe.set_corner_sink(&corners);
    }
    for (const Event& e : file.events) pipe.feed(e);
    std::cout << "replayed " << pipe.events_in() << " events, " << pipe.corner_events()
              << " corner events, " << pipe.tracking_losses() << " tracking losses\n";
    return 0;
}

int cmd_detect(const std::string& events_path, const std::string& out_path) {
    const EventFile file = read_event_file(events_path);
    HarrisConfig harris;
    harris.build();
    TimeSurface sae(file.width, file.height, SurfaceLayer::SAE);

    std::ofstream out = open_out(out_path);
    write_event_header(out, file.width, file.height);
    std::uint64_t corners = 0;
    for (const Event& e : file.events) {
        sae.apply(e);
        if (classify_event(sae, e, harris) == EventClass::Corner) {
            ++corners;
            write_event_line(out, e);
        }
    }
    const double rate = file.events.empty()
        ? 0.0
        : static_cast<double>(corners) / static_cast<double>(file.events.size());
    std::cout << "events in: " << file.events.size() << "\ncorners out: " << corners
              << "\ncorner rate: " << rate << "\n";
    return 0;
}

int cmd_heatmap(const std::string& corners_path, const std::string& pgm_path,
                const std::string& peaks_path) {
    const EventFile file = read_event_file(corners_path);
    HeatMapConfig cfg;
    CornerHeatMap map(file.width, file.height, cfg);
    for (const Event& e : file.events) map.deposit(e.u, e.v, e.t);

    // Map rendered as an ASCII portable graymap, normalized to the maximum.
    std::ofstream pgm = open_out(pgm_path);
    pgm << "P2\n" << file.width << " " << file.height << "\n255\n";
    const double gmax = map.max_value();
    for (int y = 0; y < file.height; ++y) {
        for (int x = 0; x < file.width; ++x) {
            const int v = gmax > 0.0 ? static_cast<int>(255.0 * map.at(x, y) / gmax) : 0;
            pgm << v << (x + 1 == file.width ? "\n" : " ");
        }
    }

    std::ofstream peaks = open_out(peaks_path);
    peaks << "x,y,value\n";
    for (const auto& p : map.extract_peaks().peaks) {
        peaks << p.x << ',' << p.y << ',' << p.value << '\n';
    }
    std::cout << "deposited " << file.events.size() << " corner events, "
              << map.extract_peaks().size() << " peaks\n";
    return 0;
}

int cmd_suite(const std::string& config_dir) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(config_dir)) {
        if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw std::runtime_error("no .json configs in " + config_dir);

    std::vector<TrialConfig> configs;
    for (const auto& p : paths) {
        TrialConfig cfg = trial_config_from_json_file(p.string());
        cfg.seed = seed_override(cfg.seed);
        if (cfg.name == "trial") cfg.name = p.stem().string();
        configs.push_back(std::move(cfg));
    }
    const SuiteSummary summary = run_suite(configs);
    print_suite_table(std::cout, summary);
    return summary.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-based visual servoing simulator"};
    app.require_subcommand(1);

    std::string config_path, events_path, record_path, trace_dir, config_dir;
    std::string out_path = "corners.v1";
    std::string pgm_path = "heatmap.pgm";
    std::string peaks_path = "peaks.csv";

    auto* sim = app.add_subcommand("simulate", "run one closed-loop trial");
    sim->add_option("--config", config_path, "trial config (json)")->required();
    sim->add_option("--record", record_path, "write the generated event stream (v1)");
    sim->add_option("--trace-dir", trace_dir, "write perception/phase traces here");

    auto* rep = app.add_subcommand("replay", "feed a recorded stream to the perception stack");
    rep->add_option("--events", events_path, "v1 event file")->required();
    rep->add_option("--config", config_path, "trial config (json)")->required();
    rep->add_option("--trace-dir", trace_dir, "write perception traces here");

    auto* det = app.add_subcommand("detect", "corner-classify a v1 event file");
    det->add_option("--events", events_path, "v1 event file")->required();
    det->add_option("--out", out_path, "corner-event output file");

    auto* heat = app.add_subcommand("heatmap", "accumulate a corner file into a heat map");
    heat->add_option("--corners", events_path, "corner-event v1 file")->required();
    heat->add_option("--pgm", pgm_path, "graymap output");
    heat->add_option("--peaks", peaks_path, "peak list csv output");

    auto* suite = app.add_subcommand("suite", "run every trial config in a directory");
    suite->add_option("--config-dir", config_dir, "directory of trial configs")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, record_path, trace_dir);
        if (rep->parsed()) return cmd_replay(events_path, config_path, trace_dir);
        if (det->parsed()) return cmd_detect(events_path, out_path);
        if (heat->parsed()) return cmd_heatmap(events_path, pgm_path, peaks_path);
        if (suite->parsed()) return cmd_suite(config_dir);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 2;
}
