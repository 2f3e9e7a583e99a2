#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ebvs/camera.hpp"
#include "ebvs/pipeline.hpp"
#include "ebvs/scene.hpp"
#include "ebvs/servo.hpp"
#include "ebvs/strategy.hpp"

namespace ebvs {

/// One closed-loop trial is a pure function of this block.
struct TrialConfig {
    std::string name = "trial";
    CameraModel camera;
    CameraPose start_pose{{0.0, 0.0, 0.6}, 0.0};
    std::vector<SceneObject> objects;
    EventGenConfig eventgen;
    double gen_sample_rate_hz = 1000.0;
    PipelineConfig pipeline;
    StrategyConfig strategy;
    InteractionModel servo;  // focal/depth filled from camera/start pose when 0
    ServoLimits limits;
    double control_rate_hz = 100.0;
    double max_sim_time_s = 30.0;
    double grasp_success_radius_px = 5.0;
    std::uint64_t seed = 1;

    void finalize();  // fills derived defaults and validates
};

struct TrialMetrics {
    bool success = false;
    bool reached_done = false;
    double e_grasp_px = -1.0;
    double e_grasp_mm = -1.0;
    int n_switch = 0;
    double sim_time_s = 0.0;
    std::uint64_t events_in = 0;
    std::uint64_t corner_events = 0;
    // explore, reach, align, grasp, done indexed by Phase
    std::array<double, 5> phase_s{};
};

/// Output streams; any of them may be null.
struct TrialSinks {
    std::ostream* record = nullptr;            // generated events, v1 format
    std::ostream* corner_events = nullptr;     // corner stream, v1 lines
    std::ostream* perception_trace = nullptr;  // validation CSV
    std::ostream* phase_log = nullptr;         // t_us,phase_from,phase_to,reason
};

TrialMetrics run_trial(const TrialConfig& config, const TrialSinks& sinks = {});

struct SuiteRow {
    std::string name;
    TrialMetrics metrics;
};

struct SuiteSummary {
    std::vector<SuiteRow> rows;
    double mean_e_grasp_mm = 0.0;
    double max_e_grasp_mm = 0.0;
    double mean_n_switch = 0.0;
    int max_n_switch = 0;
    int failures = 0;
};

SuiteSummary run_suite(const std::vector<TrialConfig>& configs);

/// Per-trial rows with mean/max aggregate lines.
void print_suite_table(std::ostream& os, const SuiteSummary& summary);

// JSON (de)serialization of the trial schema documented in the README.
TrialConfig trial_config_from_json_file(const std::string& path);
TrialConfig trial_config_from_json_text(const std::string& text);
std::string trial_config_to_json_text(const TrialConfig& config);

}  // namespace ebvs
