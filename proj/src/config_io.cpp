#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ebvs/trial.hpp"

namespace ebvs {
namespace {

using nlohmann::json;

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Vec2 vec2_of(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

SceneObject parse_object(const json& j) {
    double height = 0.0;
    get_if(j, "height", height);
    if (j.contains("vertices")) {
        SceneObject obj;
        obj.height = height;
        for (const auto& v : j.at("vertices")) obj.vertices.push_back(vec2_of(v));
        obj.validate();
        return obj;
    }
    const std::string shape = j.at("shape").get<std::string>();
    Vec2 center{};
    if (j.contains("center")) center = vec2_of(j.at("center"));
    double rotation_deg = 0.0;
    get_if(j, "rotation_deg", rotation_deg);
    const double rot = deg_to_rad(rotation_deg);
    if (shape == "rectangle") {
        double sx = 0.24, sy = 0.18;
        if (j.contains("size")) {
            sx = j.at("size").at(0).get<double>();
            sy = j.at("size").at(1).get<double>();
        }
        return make_rectangle(sx, sy, center, rot, height);
    }
    double radius = 0.15;
    get_if(j, "circumradius", radius);
    if (shape == "triangle") return make_regular_polygon(3, radius, center, rot, height);
    if (shape == "pentagon") return make_regular_polygon(5, radius, center, rot, height);
    throw std::invalid_argument("unknown scene shape: " + shape);
}

}  // namespace

TrialConfig trial_config_from_json_text(const std::string& text) {
    const json j = json::parse(text);
    TrialConfig cfg;
    get_if(j, "name", cfg.name);

    if (j.contains("sensor")) {
        const auto& s = j.at("sensor");
        get_if(s, "width", cfg.camera.width);
        get_if(s, "height", cfg.camera.height);
        get_if(s, "focal_px", cfg.camera.focal_px);
        cfg.camera.cx = cfg.camera.width / 2.0;
        cfg.camera.cy = cfg.camera.height / 2.0;
        get_if(s, "cx", cfg.camera.cx);
        get_if(s, "cy", cfg.camera.cy);
    }
    if (j.contains("camera_start")) {
        const auto& c = j.at("camera_start");
        if (c.contains("position")) {
            const auto& p = c.at("position");
            cfg.start_pose.position = {p.at(0).get<double>(), p.at(1).get<double>(),
                                       p.at(2).get<double>()};
        }
        double yaw_deg = 0.0;
        get_if(c, "yaw_deg", yaw_deg);
        cfg.start_pose.yaw = deg_to_rad(yaw_deg);
    }
    if (j.contains("scene")) {
        for (const auto& o : j.at("scene")) cfg.objects.push_back(parse_object(o));
    }
    if (j.contains("eventgen")) {
        const auto& e = j.at("eventgen");
        get_if(e, "events_per_crossing", cfg.eventgen.events_per_crossing);
        get_if(e, "noise_rate_hz", cfg.eventgen.noise_rate_hz);
        get_if(e, "jitter_sigma_us", cfg.eventgen.jitter_sigma_us);
        get_if(e, "sample_rate_hz", cfg.gen_sample_rate_hz);
    }
    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        get_if(d, "corner_threshold", cfg.pipeline.harris.corner_threshold);
        get_if(d, "newest_count", cfg.pipeline.harris.newest_event_count);
        get_if(d, "patch_size", cfg.pipeline.harris.patch_size);
        get_if(d, "harris_k", cfg.pipeline.harris.harris_k);
        std::string window = "gaussian";
        get_if(d, "window", window);
        cfg.pipeline.harris.window = window == "uniform" ? HarrisConfig::Window::Uniform
                                                         : HarrisConfig::Window::Gaussian;
    }
    if (j.contains("heatmap")) {
        const auto& h = j.at("heatmap");
        get_if(h, "alpha", cfg.pipeline.heatmap.alpha);
        get_if(h, "sigma", cfg.pipeline.heatmap.sigma);
        get_if(h, "tau", cfg.pipeline.heatmap.tau);
        get_if(h, "kernel_radius", cfg.pipeline.heatmap.kernel_radius);
        get_if(h, "peak_threshold", cfg.pipeline.heatmap.peak_threshold);
        get_if(h, "dilation_window", cfg.pipeline.heatmap.dilation_window);
    }
    if (j.contains("tracker")) {
        const auto& t = j.at("tracker");
        get_if(t, "gate_px", cfg.pipeline.tracker.gate_px);
        get_if(t, "discrepancy_px", cfg.pipeline.tracker.discrepancy_px);
        get_if(t, "max_strikes", cfg.pipeline.tracker.max_strikes);
        get_if(t, "validation_interval_s", cfg.pipeline.tracker.validation_interval_s);
    }
    if (j.contains("controller")) {
        const auto& c = j.at("controller");
        get_if(c, "lambda", cfg.servo.lambda);
        get_if(c, "depth_z", cfg.servo.depth_m);
        get_if(c, "v_max", cfg.limits.v_max);
        get_if(c, "w_max", cfg.limits.w_max);
        get_if(c, "omega_align", cfg.strategy.omega_align);
        get_if(c, "align_tolerance_deg", cfg.strategy.align_tolerance_deg);
    }
    if (j.contains("strategy")) {
        const auto& s = j.at("strategy");
        get_if(s, "contiguity_threshold", cfg.strategy.contiguity_threshold);
        get_if(s, "contiguity_radius_px", cfg.strategy.contiguity_radius_px);
        get_if(s, "contiguity_stale_s", cfg.strategy.contiguity_stale_s);
        get_if(s, "reach_tolerance_px", cfg.strategy.reach_tolerance_px);
        get_if(s, "explore_respawn_s", cfg.strategy.explore_respawn_s);
    }
    if (j.contains("trial")) {
        const auto& t = j.at("trial");
        get_if(t, "seed", cfg.seed);
        get_if(t, "max_sim_time_s", cfg.max_sim_time_s);
        get_if(t, "control_rate_hz", cfg.control_rate_hz);
        get_if(t, "detection_interval_s", cfg.pipeline.detection_interval_s);
        get_if(t, "grasp_success_radius_px", cfg.grasp_success_radius_px);
    }
    cfg.finalize();
    return cfg;
}

TrialConfig trial_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return trial_config_from_json_text(text.str());
}

std::string trial_config_to_json_text(const TrialConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["sensor"] = {{"width", cfg.camera.width},
                   {"height", cfg.camera.height},
                   {"focal_px", cfg.camera.focal_px},
                   {"cx", cfg.camera.cx},
                   {"cy", cfg.camera.cy}};
    j["camera_start"] = {
        {"position", {cfg.start_pose.position.x, cfg.start_pose.position.y,
                      cfg.start_pose.position.z}},
        {"yaw_deg", cfg.start_pose.yaw * 180.0 / 3.14159265358979323846}};
    j["scene"] = json::array();
    for (const auto& o : cfg.objects) {
        json obj;
        obj["height"] = o.height;
        obj["vertices"] = json::array();
        for (const auto& v : o.vertices) obj["vertices"].push_back({v.x, v.y});
        j["scene"].push_back(obj);
    }
    j["eventgen"] = {{"events_per_crossing", cfg.eventgen.events_per_crossing},
                     {"noise_rate_hz", cfg.eventgen.noise_rate_hz},
                     {"jitter_sigma_us", cfg.eventgen.jitter_sigma_us},
                     {"sample_rate_hz", cfg.gen_sample_rate_hz}};
    j["detector"] = {{"corner_threshold", cfg.pipeline.harris.corner_threshold},
                     {"newest_count", cfg.pipeline.harris.newest_event_count},
                     {"patch_size", cfg.pipeline.harris.patch_size},
                     {"harris_k", cfg.pipeline.harris.harris_k},
                     {"window", cfg.pipeline.harris.window == HarrisConfig::Window::Uniform
                                    ? "uniform"
                                    : "gaussian"}};
    j["heatmap"] = {{"alpha", cfg.pipeline.heatmap.alpha},
                    {"sigma", cfg.pipeline.heatmap.sigma},
                    {"tau", cfg.pipeline.heatmap.tau},
                    {"kernel_radius", cfg.pipeline.heatmap.kernel_radius},
                    {"peak_threshold", cfg.pipeline.heatmap.peak_threshold},
                    {"dilation_window", cfg.pipeline.heatmap.dilation_window}};
    j["tracker"] = {{"gate_px", cfg.pipeline.tracker.gate_px},
                    {"discrepancy_px", cfg.pipeline.tracker.discrepancy_px},
                    {"max_strikes", cfg.pipeline.tracker.max_strikes},
                    {"validation_interval_s", cfg.pipeline.tracker.validation_interval_s}};
    j["controller"] = {{"lambda", cfg.servo.lambda},
                       {"depth_z", cfg.servo.depth_m},
                       {"v_max", cfg.limits.v_max},
                       {"w_max", cfg.limits.w_max},
                       {"omega_align", cfg.strategy.omega_align},
                       {"align_tolerance_deg", cfg.strategy.align_tolerance_deg}};
    j["strategy"] = {{"contiguity_threshold", cfg.strategy.contiguity_threshold},
                     {"contiguity_radius_px", cfg.strategy.contiguity_radius_px},
                     {"contiguity_stale_s", cfg.strategy.contiguity_stale_s},
                     {"reach_tolerance_px", cfg.strategy.reach_tolerance_px},
                     {"explore_respawn_s", cfg.strategy.explore_respawn_s}};
    j["trial"] = {{"seed", cfg.seed},
                  {"max_sim_time_s", cfg.max_sim_time_s},
                  {"control_rate_hz", cfg.control_rate_hz},
                  {"detection_interval_s", cfg.pipeline.detection_interval_s},
                  {"grasp_success_radius_px", cfg.grasp_success_radius_px}};
    return j.dump(2);
}

}  // namespace ebvs
