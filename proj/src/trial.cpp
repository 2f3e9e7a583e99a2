#include "ebvs/trial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "ebvs/event_io.hpp"

namespace ebvs {
namespace {

// Landmark accumulator over the workspace plane. Detected peaks are
// unprojected through the commanded camera motion and fused into clusters;
// an object vertex only has to peak occasionally to hold its cluster, so the
// cluster-mean centroid stays steady while instantaneous peak sets flicker.
class VertexMap {
public:
    explicit VertexMap(double merge_radius_m) : merge_radius_m_(merge_radius_m) {}

    void observe(const Vec2& world, std::uint64_t t) {
        for (auto& c : clusters_) {
            if ((c.pos - world).norm() <= merge_radius_m_) {
                c.pos = c.pos * 0.8 + world * 0.2;
                c.hits += 1.0;
                c.last_hit_us = t;
                return;
            }
        }
        clusters_.push_back({world, 1.0, t, false, next_id_++});
    }

    /// Re-evaluates which clusters count as vertices: enough accumulated
    /// evidence and still receiving hits. A cluster left behind by estimator
    /// lag stops being fed and expires; a weakly-firing vertex stays as long
    /// as it checks in occasionally. Clusters whose centers drifted into one
    /// another are merged.
    void refresh_support(std::uint64_t now) {
        for (std::size_t i = 0; i < clusters_.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters_.size();) {
                if ((clusters_[i].pos - clusters_[j].pos).norm() <= merge_radius_m_) {
                    auto& a = clusters_[i];
                    const auto& b = clusters_[j];
                    const double w = a.hits + b.hits;
                    a.pos = (a.pos * a.hits + b.pos * b.hits) * (1.0 / w);
                    if (b.hits > a.hits) a.id = b.id;
                    a.hits = w;
                    a.last_hit_us = std::max(a.last_hit_us, b.last_hit_us);
                    clusters_.erase(clusters_.begin() + j);
                } else {
                    ++j;
                }
            }
        }
        for (auto& c : clusters_) {
            // hysteresis: joining needs fresher evidence than staying
            const std::uint64_t stale_limit = c.qualified ? 4000000 : 1200000;
            c.qualified = c.hits >= 10.0 && now - c.last_hit_us <= stale_limit;
        }
        // The settle clock watches the pruned composition: qualification
        // churn of an edge artifact that never makes the vertex set does not
        // hold the grasp hostage.
        auto ids = supported_ids();
        if (ids != last_supported_ids_) {
            last_supported_ids_ = std::move(ids);
            last_support_change_us_ = now;
        }
    }

    /// True while some cluster is fresh and on its way to qualifying; the
    /// grasp holds off until such evidence either matures or expires.
    bool pending(std::uint64_t now) const {
        for (const auto& c : clusters_) {
            if (!c.qualified && c.hits >= 2.0 && c.hits < 10.0 &&
                now - c.last_hit_us <= 2500000) {
                return true;
            }
        }
        return false;
    }

    /// Time the set of well-supported clusters last changed. The grasp waits
    /// for this to settle so that a vertex the sweep has not lit up yet still
    /// gets its chance to join the map.
    std::uint64_t last_support_change() const { return last_support_change_us_; }

    /// Well-supported cluster centers (workspace coordinates). Clusters that
    /// sit on the line between two other supported clusters are edge
    /// artifacts, not vertices of a convex outline, and are dropped.
    std::vector<Vec2> supported() const {
        const auto ids = supported_ids();
        std::vector<Vec2> out;
        for (const auto& c : clusters_) {
            for (int id : ids) {
                if (c.id == id) {
                    out.push_back(c.pos);
                    break;
                }
            }
        }
        return out;
    }

    /// Mean of the well-supported cluster centers; empty until at least three
    /// vertices have accumulated.
    std::optional<Vec2> centroid() const {
        const auto good = supported();
        if (good.size() < 3) return std::nullopt;
        Vec2 sum{};
        for (const auto& p : good) sum += p;
        return sum * (1.0 / static_cast<double>(good.size()));
    }

private:
    struct Cluster {
        Vec2 pos;
        double hits;
        std::uint64_t last_hit_us;
        bool qualified;
        int id;
    };

    std::vector<int> supported_ids() const {
        std::vector<const Cluster*> raw;
        for (const auto& c : clusters_) {
            if (c.qualified) raw.push_back(&c);
        }
        std::vector<int> ids;
        if (raw.size() < 4) {
            for (const auto* c : raw) ids.push_back(c->id);
            return ids;
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!between_others(raw, i)) ids.push_back(raw[i]->id);
        }
        return ids;
    }

    static bool between_others(const std::vector<const Cluster*>& raw, std::size_t i) {
        for (std::size_t a = 0; a < raw.size(); ++a) {
            if (a == i) continue;
            for (std::size_t b = a + 1; b < raw.size(); ++b) {
                if (b == i) continue;
                const Vec2 ab = raw[b]->pos - raw[a]->pos;
                const double len2 = ab.dot(ab);
                if (len2 <= 0.0) continue;
                const double t = (raw[i]->pos - raw[a]->pos).dot(ab) / len2;
                if (t < 0.1 || t > 0.9) continue;
                const Vec2 foot = raw[a]->pos + ab * t;
                if ((raw[i]->pos - foot).norm() <= 0.010) return true;
            }
        }
        return false;
    }

    double merge_radius_m_;
    std::vector<Cluster> clusters_;
    std::vector<int> last_supported_ids_;
    std::uint64_t last_support_change_us_ = 0;
    int next_id_ = 0;
};

}  // namespace

void TrialConfig::finalize() {
    if (!camera.valid()) throw std::invalid_argument("invalid camera model");
    if (servo.focal_px <= 0.0) servo.focal_px = camera.focal_px;
    if (servo.depth_m <= 0.0) servo.depth_m = start_pose.position.z;
    if (start_pose.position.z <= 0.0) {
        throw std::invalid_argument("camera must start above the workspace");
    }
    if (control_rate_hz <= 0.0 || max_sim_time_s <= 0.0) {
        throw std::invalid_argument("control rate and trial length must be positive");
    }
    eventgen.seed = seed;
    pipeline.contiguity_threshold = strategy.contiguity_threshold;
    pipeline.contiguity_radius_px = strategy.contiguity_radius_px;
    pipeline.contiguity_stale_s = strategy.contiguity_stale_s;
    if (!pipeline.harris.built()) pipeline.harris.build();
    for (const auto& o : objects) o.validate();
}

TrialMetrics run_trial(const TrialConfig& config_in, const TrialSinks& sinks) {
    TrialConfig config = config_in;
    config.finalize();

    const CameraModel& camera = config.camera;
    EventGenerator gen(config.objects, camera, config.start_pose, 0, config.eventgen,
                       config.gen_sample_rate_hz);
    PerceptionPipeline pipe(camera.width, camera.height, config.pipeline);
    pipe.set_corner_sink(sinks.corner_events);
    pipe.set_trace_sink(sinks.perception_trace);
    SwitchingStrategy strategy(config.strategy, config.seed, camera.center());

    if (sinks.record != nullptr) write_event_header(*sinks.record, camera.width, camera.height);
    pipe.stamp_virtual(VirtualEvent{static_cast<std::uint16_t>(std::lround(camera.cx)),
                                    static_cast<std::uint16_t>(std::lround(camera.cy)), 0,
                                    VirtualKind::DesiredCenter});

    const std::uint64_t dt_us = static_cast<std::uint64_t>(1e6 / config.control_rate_hz);
    const double dt_s = static_cast<double>(dt_us) / 1e6;
    const std::uint64_t t_end = static_cast<std::uint64_t>(config.max_sim_time_s * 1e6);

    TrialMetrics metrics;
    CameraPose pose = config.start_pose;
    CameraVelocity command{};
    std::optional<Vec3> centroid_anchor;
    VertexMap vertex_map(5.0 * camera.metres_per_px(config.servo.depth_m));
    std::uint64_t vertex_map_fed_t = 0;
    std::uint64_t t = 0;
    std::uint64_t phase_started = 0;
    Phase last_phase = strategy.phase();

    const auto note_phase = [&](std::uint64_t now) {
        if (strategy.phase() != last_phase) {
            metrics.phase_s[static_cast<int>(last_phase)] +=
                static_cast<double>(now - phase_started) / 1e6;
            phase_started = now;
            last_phase = strategy.phase();
        }
    };

    while (t < t_end && strategy.phase() != Phase::Done) {
        const std::uint64_t t_next = t + dt_us;
        const CameraPose pose_next = apply_velocity(pose, command, dt_s);
        for (const Event& e : gen.advance(pose_next, t_next)) {
            if (sinks.record != nullptr) write_event_line(*sinks.record, e);
            pipe.feed(e);
        }

        StrategyInputs in;
        in.now_us = t_next;
        in.contiguity_count = pipe.contiguity_count(t_next);
        in.tracking = pipe.tracking();
        in.track_confirmed = pipe.tracking() && pipe.tracker().strikes() == 0 &&
                             pipe.tracker().confirmations() >= 1;
        in.track_confirmed_t_us = pipe.tracker().last_confirmation();
        in.centroid_px = pipe.centroid();
        // The anchor follows only validation-confirmed estimates; it is the
        // steady centering reference while raw estimates wobble.
        if (in.track_confirmed && in.centroid_px) {
            centroid_anchor = plane_point_for_pixel(camera, pose_next, *in.centroid_px);
        }
        if (centroid_anchor) {
            in.anchored_centroid_px = project(camera, pose_next, *centroid_anchor);
        }
        // Fuse each fresh peak extraction into the workspace vertex map.
        vertex_map.refresh_support(t_next);
        if (pipe.last_peaks_t_us() > vertex_map_fed_t) {
            vertex_map_fed_t = pipe.last_peaks_t_us();
            for (const auto& p : pipe.last_peaks().peaks) {
                const Vec3 w = plane_point_for_pixel(
                    camera, pose_next, {static_cast<double>(p.x), static_cast<double>(p.y)});
                vertex_map.observe({w.x, w.y}, pipe.last_peaks_t_us());
            }
        }
        if (const auto vc = vertex_map.centroid(); vc) {
            in.vertex_map_centroid_px = project(camera, pose_next, {vc->x, vc->y, 0.0});
            for (const auto& w : vertex_map.supported()) {
                if (const auto px = project(camera, pose_next, {w.x, w.y, 0.0}); px) {
                    in.map_corners_px.push_back(*px);
                }
            }
            in.map_settled = t_next - vertex_map.last_support_change() >= 2500000 &&
                             !vertex_map.pending(t_next);
        }
        if (pipe.tracking()) {
            in.corners_px = pipe.tracker().corners();
        } else {
            for (const auto& p : pipe.last_peaks().peaks) {
                in.corners_px.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
            }
        }
        in.camera = &camera;
        in.pose = &pose_next;

        const ControlDirective directive = strategy.step(in);
        if (const auto& tgt = strategy.active_target(); tgt && tgt->t == t_next) {
            pipe.stamp_virtual(*tgt);  // stamp only targets minted this tick
        }

        if (directive.descend_and_grasp) {
            // Descent is geometric: the gripper meets the plane under the
            // optic axis; no contact physics.
            if (!config.objects.empty()) {
                const Vec2 truth = config.objects.front().true_centroid();
                const Vec2 grasp{pose_next.position.x, pose_next.position.y};
                const double err_m = (grasp - truth).norm();
                metrics.e_grasp_mm = err_m * 1000.0;
                metrics.e_grasp_px = err_m * config.servo.focal_px / config.servo.depth_m;
            }
        }

        command = CameraVelocity{};
        if (directive.feature_px) {
            ServoTarget target{camera.center(), *directive.feature_px};
            command = compute_velocity(config.servo, target, config.limits);
        }
        command.w.z = directive.yaw_rate;
        command = clamp_velocity(command, config.limits.v_max, config.limits.w_max);

        note_phase(t_next);
        pose = pose_next;
        t = t_next;
    }

    metrics.phase_s[static_cast<int>(last_phase)] +=
        static_cast<double>(t - phase_started) / 1e6;
    metrics.reached_done = strategy.phase() == Phase::Done;
    metrics.success = metrics.reached_done && metrics.e_grasp_px >= 0.0 &&
                      metrics.e_grasp_px <= config.grasp_success_radius_px;
    metrics.n_switch = strategy.n_switch();
    metrics.sim_time_s = static_cast<double>(t) / 1e6;
    metrics.events_in = pipe.events_in();
    metrics.corner_events = pipe.corner_events();

    if (sinks.phase_log != nullptr) {
        *sinks.phase_log << "t_us,phase_from,phase_to,reason\n";
        for (const auto& tr : strategy.transitions()) {
            *sinks.phase_log << tr.t_us << ',' << phase_name(tr.from) << ','
                             << phase_name(tr.to) << ',' << tr.reason << '\n';
        }
    }
    return metrics;
}

SuiteSummary run_suite(const std::vector<TrialConfig>& configs) {
    if (configs.empty()) throw std::invalid_argument("suite needs at least one trial");
    SuiteSummary summary;
    double sum_e = 0.0, sum_switch = 0.0;
    int with_grasp = 0;
    for (const auto& cfg : configs) {
        SuiteRow row;
        row.name = cfg.name;
        row.metrics = run_trial(cfg);
        if (!row.metrics.success) ++summary.failures;
        if (row.metrics.e_grasp_mm >= 0.0) {
            sum_e += row.metrics.e_grasp_mm;
            summary.max_e_grasp_mm = std::max(summary.max_e_grasp_mm, row.metrics.e_grasp_mm);
            ++with_grasp;
        }
        sum_switch += row.metrics.n_switch;
        summary.max_n_switch = std::max(summary.max_n_switch, row.metrics.n_switch);
        summary.rows.push_back(std::move(row));
    }
    summary.mean_e_grasp_mm = with_grasp > 0 ? sum_e / with_grasp : -1.0;
    summary.mean_n_switch = sum_switch / static_cast<double>(configs.size());
    return summary;
}

void print_suite_table(std::ostream& os, const SuiteSummary& summary) {
    char buf[160];
    os << "trial                          e_grasp(mm)  N_switch  result\n";
    for (const auto& row : summary.rows) {
        std::snprintf(buf, sizeof(buf), "%-30s %11.1f %9d  %s\n", row.name.c_str(),
                      row.metrics.e_grasp_mm, row.metrics.n_switch,
                      row.metrics.success ? "success" : "failure");
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-30s %11.1f %9.1f  %d failed\n", "average",
                  summary.mean_e_grasp_mm, summary.mean_n_switch, summary.failures);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-30s %11.1f %9d\n", "max", summary.max_e_grasp_mm,
                  summary.max_n_switch);
    os << buf;
}

}  // namespace ebvs
