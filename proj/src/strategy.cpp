#include "ebvs/strategy.hpp"

#include <cmath>

#include "ebvs/servo.hpp"

namespace ebvs {
namespace {

// Virtual events live on the sensor plane; reprojected map features can fall
// outside it, in which case there is nothing to stamp.
std::optional<VirtualEvent> virtual_at(const Vec2& px, std::uint64_t t, VirtualKind kind,
                                       const CameraModel* camera) {
    if (camera == nullptr) return std::nullopt;
    const int u = static_cast<int>(std::lround(px.x));
    const int v = static_cast<int>(std::lround(px.y));
    if (u < 0 || u >= camera->width || v < 0 || v >= camera->height) return std::nullopt;
    return VirtualEvent{static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v), t,
                        kind};
}

}  // namespace

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Explore: return "explore";
        case Phase::Reach: return "reach";
        case Phase::Align: return "align";
        case Phase::Grasp: return "grasp";
        case Phase::Done: return "done";
    }
    return "?";
}

void ContiguityMonitor::on_centroid(const Vec2& c, std::uint64_t t) {
    if (last_ && t >= last_t_us_ && t - last_t_us_ <= stale_us_ &&
        (c - *last_).norm() <= radius_px_) {
        if (count_ < 1 << 20) ++count_;
    } else {
        count_ = 0;
    }
    last_ = c;
    last_t_us_ = t;
}

void ContiguityMonitor::reset() {
    last_.reset();
    count_ = 0;
}

int ContiguityMonitor::count(std::uint64_t now) const {
    if (!last_ || (now > last_t_us_ && now - last_t_us_ > stale_us_)) return 0;
    return count_;
}

TargetKind select_target(int contiguity_count, int contiguity_threshold,
                         const std::optional<Vec2>& centroid, const Vec2& sensor_center,
                         double reach_tolerance_px) {
    if (!centroid || contiguity_count < contiguity_threshold) return TargetKind::RandomTarget;
    if ((*centroid - sensor_center).norm() <= reach_tolerance_px) {
        return TargetKind::AlignmentTarget;
    }
    return TargetKind::ObjectCentroid;
}

SwitchingStrategy::SwitchingStrategy(StrategyConfig config, std::uint64_t seed,
                                     Vec2 sensor_center)
    : config_(config), rng_(Rng(seed).split(7)), sensor_center_(sensor_center) {}

Vec2 SwitchingStrategy::spawn_random_target(const CameraModel& camera) {
    // Central 80% box; the margin keeps the servo from driving the object out
    // of view while chasing the target.
    const auto lo_u = static_cast<std::uint64_t>(camera.width * 0.1);
    const auto hi_u = static_cast<std::uint64_t>(camera.width * 0.9);
    const auto lo_v = static_cast<std::uint64_t>(camera.height * 0.1);
    const auto hi_v = static_cast<std::uint64_t>(camera.height * 0.9);
    const double u = static_cast<double>(lo_u + rng_.below(hi_u - lo_u));
    const double v = static_cast<double>(lo_v + rng_.below(hi_v - lo_v));
    return {u, v};
}

void SwitchingStrategy::transition(std::uint64_t t, Phase to, const std::string& reason) {
    if (to == phase_) return;
    transitions_.push_back({t, phase_, to, reason});
    phase_ = to;
}

ControlDirective SwitchingStrategy::step(const StrategyInputs& in) {
    ControlDirective out;

    if (phase_ == Phase::Done) return out;

    if (phase_ == Phase::Grasp) {
        out.descend_and_grasp = true;
        transition(in.now_us, Phase::Done, "grasp executed");
        return out;
    }

    if (phase_ == Phase::Align) {
        // The centering servo holds the centroid on the camera center while
        // the gripper line rotates into the admissible range. Both run off
        // the fused vertex map when it is available: its clusters sit still
        // in the workspace, so the farthest-corner pick cannot flip between
        // estimates and the completion check closes deterministically.
        out.target_kind = TargetKind::AlignmentTarget;
        if (in.vertex_map_centroid_px) out.feature_px = in.vertex_map_centroid_px;
        else if (in.anchored_centroid_px) out.feature_px = in.anchored_centroid_px;
        else if (in.centroid_px) out.feature_px = in.centroid_px;
        const double yaw = in.pose != nullptr ? in.pose->yaw : 0.0;
        const double tol = deg_to_rad(config_.align_tolerance_deg);

        const std::optional<Vec2>& centroid =
            in.vertex_map_centroid_px ? in.vertex_map_centroid_px : in.centroid_px;
        const std::vector<Vec2>& corners =
            !in.map_corners_px.empty() ? in.map_corners_px : in.corners_px;
        if (!centroid || corners.empty()) {
            // No usable estimate: keep turning in one direction at full rate.
            // Standing still starves the event flow and nothing can recover.
            out.yaw_rate = align_spin_dir_ * config_.omega_align;
            return out;
        }

        // Follow the latched grasp-line corner. The image content has turned
        // by -(yaw - latch_yaw) since the latch; re-identify the corner by
        // direction, which stays unambiguous however estimates reshuffle.
        const Vec2* followed = nullptr;
        if (align_corner_rel_) {
            const double turn = -(yaw - align_latch_yaw_);
            const double want = std::atan2(align_corner_rel_->y, align_corner_rel_->x) + turn;
            double best = 4.0;  // > pi: always matches some corner
            for (const auto& c : corners) {
                const Vec2 r = c - *centroid;
                const double err = std::abs(wrap_angle(std::atan2(r.y, r.x) - want));
                if (err < best) {
                    best = err;
                    followed = &c;
                }
            }
        }
        if (followed == nullptr) {
            // First latch: the farthest corner from the centroid.
            double best_d = -1.0;
            for (const auto& c : corners) {
                const double d = (c - *centroid).norm();
                if (d > best_d) {
                    best_d = d;
                    followed = &c;
                }
            }
        }
        align_corner_rel_ = *followed - *centroid;
        align_latch_yaw_ = yaw;
        if (const auto ve = virtual_at(*followed, in.now_us, VirtualKind::AlignmentTarget,
                                       in.camera); ve) {
            active_target_ = ve;
        }

        const double theta = wrap_angle(
            std::atan2(followed->y - centroid->y, followed->x - centroid->x));
        const auto step = alignment_step(theta, 0.0, config_.omega_align, 1.0, tol);
        // theta is measured in the image; spinning the camera by +yaw turns
        // the image content by -yaw, so command the opposite sign.
        out.yaw_rate = -step.rate;
        if (out.yaw_rate != 0.0) align_spin_dir_ = out.yaw_rate > 0.0 ? 1.0 : -1.0;

        const bool centered =
            (*centroid - sensor_center_).norm() <= config_.reach_tolerance_px;
        // Edge orientation is periodic in pi: after the line has swept half a
        // turn, every edge of the object has passed through every orientation
        // class and had its chance to light up in the map.
        const auto min_align_us = static_cast<std::uint64_t>(
            3.14159265358979323846 / config_.omega_align * 1e6);
        const bool map_mature = in.vertex_map_centroid_px && in.map_settled &&
                                in.now_us - align_entry_t_us_ >= min_align_us;
        if (step.done && centered && map_mature) {
            transition(in.now_us, Phase::Grasp, "aligned within tolerance");
        }
        // When the line is aligned but the centering still converging, hold
        // the orientation; the translation servo keeps working off the map.
        return out;
    }

    // Explore / Reach: pick the target by the switching function. The
    // centered test uses the fused map centroid once it exists; the raw
    // estimate wobbles around it near the goal.
    const std::optional<Vec2>& switch_centroid =
        in.vertex_map_centroid_px && in.centroid_px ? in.vertex_map_centroid_px
                                                    : in.centroid_px;
    const TargetKind kind = select_target(in.contiguity_count, config_.contiguity_threshold,
                                          switch_centroid, sensor_center_,
                                          config_.reach_tolerance_px);
    out.target_kind = kind;

    if (phase_ == Phase::Reach && !in.tracking) {
        // Tracking fell back to detection: recover by exploring again.
        ++n_switch_;
        explore_world_target_.reset();
        transition(in.now_us, Phase::Explore, "tracking lost");
        out.target_kind = TargetKind::RandomTarget;
    } else if (kind == TargetKind::ObjectCentroid) {
        transition(in.now_us, Phase::Reach, "centroid contiguity reached");
        // The raw estimate leads the approach; once the fused map has settled
        // it takes over, so the final centering does not chase the wobble.
        out.feature_px = in.map_settled && in.vertex_map_centroid_px
                             ? in.vertex_map_centroid_px
                             : in.centroid_px;
        if (const auto ve = virtual_at(*in.centroid_px, in.now_us,
                                       VirtualKind::ObjectCentroid, in.camera); ve) {
            active_target_ = ve;
        }
        return out;
    } else if (kind == TargetKind::AlignmentTarget) {
        align_entry_t_us_ = in.now_us;
        transition(in.now_us, Phase::Align, "centroid on camera center");
        out.feature_px = in.centroid_px;
        return out;
    }

    // Explore: servo toward a workspace-anchored random target; respawn it
    // once reached or stale.
    if (in.camera == nullptr || in.pose == nullptr) return out;
    const std::uint64_t age = in.now_us - explore_spawn_t_us_;
    bool respawn = !explore_world_target_ ||
                   age > static_cast<std::uint64_t>(config_.explore_respawn_s * 1e6);
    if (!respawn) {
        const auto px = project(*in.camera, *in.pose, *explore_world_target_);
        respawn = !px || (*px - sensor_center_).norm() <= config_.reach_tolerance_px;
    }
    if (respawn) {
        const Vec2 px = spawn_random_target(*in.camera);
        explore_world_target_ = plane_point_for_pixel(*in.camera, *in.pose, px);
        explore_spawn_t_us_ = in.now_us;
        active_target_ = virtual_at(px, in.now_us, VirtualKind::RandomTarget, in.camera);
    }
    const auto px = project(*in.camera, *in.pose, *explore_world_target_);
    if (px) out.feature_px = *px;
    return out;
}

}  // namespace ebvs
