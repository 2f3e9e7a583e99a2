#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ebvs/camera.hpp"
#include "ebvs/event.hpp"
#include "ebvs/math.hpp"
#include "ebvs/rng.hpp"

namespace ebvs {

enum class Phase : std::uint8_t { Explore, Reach, Align, Grasp, Done };

const char* phase_name(Phase p);

struct StrategyConfig {
    int contiguity_threshold = 3;      // C_th
    double contiguity_radius_px = 3.0; // successive centroids closer than this are contiguous
    double contiguity_stale_s = 0.3;   // no centroid for this long resets the count
    double reach_tolerance_px = 2.0;   // epsilon for "camera center = object center"
    double explore_respawn_s = 2.0;    // random target lifetime
    double omega_align = 0.6;          // rad/s during gripper alignment
    double align_tolerance_deg = 2.0;  // admissible orientation range
};

/// Spatial-consistency counter over successive centroid estimates. The count
/// rises while each new centroid stays within the contiguity radius of the
/// previous one and collapses to zero on a jump or when no centroid arrives
/// within the staleness window.
class ContiguityMonitor {
public:
    explicit ContiguityMonitor(double radius_px, double stale_s)
        : radius_px_(radius_px), stale_us_(static_cast<std::uint64_t>(stale_s * 1e6)) {}

    void on_centroid(const Vec2& c, std::uint64_t t);
    void reset();
    int count(std::uint64_t now) const;

private:
    double radius_px_;
    std::uint64_t stale_us_;
    std::optional<Vec2> last_;
    std::uint64_t last_t_us_ = 0;
    int count_ = 0;
};

/// Which virtual event the controller should chase, per the three-case
/// switching function: random target until centroid contiguity is
/// established, the object centroid afterwards, the alignment target once
/// the centroid sits on the camera center.
enum class TargetKind : std::uint8_t { RandomTarget, ObjectCentroid, AlignmentTarget };

TargetKind select_target(int contiguity_count, int contiguity_threshold,
                         const std::optional<Vec2>& centroid, const Vec2& sensor_center,
                         double reach_tolerance_px);

/// What the strategy wants done this tick.
struct ControlDirective {
    std::optional<Vec2> feature_px;  // feature the servo should center, if any
    double yaw_rate = 0.0;           // alignment spin command
    bool descend_and_grasp = false;
    TargetKind target_kind = TargetKind::RandomTarget;
};

struct PhaseTransition {
    std::uint64_t t_us;
    Phase from;
    Phase to;
    std::string reason;
};

/// Everything the strategy reads at one control tick.
struct StrategyInputs {
    std::uint64_t now_us = 0;
    int contiguity_count = 0;
    bool tracking = false;                 // tracker in tracking mode
    bool track_confirmed = false;          // tracking, strike-free, validated
    std::uint64_t track_confirmed_t_us = 0;  // time of the confirming validation
    std::optional<Vec2> centroid_px;       // current high-level feature estimate
    // Reprojection of the last sound centroid estimate, anchored on the
    // workspace plane and carried through the commanded ego-motion. Used to
    // keep the centering servo alive across perception dropouts; never used
    // for the grasp decision.
    std::optional<Vec2> anchored_centroid_px;
    // Reprojected centroid and corners of the accumulated vertex map
    // (landmarks fused in workspace coordinates across the whole trial). The
    // steadiest references once enough vertices have been seen.
    std::optional<Vec2> vertex_map_centroid_px;
    std::vector<Vec2> map_corners_px;
    bool map_settled = false;  // supported cluster set unchanged long enough
    std::vector<Vec2> corners_px;          // for the alignment angle
    const CameraModel* camera = nullptr;
    const CameraPose* pose = nullptr;
};

/// The explore -> reach -> align -> grasp machine. The only backward
/// transition is Reach -> Explore on tracking loss; Align, Grasp and Done
/// never regress.
class SwitchingStrategy {
public:
    SwitchingStrategy(StrategyConfig config, std::uint64_t seed, Vec2 sensor_center);

    Phase phase() const { return phase_; }
    int n_switch() const { return n_switch_; }
    const std::vector<PhaseTransition>& transitions() const { return transitions_; }
    const std::optional<VirtualEvent>& active_target() const { return active_target_; }

    /// Uniform random pixel in the central 80% of the sensor, reproducible
    /// under the seed.
    Vec2 spawn_random_target(const CameraModel& camera);

    ControlDirective step(const StrategyInputs& in);

private:
    void transition(std::uint64_t t, Phase to, const std::string& reason);

    StrategyConfig config_;
    Rng rng_;
    Vec2 sensor_center_;
    Phase phase_ = Phase::Explore;
    int n_switch_ = 0;
    std::optional<VirtualEvent> active_target_;
    std::optional<Vec3> explore_world_target_;
    std::uint64_t explore_spawn_t_us_ = 0;
    // Grasp-line corner latched at align entry. Every vertex of a regular
    // polygon is equidistant from the centroid, so re-running the farthest-
    // corner argmax each tick flips between estimates; instead the pick is
    // made once and followed by proximity (predicted through the camera
    // rotation across estimate dropouts).
    std::optional<Vec2> align_corner_rel_;  // relative to the centroid estimate
    double align_latch_yaw_ = 0.0;
    double align_spin_dir_ = 1.0;  // rotation direction, follows the last command
    std::uint64_t align_entry_t_us_ = 0;
    std::vector<PhaseTransition> transitions_;
};

}  // namespace ebvs
