#pragma once

#include <cstdint>
#include <vector>

#include "ebvs/camera.hpp"
#include "ebvs/event.hpp"
#include "ebvs/math.hpp"
#include "ebvs/rng.hpp"

namespace ebvs {

/// A convex polygonal prism standing on the workspace plane. Vertices are
/// counterclockwise in world xy; the camera sees the top face at z = height.
struct SceneObject {
    std::vector<Vec2> vertices;
    double height = 0.0;

    /// Vertex average, the ground truth the grasp error is measured against.
    Vec2 true_centroid() const {
        Vec2 c{};
        for (const auto& v : vertices) c += v;
        return c * (1.0 / static_cast<double>(vertices.size()));
    }
    void validate() const;
};

SceneObject make_regular_polygon(int sides, double circumradius, Vec2 center,
                                 double rotation_rad, double height = 0.0);
SceneObject make_rectangle(double size_x, double size_y, Vec2 center,
                           double rotation_rad, double height = 0.0);

struct EventGenConfig {
    double events_per_crossing = 1.0;  // events emitted per pixel-crossing of an edge
    double noise_rate_hz = 0.0;        // background events per second over the whole sensor
    double jitter_sigma_us = 0.0;      // gaussian timestamp jitter
    std::uint64_t seed = 1;
};

struct TimedPose {
    std::uint64_t t_us = 0;
    CameraPose pose;
};

/// Cells crossed by the segment from a to b (pixel coordinates), appended as
/// v*width+u indices. Conservative grid traversal: every cell the segment
/// passes through is produced, so a segment slid along its own direction
/// keeps (almost) the same cell set.
void rasterize_segment(Vec2 a, Vec2 b, int width, int height, std::vector<std::int32_t>& out);

/// Streaming synthetic event source. Converts relative camera/scene motion
/// into events: per sub-sample interval, every pixel whose edge occupancy
/// changes emits one event, +1 entering, -1 leaving, timestamp drawn inside
/// the interval. Background noise events arrive at Poisson times over uniform
/// pixels. Output is globally non-decreasing in t.
class EventGenerator {
public:
    EventGenerator(std::vector<SceneObject> scene, CameraModel camera,
                   const CameraPose& start_pose, std::uint64_t start_t_us,
                   EventGenConfig config, double sample_rate_hz = 1000.0);

    /// Advances to the given pose/time (linear pose interpolation at the
    /// internal sample rate) and returns the events generated on the way,
    /// sorted by timestamp.
    std::vector<Event> advance(const CameraPose& to, std::uint64_t t_to_us);

    const CameraPose& pose() const { return last_pose_; }
    std::uint64_t time_us() const { return last_t_us_; }

private:
    std::vector<std::int32_t> edge_cells(const CameraPose& pose) const;
    void step_interval(const CameraPose& to, std::uint64_t t_to_us, std::vector<Event>& out);

    std::vector<SceneObject> scene_;
    CameraModel camera_;
    EventGenConfig config_;
    double sample_rate_hz_;
    CameraPose last_pose_;
    std::uint64_t last_t_us_;
    std::uint64_t noise_next_t_us_;
    std::vector<std::int32_t> last_cells_;
    Rng motion_rng_;
    Rng noise_rng_;
    mutable std::vector<std::int32_t> scratch_;
};

/// Batch form over a sampled trajectory. Throws on fewer than one sample or
/// non-increasing sample times.
std::vector<Event> generate_events(const std::vector<SceneObject>& scene,
                                   const CameraModel& camera,
                                   const std::vector<TimedPose>& trajectory,
                                   const EventGenConfig& config);

}  // namespace ebvs
