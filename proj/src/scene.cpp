#include "ebvs/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ebvs {
namespace {

constexpr double kPi = 3.14159265358979323846;

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Liang-Barsky clip of [a,b] to the box [x0,x1]x[y0,y1]. Returns false when
// the segment misses the box entirely.
bool clip_segment(Vec2& a, Vec2& b, double x0, double y0, double x1, double y1) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
    }
    const Vec2 na{a.x + t0 * dx, a.y + t0 * dy};
    const Vec2 nb{a.x + t1 * dx, a.y + t1 * dy};
    a = na;
    b = nb;
    return true;
}

}  // namespace

void SceneObject::validate() const {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs >= 3 vertices");
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cross2(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
        if (c <= 0.0) {
            throw std::invalid_argument("polygon must be convex and counterclockwise");
        }
    }
    if (height < 0.0) throw std::invalid_argument("prism height must be >= 0");
}

SceneObject make_regular_polygon(int sides, double circumradius, Vec2 center,
                                 double rotation_rad, double height) {
    SceneObject obj;
    obj.height = height;
    obj.vertices.reserve(sides);
    for (int i = 0; i < sides; ++i) {
        const double a = rotation_rad + 2.0 * kPi * i / sides;
        obj.vertices.push_back({center.x + circumradius * std::cos(a),
                                center.y + circumradius * std::sin(a)});
    }
    obj.validate();
    return obj;
}

SceneObject make_rectangle(double size_x, double size_y, Vec2 center, double rotation_rad,
                           double height) {
    SceneObject obj;
    obj.height = height;
    const double hx = size_x / 2.0, hy = size_y / 2.0;
    const double c = std::cos(rotation_rad), s = std::sin(rotation_rad);
    for (const auto& [px, py] : {std::pair{hx, hy}, {-hx, hy}, {-hx, -hy}, {hx, -hy}}) {
        obj.vertices.push_back({center.x + c * px - s * py, center.y + s * px + c * py});
    }
    obj.validate();
    return obj;
}

void rasterize_segment(Vec2 a, Vec2 b, int width, int height, std::vector<std::int32_t>& out) {
    // Pixel (u,v) covers [u-0.5, u+0.5) x [v-0.5, v+0.5). Shift so cells are
    // unit squares with integer corners, then walk the grid visiting every
    // cell the segment passes through.
    a.x += 0.5; a.y += 0.5;
    b.x += 0.5; b.y += 0.5;
    if (!clip_segment(a, b, -1.0, -1.0, width + 1.0, height + 1.0)) return;

    int x = static_cast<int>(std::floor(a.x));
    int y = static_cast<int>(std::floor(a.y));
    const int ex = static_cast<int>(std::floor(b.x));
    const int ey = static_cast<int>(std::floor(b.y));
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const int step_x = dx > 0.0 ? 1 : -1;
    const int step_y = dy > 0.0 ? 1 : -1;
    const double inv_dx = dx != 0.0 ? 1.0 / dx : 0.0;
    const double inv_dy = dy != 0.0 ? 1.0 / dy : 0.0;
    double t_max_x = dx != 0.0
        ? ((x + (step_x > 0 ? 1 : 0)) - a.x) * inv_dx
        : std::numeric_limits<double>::infinity();
    double t_max_y = dy != 0.0
        ? ((y + (step_y > 0 ? 1 : 0)) - a.y) * inv_dy
        : std::numeric_limits<double>::infinity();
    const double t_delta_x = dx != 0.0 ? std::abs(inv_dx) : 0.0;
    const double t_delta_y = dy != 0.0 ? std::abs(inv_dy) : 0.0;

    const int max_iters = std::abs(ex - x) + std::abs(ey - y) + 4;
    for (int it = 0; it <= max_iters; ++it) {
        if (x >= 0 && x < width && y >= 0 && y < height) {
            out.push_back(static_cast<std::int32_t>(y) * width + x);
        }
        if (x == ex && y == ey) break;
        if (t_max_x < t_max_y) {
            x += step_x;
            t_max_x += t_delta_x;
        } else {
            y += step_y;
            t_max_y += t_delta_y;
        }
    }
}

EventGenerator::EventGenerator(std::vector<SceneObject> scene, CameraModel camera,
                               const CameraPose& start_pose, std::uint64_t start_t_us,
                               EventGenConfig config, double sample_rate_hz)
    : scene_(std::move(scene)),
      camera_(camera),
      config_(config),
      sample_rate_hz_(sample_rate_hz),
      last_pose_(start_pose),
      last_t_us_(start_t_us),
      noise_next_t_us_(start_t_us),
      motion_rng_(Rng(config.seed).split(1)),
      noise_rng_(Rng(config.seed).split(2)) {
    if (sample_rate_hz_ <= 0.0) throw std::invalid_argument("sample rate must be > 0");
    if (config_.events_per_crossing < 0.0 || config_.noise_rate_hz < 0.0 ||
        config_.jitter_sigma_us < 0.0) {
        throw std::invalid_argument("event generation rates must be non-negative");
    }
    for (const auto& obj : scene_) obj.validate();
    last_cells_ = edge_cells(last_pose_);
    if (config_.noise_rate_hz > 0.0) {
        noise_next_t_us_ = last_t_us_ + static_cast<std::uint64_t>(
            noise_rng_.exponential(config_.noise_rate_hz) * 1e6) + 1;
    }
}

std::vector<std::int32_t> EventGenerator::edge_cells(const CameraPose& pose) const {
    scratch_.clear();
    for (const auto& obj : scene_) {
        const std::size_t n = obj.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& wa = obj.vertices[i];
            const Vec2& wb = obj.vertices[(i + 1) % n];
            const auto pa = project(camera_, pose, {wa.x, wa.y, obj.height});
            const auto pb = project(camera_, pose, {wb.x, wb.y, obj.height});
            if (!pa || !pb) continue;  // edge behind the camera, nothing to sweep
            rasterize_segment(*pa, *pb, camera_.width, camera_.height, scratch_);
        }
    }
    std::sort(scratch_.begin(), scratch_.end());
    scratch_.erase(std::unique(scratch_.begin(), scratch_.end()), scratch_.end());
    return scratch_;
}

void EventGenerator::step_interval(const CameraPose& to, std::uint64_t t_to_us,
                                   std::vector<Event>& out) {
    const std::uint64_t t_from = last_t_us_;
    const std::uint64_t span = t_to_us - t_from;
    std::vector<std::int32_t> cells = edge_cells(to);

    const auto emit = [&](std::int32_t idx, std::int8_t pol) {
        const double epc = config_.events_per_crossing;
        int count = static_cast<int>(epc);
        const double frac = epc - count;
        if (frac > 0.0 && motion_rng_.uniform() < frac) ++count;
        for (int k = 0; k < count; ++k) {
            std::uint64_t t = span > 0 ? t_from + 1 + motion_rng_.below(span) : t_to_us;
            out.push_back({static_cast<std::uint16_t>(idx % camera_.width),
                           static_cast<std::uint16_t>(idx / camera_.width), t, pol});
        }
    };

    // Walk both sorted unique sets; +1 where an edge enters a pixel, -1 where
    // it leaves.
    std::size_t i = 0, j = 0;
    while (i < last_cells_.size() || j < cells.size()) {
        if (j >= cells.size() || (i < last_cells_.size() && last_cells_[i] < cells[j])) {
            emit(last_cells_[i], -1);
            ++i;
        } else if (i >= last_cells_.size() || cells[j] < last_cells_[i]) {
            emit(cells[j], +1);
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    last_cells_ = std::move(cells);
    last_pose_ = to;
    last_t_us_ = t_to_us;
}

std::vector<Event> EventGenerator::advance(const CameraPose& to, std::uint64_t t_to_us) {
    if (t_to_us <= last_t_us_) {
        throw ContractViolation("trajectory times must be strictly increasing");
    }
    const std::uint64_t t_begin = last_t_us_;
    const CameraPose from = last_pose_;
    const std::uint64_t span = t_to_us - t_begin;
    const auto step_us = static_cast<std::uint64_t>(1e6 / sample_rate_hz_);
    const int n_steps = std::max<int>(1, static_cast<int>((span + step_us - 1) / step_us));

    std::vector<Event> out;
    const double dyaw = wrap_angle(to.yaw - from.yaw);
    for (int s = 1; s <= n_steps; ++s) {
        const double f = static_cast<double>(s) / n_steps;
        CameraPose p;
        p.position = from.position + (to.position - from.position) * f;
        p.yaw = from.yaw + dyaw * f;
        const std::uint64_t t = s == n_steps
            ? t_to_us
            : t_begin + static_cast<std::uint64_t>(span * f);
        if (t <= last_t_us_) continue;
        step_interval(p, t, out);
    }
    last_pose_ = to;

    if (config_.noise_rate_hz > 0.0) {
        while (noise_next_t_us_ <= t_to_us) {
            const auto idx = noise_rng_.below(
                static_cast<std::uint64_t>(camera_.width) * camera_.height);
            out.push_back({static_cast<std::uint16_t>(idx % camera_.width),
                           static_cast<std::uint16_t>(idx / camera_.width),
                           noise_next_t_us_,
                           static_cast<std::int8_t>(noise_rng_.below(2) == 0 ? -1 : 1)});
            noise_next_t_us_ += static_cast<std::uint64_t>(
                noise_rng_.exponential(config_.noise_rate_hz) * 1e6) + 1;
        }
    }

    if (config_.jitter_sigma_us > 0.0) {
        for (auto& e : out) {
            const double j = motion_rng_.gaussian() * config_.jitter_sigma_us;
            const double t = static_cast<double>(e.t) + j;
            const double lo = static_cast<double>(t_begin + 1);
            const double hi = static_cast<double>(t_to_us);
            e.t = static_cast<std::uint64_t>(std::min(hi, std::max(lo, std::round(t))));
        }
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return out;
}

std::vector<Event> generate_events(const std::vector<SceneObject>& scene,
                                   const CameraModel& camera,
                                   const std::vector<TimedPose>& trajectory,
                                   const EventGenConfig& config) {
    if (trajectory.empty()) throw std::invalid_argument("trajectory must not be empty");
    EventGenerator gen(scene, camera, trajectory.front().pose, trajectory.front().t_us, config);
    std::vector<Event> out;
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        auto chunk = gen.advance(trajectory[i].pose, trajectory[i].t_us);
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

}  // namespace ebvs
