#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ebvs {

/// Thrown on stream-contract breaches: out-of-bounds pixels, decreasing
/// timestamps. These indicate a simulator or parser bug, never a data
/// condition to recover from.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// One asynchronous brightness-change sample.
struct Event {
    std::uint16_t u = 0;        // pixel column
    std::uint16_t v = 0;        // pixel row
    std::uint64_t t = 0;        // microseconds
    std::int8_t polarity = 1;   // +1 / -1; recorded but unused downstream
};

enum class VirtualKind : std::uint8_t {
    DesiredCenter,    // p_cc, the sensor-plane center, fixed for a run
    RandomTarget,     // p_vr, exploration goal
    ObjectCentroid,   // p_voc, extracted high-level feature
    AlignmentTarget,  // p_va, grasp-alignment goal
};

/// A feature or goal stamped into the virtual-event surface without having
/// been sensed. Timestamped with the pipeline's current time.
struct VirtualEvent {
    std::uint16_t u = 0;
    std::uint16_t v = 0;
    std::uint64_t t = 0;
    VirtualKind kind = VirtualKind::ObjectCentroid;
};

enum class SurfaceLayer : std::uint8_t { SAE, SACE, SAVE };

struct SurfaceSample {
    std::uint16_t u;
    std::uint16_t v;
    std::uint64_t t;
};

/// Per-pixel latest-timestamp grid. Instantiated three times: raw events
/// (SAE), corner events (SACE) and virtual events (SAVE). Cells that never
/// fired hold an explicit empty sentinel so a t=0 event stays representable.
class TimeSurface {
public:
    static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

    TimeSurface(int width, int height, SurfaceLayer layer)
        : width_(width), height_(height), layer_(layer),
          cells_(static_cast<std::size_t>(width) * height, kEmpty) {
        if (width <= 0 || height <= 0) throw std::invalid_argument("surface size");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    SurfaceLayer layer() const { return layer_; }

    bool in_bounds(int u, int v) const {
        return u >= 0 && u < width_ && v >= 0 && v < height_;
    }

    /// Writes the cell under the event to the event's timestamp.
    void apply(int u, int v, std::uint64_t t) {
        if (!in_bounds(u, v)) {
            throw ContractViolation("event outside surface bounds");
        }
        cells_[static_cast<std::size_t>(v) * width_ + u] = t;
    }
    void apply(const Event& e) { apply(e.u, e.v, e.t); }
    void apply(const VirtualEvent& e) { apply(e.u, e.v, e.t); }

    std::uint64_t at(int u, int v) const {
        return cells_[static_cast<std::size_t>(v) * width_ + u];
    }
    bool occupied(int u, int v) const { return at(u, v) != kEmpty; }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (auto t : cells_) n += (t != kEmpty);
        return n;
    }

    /// All cells with now - t <= horizon, sorted by t ascending (row-major for
    /// equal timestamps). Cells stamped past `now` are not returned.
    std::vector<SurfaceSample> snapshot_recent(std::uint64_t now, std::uint64_t horizon) const;

    const std::vector<std::uint64_t>& cells() const { return cells_; }

private:
    int width_;
    int height_;
    SurfaceLayer layer_;
    std::vector<std::uint64_t> cells_;
};

/// Enforces the global stream contract: timestamps must be non-decreasing.
/// Sits at every entry point into the pipeline (generator output, file reader,
/// live feed); a violation is surfaced, never silently reordered.
class StreamOrderGuard {
public:
    void check(std::uint64_t t) {
        if (has_last_ && t < last_t_) {
            throw ContractViolation("event stream timestamp decreased");
        }
        last_t_ = t;
        has_last_ = true;
    }
    std::uint64_t last() const { return last_t_; }

private:
    std::uint64_t last_t_ = 0;
    bool has_last_ = false;
};

}  // namespace ebvs
