#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "ebvs/event.hpp"
#include "ebvs/harris.hpp"
#include "ebvs/heatmap.hpp"
#include "ebvs/strategy.hpp"
#include "ebvs/tracker.hpp"

namespace ebvs {

struct PipelineConfig {
    HarrisConfig harris;
    HeatMapConfig heatmap;
    TrackerConfig tracker;
    double detection_interval_s = 0.01;  // peak-extraction cadence while detecting
    int contiguity_threshold = 3;        // seeds the tracker once crossed
    double contiguity_radius_px = 3.0;
    double contiguity_stale_s = 0.3;
};

/// The perception stack: SAE -> per-event corner classification -> SACE +
/// heat map -> peaks/centroid -> tracker. All internal cadences (peak
/// extraction, tracker validation) are driven by event timestamps, never by
/// a wall or control clock, so feeding the same event stream reproduces the
/// same outputs and trace bytes whether the stream is generated live or
/// replayed from a file.
class PerceptionPipeline {
public:
    PerceptionPipeline(int width, int height, PipelineConfig config);

    /// Optional sinks. The corner sink receives one v1 event line per corner
    /// classification; the trace sink receives one CSV row per validation:
    ///   t_us,mode,strikes,c0_x,c0_y,...,centroid_x,centroid_y
    void set_corner_sink(std::ostream* os) { corner_sink_ = os; }
    void set_trace_sink(std::ostream* os) { trace_sink_ = os; }

    void feed(const Event& e);

    /// Control-side virtual events (targets, desired center) stamped into the
    /// SAVE; does not influence perception.
    void stamp_virtual(const VirtualEvent& e);

    const TimeSurface& sae() const { return sae_; }
    const TimeSurface& sace() const { return sace_; }
    const TimeSurface& save() const { return save_; }
    const CornerHeatMap& heatmap() const { return heatmap_; }
    const TrackedFeatureSet& tracker() const { return tracker_; }
    const PeakSet& last_peaks() const { return last_peaks_; }
    std::uint64_t last_peaks_t_us() const { return last_peaks_t_us_; }

    bool tracking() const { return tracker_.mode() == TrackMode::Tracking; }
    /// Tracked centroid while tracking, else the latest detection centroid.
    std::optional<Vec2> centroid() const;
    int contiguity_count(std::uint64_t now) const { return contiguity_.count(now); }

    std::uint64_t events_in() const { return events_in_; }
    std::uint64_t corner_events() const { return corner_events_; }
    int tracking_losses() const { return tracking_losses_; }
    std::uint64_t now() const { return order_.last(); }

private:
    void run_boundaries_up_to(std::uint64_t t);
    void detection_step(std::uint64_t t);
    void validation_step(std::uint64_t t);
    void write_trace_row(std::uint64_t t);
    void stamp_centroid(const Vec2& c, std::uint64_t t);

    PipelineConfig config_;
    TimeSurface sae_;
    TimeSurface sace_;
    TimeSurface save_;
    CornerHeatMap heatmap_;
    TrackedFeatureSet tracker_;
    ContiguityMonitor contiguity_;
    StreamOrderGuard order_;

    PeakSet last_peaks_;
    std::uint64_t last_peaks_t_us_ = 0;
    std::optional<Vec2> detection_centroid_;
    bool heatmap_dirty_ = false;
    std::uint64_t detect_interval_us_;
    std::uint64_t validate_interval_us_;
    std::uint64_t next_detect_us_;
    std::uint64_t next_validate_us_;

    std::uint64_t events_in_ = 0;
    std::uint64_t corner_events_ = 0;
    int tracking_losses_ = 0;

    std::ostream* corner_sink_ = nullptr;
    std::ostream* trace_sink_ = nullptr;
};

}  // namespace ebvs
