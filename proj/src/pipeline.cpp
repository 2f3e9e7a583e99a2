#include "ebvs/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ebvs/event_io.hpp"

namespace ebvs {

PerceptionPipeline::PerceptionPipeline(int width, int height, PipelineConfig config)
    : config_(std::move(config)),
      sae_(width, height, SurfaceLayer::SAE),
      sace_(width, height, SurfaceLayer::SACE),
      save_(width, height, SurfaceLayer::SAVE),
      heatmap_(width, height, config_.heatmap),
      tracker_(config_.tracker),
      contiguity_(config_.contiguity_radius_px, config_.contiguity_stale_s) {
    if (!config_.harris.built()) config_.harris.build();
    detect_interval_us_ = static_cast<std::uint64_t>(config_.detection_interval_s * 1e6);
    validate_interval_us_ =
        static_cast<std::uint64_t>(config_.tracker.validation_interval_s * 1e6);
    next_detect_us_ = detect_interval_us_;
    next_validate_us_ = validate_interval_us_;
}

std::optional<Vec2> PerceptionPipeline::centroid() const {
    if (tracking()) return tracker_.centroid();
    return detection_centroid_;
}

void PerceptionPipeline::stamp_virtual(const VirtualEvent& e) { save_.apply(e); }

void PerceptionPipeline::stamp_centroid(const Vec2& c, std::uint64_t t) {
    const int u = static_cast<int>(std::lround(c.x));
    const int v = static_cast<int>(std::lround(c.y));
    if (save_.in_bounds(u, v)) {
        save_.apply(VirtualEvent{static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v),
                                 t, VirtualKind::ObjectCentroid});
    }
    contiguity_.on_centroid(c, t);
}

void PerceptionPipeline::run_boundaries_up_to(std::uint64_t t) {
    // Boundaries fire strictly from the event clock. At equal times the
    // detection step runs before the validation step.
    while (next_detect_us_ <= t || next_validate_us_ <= t) {
        if (next_detect_us_ <= next_validate_us_) {
            detection_step(next_detect_us_);
            next_detect_us_ += detect_interval_us_;
        } else {
            validation_step(next_validate_us_);
            next_validate_us_ += validate_interval_us_;
        }
    }
}

void PerceptionPipeline::detection_step(std::uint64_t t) {
    if (tracker_.mode() == TrackMode::Tracking) return;
    if (!heatmap_dirty_) return;  // no new corner evidence since the last look
    heatmap_.decay_to(t);
    last_peaks_ = heatmap_.extract_peaks();
    last_peaks_t_us_ = t;
    heatmap_dirty_ = false;
    if (last_peaks_.size() >= 3) {
        const auto c = compute_centroid(last_peaks_);
        detection_centroid_ = c;
        stamp_centroid(*c, t);
        if (contiguity_.count(t) >= config_.contiguity_threshold) {
            tracker_.seed_from_peaks(last_peaks_, t);
        }
    } else {
        detection_centroid_.reset();
    }
}

void PerceptionPipeline::validation_step(std::uint64_t t) {
    if (tracker_.mode() != TrackMode::Tracking) return;
    heatmap_.decay_to(t);
    last_peaks_ = heatmap_.extract_peaks();
    last_peaks_t_us_ = t;
    const bool lost = tracker_.validate(last_peaks_, t);
    if (lost) {
        ++tracking_losses_;
        contiguity_.reset();
        detection_centroid_.reset();
    }
    write_trace_row(t);
}

void PerceptionPipeline::write_trace_row(std::uint64_t t) {
    if (trace_sink_ == nullptr) return;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%llu,%s,%d", static_cast<unsigned long long>(t),
                  tracker_.mode() == TrackMode::Tracking ? "tracking" : "detecting",
                  tracker_.strikes());
    *trace_sink_ << buf;
    for (const auto& c : tracker_.corners()) {
        std::snprintf(buf, sizeof(buf), ",%.3f,%.3f", c.x, c.y);
        *trace_sink_ << buf;
    }
    const Vec2 cen = tracker_.centroid();
    std::snprintf(buf, sizeof(buf), ",%.3f,%.3f\n", cen.x, cen.y);
    *trace_sink_ << buf;
}

void PerceptionPipeline::feed(const Event& e) {
    order_.check(e.t);
    run_boundaries_up_to(e.t);
    sae_.apply(e);
    ++events_in_;

    const EventClass cls = classify_event(sae_, e, config_.harris);
    if (cls != EventClass::Corner) return;

    ++corner_events_;
    sace_.apply(e);
    heatmap_.deposit(e.u, e.v, e.t);
    heatmap_dirty_ = true;
    if (corner_sink_ != nullptr) write_event_line(*corner_sink_, e);

    if (tracker_.mode() == TrackMode::Tracking) {
        tracker_.assimilate({static_cast<double>(e.u), static_cast<double>(e.v)}, e.t);
        stamp_centroid(tracker_.centroid(), e.t);
    }
}

}  // namespace ebvs
