#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ebvs/heatmap.hpp"
#include "ebvs/math.hpp"

namespace ebvs {

struct TrackerConfig {
    double gate_px = 8.0;             // nearest-corner association gate
    double discrepancy_px = 5.0;      // tracked-corner vs peak mismatch
    int max_strikes = 3;              // consecutive bad validations before reverting
    double validation_interval_s = 0.3;
};

enum class TrackMode { Detecting, Tracking };

/// The set of tracked object corners plus the derived centroid. Corner
/// positions follow incoming corner events through a moving average
/// (0.9 * old + 0.1 * new) and are cross-checked against heat-map peaks at
/// the validation cadence; persistent discrepancies revert the set to
/// detection mode.
class TrackedFeatureSet {
public:
    explicit TrackedFeatureSet(TrackerConfig config) : config_(config) {}

    TrackMode mode() const { return mode_; }
    const std::vector<Vec2>& corners() const { return corners_; }
    Vec2 centroid() const { return centroid_; }
    int strikes() const { return strikes_; }
    /// Clean validations since the last (re)seed; a track is only trusted for
    /// grasping once detection has confirmed it at least once.
    int confirmations() const { return confirmations_; }
    std::uint64_t last_confirmation() const { return last_confirmation_us_; }
    std::uint64_t last_validation() const { return last_validation_us_; }
    const TrackerConfig& config() const { return config_; }

    /// Starts tracking from >= 3 peaks; false (and no state change) otherwise.
    bool seed_from_peaks(const PeakSet& peaks, std::uint64_t t);

    /// Folds one corner event into the nearest tracked corner when it falls
    /// inside the gate; events outside the gate are clutter and ignored.
    void assimilate(const Vec2& corner_event, std::uint64_t t);

    /// Nearest-neighbor check of tracked corners against fresh peaks. Counts a
    /// strike when any corner strayed past the discrepancy threshold, the
    /// cardinality changed, or there are no peaks; a clean pass resets the
    /// count. Returns true when the strike limit was hit and the set reverted
    /// to detection mode (reseeded from the given peaks).
    bool validate(const PeakSet& peaks, std::uint64_t t);

private:
    void refresh_centroid();

    TrackerConfig config_;
    TrackMode mode_ = TrackMode::Detecting;
    std::vector<Vec2> corners_;
    std::vector<std::uint64_t> corner_update_us_;
    Vec2 centroid_{};
    int strikes_ = 0;
    int confirmations_ = 0;
    std::uint64_t last_confirmation_us_ = 0;
    std::uint64_t last_validation_us_ = 0;
};

}  // namespace ebvs
