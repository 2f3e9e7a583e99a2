#include "ebvs/tracker.hpp"

#include <cmath>
#include <limits>

namespace ebvs {

void TrackedFeatureSet::refresh_centroid() {
    Vec2 sum{};
    for (const auto& c : corners_) sum += c;
    centroid_ = corners_.empty() ? Vec2{} : sum * (1.0 / static_cast<double>(corners_.size()));
}

bool TrackedFeatureSet::seed_from_peaks(const PeakSet& peaks, std::uint64_t t) {
    if (peaks.size() < 3) return false;
    corners_.clear();
    corner_update_us_.clear();
    for (const auto& p : peaks.peaks) {
        corners_.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
        corner_update_us_.push_back(t);
    }
    refresh_centroid();
    mode_ = TrackMode::Tracking;
    strikes_ = 0;
    confirmations_ = 0;
    last_validation_us_ = t;
    return true;
}

void TrackedFeatureSet::assimilate(const Vec2& corner_event, std::uint64_t t) {
    if (mode_ != TrackMode::Tracking || corners_.empty()) return;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < corners_.size(); ++i) {
        const double d = (corners_[i] - corner_event).norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best_d > config_.gate_px) return;  // clutter
    corners_[best] = corners_[best] * 0.9 + corner_event * 0.1;
    corner_update_us_[best] = t;
    refresh_centroid();
}

bool TrackedFeatureSet::validate(const PeakSet& peaks, std::uint64_t t) {
    last_validation_us_ = t;
    if (mode_ != TrackMode::Tracking) return false;

    bool bad = peaks.empty() || peaks.size() != corners_.size();
    if (!bad) {
        for (const auto& c : corners_) {
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& p : peaks.peaks) {
                const double d = (c - Vec2{static_cast<double>(p.x),
                                           static_cast<double>(p.y)}).norm();
                best_d = std::min(best_d, d);
            }
            if (best_d > config_.discrepancy_px) {
                bad = true;
                break;
            }
        }
    }

    if (!bad) {
        strikes_ = 0;
        ++confirmations_;
        last_confirmation_us_ = t;
        return false;
    }
    if (++strikes_ < config_.max_strikes) return false;

    // Lost: fall back to detection mode, reseeded from whatever the heat map
    // currently supports.
    mode_ = TrackMode::Detecting;
    strikes_ = 0;
    confirmations_ = 0;
    corners_.clear();
    corner_update_us_.clear();
    for (const auto& p : peaks.peaks) {
        corners_.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
        corner_update_us_.push_back(t);
    }
    refresh_centroid();
    return true;
}

}  // namespace ebvs
