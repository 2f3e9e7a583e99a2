#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ebvs/event.hpp"
#include "ebvs/math.hpp"

namespace ebvs {

struct HeatMapConfig {
    double alpha = 1.0;        // deposit scale
    double sigma = 2.0;        // deposit spread, px
    double tau = 5.0;          // decay rate per second
    int kernel_radius = 0;     // 0 = auto, ceil(3*sigma)
    double peak_threshold = 0.7;  // relative to the current map maximum
    int dilation_window = 10;     // local-max suppression window
};

struct Peak {
    int x = 0;
    int y = 0;
    double value = 0.0;
};

struct PeakSet {
    std::vector<Peak> peaks;

    std::size_t size() const { return peaks.size(); }
    bool empty() const { return peaks.empty(); }
};

/// Decaying Gaussian accumulation of corner events. Deposits add a truncated
/// Gaussian kernel (alpha * exp(-0.5*r^2/sigma^2) within kernel_radius);
/// decay multiplies the whole grid by exp(-tau * elapsed_seconds) and is
/// applied lazily before every deposit and snapshot, which is equivalent to
/// continuous decay by the semigroup property. Contributions outside the
/// truncation radius are dropped; any cell is off by at most
/// exp(-0.5*(3 sigma/sigma)^2) = exp(-4.5) per deposit.
class CornerHeatMap {
public:
    CornerHeatMap(int width, int height, const HeatMapConfig& config);

    /// Decays to t, then adds the Gaussian kernel centered on the corner.
    void deposit(int x, int y, std::uint64_t t);

    /// Elementwise H *= exp(-tau * (t - t_c)/1e6); t_c := t.
    void decay_to(std::uint64_t t);

    /// Local peaks: cells equal to the grayscale dilation of the map under the
    /// dilation window and not below peak_threshold times the map maximum.
    /// Exact-value plateaus resolve to the first cell in row-major order.
    PeakSet extract_peaks() const;

    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<double>& values() const { return values_; }
    std::uint64_t last_update() const { return last_update_us_; }
    double max_value() const;
    int width() const { return width_; }
    int height() const { return height_; }
    const HeatMapConfig& config() const { return config_; }

private:
    int width_;
    int height_;
    HeatMapConfig config_;
    int radius_;
    std::uint64_t last_update_us_ = 0;
    std::vector<double> values_;
    std::vector<double> kernel_;  // (2r+1)^2 precomputed deposit patch
    mutable std::vector<double> scratch_a_;
    mutable std::vector<double> scratch_b_;
};

/// Arithmetic mean of the peak coordinates; empty when there are no peaks
/// (the caller keeps exploring).
std::optional<Vec2> compute_centroid(const PeakSet& peaks);

}  // namespace ebvs
