#include "ebvs/heatmap.hpp"

#include <cmath>
#include <stdexcept>

#include "ebvs/kernels.hpp"

namespace ebvs {

CornerHeatMap::CornerHeatMap(int width, int height, const HeatMapConfig& config)
    : width_(width), height_(height), config_(config) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("heat map size");
    if (config_.sigma <= 0.0 || config_.alpha <= 0.0 || config_.tau < 0.0) {
        throw std::invalid_argument("heat map parameters must be positive");
    }
    if (config_.peak_threshold <= 0.0 || config_.peak_threshold > 1.0) {
        throw std::invalid_argument("peak_threshold must be in (0, 1]");
    }
    if (config_.dilation_window < 2) throw std::invalid_argument("dilation_window too small");
    radius_ = config_.kernel_radius > 0
        ? config_.kernel_radius
        : static_cast<int>(std::ceil(3.0 * config_.sigma));
    values_.assign(static_cast<std::size_t>(width_) * height_, 0.0);

    const int side = 2 * radius_ + 1;
    kernel_.resize(static_cast<std::size_t>(side) * side);
    const double inv_two_sigma2 = 0.5 / (config_.sigma * config_.sigma);
    for (int dy = -radius_; dy <= radius_; ++dy) {
        for (int dx = -radius_; dx <= radius_; ++dx) {
            kernel_[(dy + radius_) * side + (dx + radius_)] =
                config_.alpha * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
        }
    }
}

void CornerHeatMap::decay_to(std::uint64_t t) {
    if (t < last_update_us_) {
        throw ContractViolation("heat map decayed backwards in time");
    }
    const std::uint64_t elapsed = t - last_update_us_;
    if (elapsed > 0) {
        const double factor = std::exp(-config_.tau * static_cast<double>(elapsed) / 1e6);
        kernels::active().scale(values_.data(), values_.size(), factor);
    }
    last_update_us_ = t;
}

void CornerHeatMap::deposit(int x, int y, std::uint64_t t) {
    if (x < 0 || x >= width_ || y < 0 || y >= height_) {
        throw ContractViolation("corner deposit outside heat map");
    }
    decay_to(t);
    kernels::active().add_patch(values_.data(), width_, height_, x, y, kernel_.data(), radius_);
}

double CornerHeatMap::max_value() const {
    return kernels::active().max_value(values_.data(), values_.size());
}

PeakSet CornerHeatMap::extract_peaks() const {
    PeakSet out;
    const double gmax = max_value();
    if (gmax <= 0.0) return out;

    // Window offsets for an even window cover [-(w-1)/2, w/2]; 10 -> [-4, +5].
    const int w = config_.dilation_window;
    const int lo = -((w - 1) / 2);
    const int hi = w / 2;

    scratch_a_.resize(values_.size());
    scratch_b_.resize(values_.size());
    const auto& ops = kernels::active();
    ops.row_max(values_.data(), scratch_a_.data(), width_, height_, lo, hi);
    ops.col_max(scratch_a_.data(), scratch_b_.data(), width_, height_, lo, hi);

    const double threshold = config_.peak_threshold * gmax;
    const int suppress = std::max(-lo, hi);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
            const double v = values_[i];
            if (v <= 0.0 || v < threshold || v != scratch_b_[i]) continue;
            // Plateaus and asymmetric-window edge cases: first row-major cell
            // within the window wins.
            bool shadowed = false;
            for (const auto& p : out.peaks) {
                if (std::abs(p.x - x) <= suppress && std::abs(p.y - y) <= suppress) {
                    shadowed = true;
                    break;
                }
            }
            if (!shadowed) out.peaks.push_back({x, y, v});
        }
    }
    return out;
}

std::optional<Vec2> compute_centroid(const PeakSet& peaks) {
    if (peaks.empty()) return std::nullopt;
    Vec2 sum{};
    for (const auto& p : peaks.peaks) sum += Vec2{static_cast<double>(p.x),
                                                  static_cast<double>(p.y)};
    return sum * (1.0 / static_cast<double>(peaks.size()));
}

}  // namespace ebvs
