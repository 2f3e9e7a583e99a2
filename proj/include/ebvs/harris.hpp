#pragma once

#include <array>
#include <vector>

#include "ebvs/event.hpp"

namespace ebvs {

/// Per-event corner classifier configuration. The 5x5 Sobel pair is the
/// separable extension of the 3x3 operator, smoothing [1 4 6 4 1] (x)
/// derivative [-1 -2 0 2 1], normalized by the largest coefficient (12):
///   Gx = s * d^T / 12, row r, col c:  Gx[r][c] = s[r] d[c] / 12
///   Gy = Gx^T
/// so e.g. the center rows of Gx are [-6 -12 0 12 6] / 12.
struct HarrisConfig {
    double corner_threshold = 5.0;  // HC_th
    int newest_event_count = 20;    // N
    int patch_size = 9;             // odd, >= 5
    double harris_k = 0.04;
    enum class Window { Gaussian, Uniform } window = Window::Gaussian;

    /// Validates and precomputes the window weights (normalized to sum 1,
    /// sigma = patch_size/6 for the Gaussian form).
    void build();

    const std::vector<double>& window_weights() const { return weights_; }
    bool built() const { return !weights_.empty(); }

private:
    std::vector<double> weights_;
};

/// The 5x5 derivative kernels described above, row-major, offsets -2..+2.
const std::array<double, 25>& sobel5_x();
const std::array<double, 25>& sobel5_y();

/// Patch of the SAE around one event, binarized by the newest N events.
struct BinaryPatch {
    int n = 0;
    std::vector<double> bits;  // n*n, values 0.0 / 1.0

    double at(int r, int c) const { return bits[r * n + c]; }
};

/// Binarizes the SAE window centered on (u,v): the N most recent occupied
/// cells get bit 1 (cells outside sensor bounds count as empty). The
/// triggering event always occupies one slot; remaining slots go to the
/// largest timestamps, ties broken by row-major pixel order.
BinaryPatch binarize_patch(const TimeSurface& sae, int u, int v, const HarrisConfig& config);

/// Harris response of a binary patch: 5x5 Sobel gradients with zero padding,
/// window-weighted structure tensor, det - k*trace^2.
double harris_score(const BinaryPatch& patch, const HarrisConfig& config);

enum class EventClass { Corner, Edge, Flat };

/// Corner when score >= HC_th, Edge when score < 0, Flat otherwise. The event
/// must already be applied to the SAE.
EventClass classify_event(const TimeSurface& sae, const Event& e, const HarrisConfig& config);

}  // namespace ebvs
