#include "ebvs/harris.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ebvs/kernels.hpp"

namespace ebvs {
namespace {

std::array<double, 25> build_sobel(bool x_direction) {
    const double smooth[5] = {1, 4, 6, 4, 1};
    const double deriv[5] = {-1, -2, 0, 2, 1};
    std::array<double, 25> k{};
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
            const double v = x_direction ? smooth[r] * deriv[c] : deriv[r] * smooth[c];
            k[r * 5 + c] = v / 12.0;  // largest raw coefficient is 6*2
        }
    }
    return k;
}

}  // namespace

const std::array<double, 25>& sobel5_x() {
    static const auto k = build_sobel(true);
    return k;
}

const std::array<double, 25>& sobel5_y() {
    static const auto k = build_sobel(false);
    return k;
}

void HarrisConfig::build() {
    if (patch_size < 5 || patch_size % 2 == 0) {
        throw std::invalid_argument("patch_size must be odd and >= 5");
    }
    if (newest_event_count < 1 || newest_event_count > patch_size * patch_size) {
        throw std::invalid_argument("newest_event_count must be in [1, patch_size^2]");
    }
    const int n = patch_size;
    const int c0 = n / 2;
    weights_.assign(static_cast<std::size_t>(n) * n, 1.0);
    if (window == Window::Gaussian) {
        const double sigma = static_cast<double>(n) / 6.0;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const double d2 = (r - c0) * (r - c0) + (c - c0) * (c - c0);
                weights_[r * n + c] = std::exp(-0.5 * d2 / (sigma * sigma));
            }
        }
    }
    double sum = 0.0;
    for (double w : weights_) sum += w;
    for (double& w : weights_) w /= sum;
}

BinaryPatch binarize_patch(const TimeSurface& sae, int u, int v, const HarrisConfig& config) {
    if (!config.built()) throw std::logic_error("HarrisConfig::build() not called");
    if (!sae.in_bounds(u, v)) throw ContractViolation("patch center outside surface");
    const int n = config.patch_size;
    const int half = n / 2;
    const int center_idx = half * n + half;

    BinaryPatch patch;
    patch.n = n;
    patch.bits.assign(static_cast<std::size_t>(n) * n, 0.0);

    // (timestamp, patch index) of occupied cells, excluding the center which
    // always takes one slot.
    struct Cell { std::uint64_t t; int idx; };
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(n) * n);
    for (int dr = -half; dr <= half; ++dr) {
        const int vv = v + dr;
        for (int dc = -half; dc <= half; ++dc) {
            const int uu = u + dc;
            if (!sae.in_bounds(uu, vv)) continue;
            if (!sae.occupied(uu, vv)) continue;
            const int idx = (dr + half) * n + (dc + half);
            if (idx == center_idx) continue;
            cells.push_back({sae.at(uu, vv), idx});
        }
    }
    patch.bits[center_idx] = 1.0;

    const int slots = config.newest_event_count - 1;
    if (static_cast<int>(cells.size()) > slots) {
        std::nth_element(cells.begin(), cells.begin() + slots, cells.end(),
                         [](const Cell& a, const Cell& b) {
                             return a.t != b.t ? a.t > b.t : a.idx < b.idx;
                         });
        cells.resize(slots);
    }
    for (const auto& c : cells) patch.bits[c.idx] = 1.0;
    return patch;
}

double harris_score(const BinaryPatch& patch, const HarrisConfig& config) {
    if (!config.built()) throw std::logic_error("HarrisConfig::build() not called");
    const int n = patch.n;
    const auto& ops = kernels::active();
    std::vector<double> ix(static_cast<std::size_t>(n) * n);
    std::vector<double> iy(static_cast<std::size_t>(n) * n);
    ops.sobel5(patch.bits.data(), n, sobel5_x().data(), sobel5_y().data(), ix.data(),
               iy.data());
    double a = 0.0, b = 0.0, c = 0.0;
    ops.structure_tensor(ix.data(), iy.data(), config.window_weights().data(),
                         static_cast<std::size_t>(n) * n, &a, &b, &c);
    const double det = a * c - b * b;
    const double trace = a + c;
    return det - config.harris_k * trace * trace;
}

EventClass classify_event(const TimeSurface& sae, const Event& e, const HarrisConfig& config) {
    const auto patch = binarize_patch(sae, e.u, e.v, config);
    const double score = harris_score(patch, config);
    if (score >= config.corner_threshold) return EventClass::Corner;
    if (score < 0.0) return EventClass::Edge;
    return EventClass::Flat;
}

}  // namespace ebvs
