#include "ebvs/event.hpp"

#include <algorithm>

namespace ebvs {

std::vector<SurfaceSample> TimeSurface::snapshot_recent(std::uint64_t now,
                                                        std::uint64_t horizon) const {
    if (horizon == 0) throw std::invalid_argument("horizon must be > 0");
    std::vector<SurfaceSample> out;
    for (int v = 0; v < height_; ++v) {
        const std::uint64_t* row = cells_.data() + static_cast<std::size_t>(v) * width_;
        for (int u = 0; u < width_; ++u) {
            const std::uint64_t t = row[u];
            if (t == kEmpty || t > now || now - t > horizon) continue;
            out.push_back({static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v), t});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SurfaceSample& a, const SurfaceSample& b) { return a.t < b.t; });
    return out;
}

}  // namespace ebvs
