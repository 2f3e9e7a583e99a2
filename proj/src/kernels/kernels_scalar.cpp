#include "ebvs/kernels.hpp"

#include <algorithm>

// Reference implementations. Written for clarity; the AVX2 file mirrors these
// loop-for-loop so the pair can be checked against each other.

namespace ebvs::kernels {
namespace {

void scale_scalar(double* data, std::size_t n, double factor) {
    for (std::size_t i = 0; i < n; ++i) data[i] *= factor;
}

void add_patch_scalar(double* grid, int width, int height, int cx, int cy,
                      const double* patch, int radius) {
    const int side = 2 * radius + 1;
    const int y0 = std::max(0, cy - radius);
    const int y1 = std::min(height - 1, cy + radius);
    const int x0 = std::max(0, cx - radius);
    const int x1 = std::min(width - 1, cx + radius);
    for (int y = y0; y <= y1; ++y) {
        const double* prow = patch + (y - cy + radius) * side + (x0 - cx + radius);
        double* grow = grid + y * width + x0;
        for (int x = 0; x <= x1 - x0; ++x) grow[x] += prow[x];
    }
}

void row_max_scalar(const double* src, double* dst, int width, int height, int lo, int hi) {
    for (int r = 0; r < height; ++r) {
        const double* s = src + r * width;
        double* d = dst + r * width;
        for (int c = 0; c < width; ++c) {
            const int c0 = std::max(0, c + lo);
            const int c1 = std::min(width - 1, c + hi);
            double m = s[c0];
            for (int cc = c0 + 1; cc <= c1; ++cc) m = std::max(m, s[cc]);
            d[c] = m;
        }
    }
}

void col_max_scalar(const double* src, double* dst, int width, int height, int lo, int hi) {
    for (int r = 0; r < height; ++r) {
        const int r0 = std::max(0, r + lo);
        const int r1 = std::min(height - 1, r + hi);
        double* d = dst + r * width;
        const double* s0 = src + r0 * width;
        for (int c = 0; c < width; ++c) d[c] = s0[c];
        for (int rr = r0 + 1; rr <= r1; ++rr) {
            const double* s = src + rr * width;
            for (int c = 0; c < width; ++c) d[c] = std::max(d[c], s[c]);
        }
    }
}

double max_value_scalar(const double* data, std::size_t n) {
    double m = data[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, data[i]);
    return m;
}

void sobel5_scalar(const double* patch, int n, const double* kx, const double* ky,
                   double* ix, double* iy) {
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double gx = 0.0, gy = 0.0;
            for (int dr = -2; dr <= 2; ++dr) {
                const int rr = r + dr;
                if (rr < 0 || rr >= n) continue;
                const double* prow = patch + rr * n;
                const double* kxrow = kx + (dr + 2) * 5;
                const double* kyrow = ky + (dr + 2) * 5;
                for (int dc = -2; dc <= 2; ++dc) {
                    const int cc = c + dc;
                    if (cc < 0 || cc >= n) continue;
                    gx += kxrow[dc + 2] * prow[cc];
                    gy += kyrow[dc + 2] * prow[cc];
                }
            }
            ix[r * n + c] = gx;
            iy[r * n + c] = gy;
        }
    }
}

void structure_tensor_scalar(const double* ix, const double* iy, const double* w,
                             std::size_t n, double* a, double* b, double* c) {
    double sa = 0.0, sb = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += w[i] * ix[i] * ix[i];
        sb += w[i] * ix[i] * iy[i];
        sc += w[i] * iy[i] * iy[i];
    }
    *a = sa;
    *b = sb;
    *c = sc;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",
        scale_scalar,
        add_patch_scalar,
        row_max_scalar,
        col_max_scalar,
        max_value_scalar,
        sobel5_scalar,
        structure_tensor_scalar,
    };
    return ops;
}

}  // namespace ebvs::kernels
