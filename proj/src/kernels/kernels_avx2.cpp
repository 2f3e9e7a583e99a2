#include "ebvs/kernels.hpp"

// AVX2/FMA variants of the grid kernels. This translation unit is compiled
// with -mavx2 -mfma on x86_64 and omitted elsewhere; dispatch happens at
// runtime in kernels.cpp.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cstring>

namespace ebvs::kernels {
namespace {

void scale_avx2(double* data, std::size_t n, double factor) {
    const __m256d f = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(data + i, _mm256_mul_pd(_mm256_loadu_pd(data + i), f));
    }
    for (; i < n; ++i) data[i] *= factor;
}

void add_patch_avx2(double* grid, int width, int height, int cx, int cy,
                    const double* patch, int radius) {
    const int side = 2 * radius + 1;
    const int y0 = std::max(0, cy - radius);
    const int y1 = std::min(height - 1, cy + radius);
    const int x0 = std::max(0, cx - radius);
    const int x1 = std::min(width - 1, cx + radius);
    const int len = x1 - x0 + 1;
    for (int y = y0; y <= y1; ++y) {
        const double* prow = patch + (y - cy + radius) * side + (x0 - cx + radius);
        double* grow = grid + y * width + x0;
        int x = 0;
        for (; x + 4 <= len; x += 4) {
            _mm256_storeu_pd(grow + x, _mm256_add_pd(_mm256_loadu_pd(grow + x),
                                                     _mm256_loadu_pd(prow + x)));
        }
        for (; x < len; ++x) grow[x] += prow[x];
    }
}

void row_max_avx2(const double* src, double* dst, int width, int height, int lo, int hi) {
    for (int r = 0; r < height; ++r) {
        const double* s = src + r * width;
        double* d = dst + r * width;
        // Interior columns where the window never leaves the row.
        const int c_lo = std::max(0, -lo);
        const int c_hi = std::min(width - 1, width - 1 - hi);
        for (int c = 0; c < std::min(c_lo, width); ++c) {
            const int c0 = std::max(0, c + lo);
            const int c1 = std::min(width - 1, c + hi);
            double m = s[c0];
            for (int cc = c0 + 1; cc <= c1; ++cc) m = std::max(m, s[cc]);
            d[c] = m;
        }
        int c = c_lo;
        for (; c + 4 <= c_hi + 1; c += 4) {
            __m256d m = _mm256_loadu_pd(s + c + lo);
            for (int dc = lo + 1; dc <= hi; ++dc) {
                m = _mm256_max_pd(m, _mm256_loadu_pd(s + c + dc));
            }
            _mm256_storeu_pd(d + c, m);
        }
        for (; c < width; ++c) {
            const int c0 = std::max(0, c + lo);
            const int c1 = std::min(width - 1, c + hi);
            double m = s[c0];
            for (int cc = c0 + 1; cc <= c1; ++cc) m = std::max(m, s[cc]);
            d[c] = m;
        }
    }
}

void col_max_avx2(const double* src, double* dst, int width, int height, int lo, int hi) {
    for (int r = 0; r < height; ++r) {
        const int r0 = std::max(0, r + lo);
        const int r1 = std::min(height - 1, r + hi);
        double* d = dst + r * width;
        std::memcpy(d, src + r0 * width, sizeof(double) * static_cast<std::size_t>(width));
        for (int rr = r0 + 1; rr <= r1; ++rr) {
            const double* s = src + rr * width;
            int c = 0;
            for (; c + 4 <= width; c += 4) {
                _mm256_storeu_pd(d + c, _mm256_max_pd(_mm256_loadu_pd(d + c),
                                                      _mm256_loadu_pd(s + c)));
            }
            for (; c < width; ++c) d[c] = std::max(d[c], s[c]);
        }
    }
}

double max_value_avx2(const double* data, std::size_t n) {
    std::size_t i = 0;
    double m = data[0];
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(data);
        for (i = 4; i + 4 <= n; i += 4) {
            vm = _mm256_max_pd(vm, _mm256_loadu_pd(data + i));
        }
        __m128d hi128 = _mm256_extractf128_pd(vm, 1);
        __m128d lo128 = _mm256_castpd256_pd128(vm);
        __m128d m2 = _mm_max_pd(lo128, hi128);
        __m128d m1 = _mm_max_sd(m2, _mm_unpackhi_pd(m2, m2));
        m = _mm_cvtsd_f64(m1);
    }
    for (; i < n; ++i) m = std::max(m, data[i]);
    return m;
}

constexpr int kMaxPatch = 27;

void sobel5_avx2(const double* patch, int n, const double* kx, const double* ky,
                 double* ix, double* iy) {
    if (n > kMaxPatch) {
        scalar_ops().sobel5(patch, n, kx, ky, ix, iy);
        return;
    }
    // Zero-padded copy, 2 cells on each side, so every tap is a plain load.
    constexpr int kStride = kMaxPatch + 8;
    alignas(32) double padded[(kMaxPatch + 4) * kStride] = {};
    for (int r = 0; r < n; ++r) {
        std::memcpy(padded + (r + 2) * kStride + 2, patch + r * n,
                    sizeof(double) * static_cast<std::size_t>(n));
    }
    for (int r = 0; r < n; ++r) {
        for (int c0 = 0; c0 < n; c0 += 4) {
            __m256d gx = _mm256_setzero_pd();
            __m256d gy = _mm256_setzero_pd();
            for (int dr = 0; dr < 5; ++dr) {
                const double* prow = padded + (r + dr) * kStride + c0;
                for (int dc = 0; dc < 5; ++dc) {
                    const __m256d v = _mm256_loadu_pd(prow + dc);
                    gx = _mm256_fmadd_pd(_mm256_set1_pd(kx[dr * 5 + dc]), v, gx);
                    gy = _mm256_fmadd_pd(_mm256_set1_pd(ky[dr * 5 + dc]), v, gy);
                }
            }
            alignas(32) double tx[4], ty[4];
            _mm256_store_pd(tx, gx);
            _mm256_store_pd(ty, gy);
            const int lanes = std::min(4, n - c0);
            for (int l = 0; l < lanes; ++l) {
                ix[r * n + c0 + l] = tx[l];
                iy[r * n + c0 + l] = ty[l];
            }
        }
    }
}

void structure_tensor_avx2(const double* ix, const double* iy, const double* w,
                           std::size_t n, double* a, double* b, double* c) {
    __m256d va = _mm256_setzero_pd();
    __m256d vb = _mm256_setzero_pd();
    __m256d vc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wx = _mm256_loadu_pd(w + i);
        const __m256d gx = _mm256_loadu_pd(ix + i);
        const __m256d gy = _mm256_loadu_pd(iy + i);
        const __m256d wgx = _mm256_mul_pd(wx, gx);
        va = _mm256_fmadd_pd(wgx, gx, va);
        vb = _mm256_fmadd_pd(wgx, gy, vb);
        vc = _mm256_fmadd_pd(_mm256_mul_pd(wx, gy), gy, vc);
    }
    alignas(32) double ta[4], tb[4], tc[4];
    _mm256_store_pd(ta, va);
    _mm256_store_pd(tb, vb);
    _mm256_store_pd(tc, vc);
    double sa = ta[0] + ta[1] + ta[2] + ta[3];
    double sb = tb[0] + tb[1] + tb[2] + tb[3];
    double sc = tc[0] + tc[1] + tc[2] + tc[3];
    for (; i < n; ++i) {
        sa += w[i] * ix[i] * ix[i];
        sb += w[i] * ix[i] * iy[i];
        sc += w[i] * iy[i] * iy[i];
    }
    *a = sa;
    *b = sb;
    *c = sc;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops = {
        "avx2",
        scale_avx2,
        add_patch_avx2,
        row_max_avx2,
        col_max_avx2,
        max_value_avx2,
        sobel5_avx2,
        structure_tensor_avx2,
    };
    return ops;
}

}  // namespace ebvs::kernels

#else

namespace ebvs::kernels {
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace ebvs::kernels

#endif
