#pragma once

#include <cstddef>
#include <string_view>

namespace ebvs::kernels {

// Grid arithmetic behind the heat map and the patch detector. Every entry has
// a scalar reference implementation; on x86 an AVX2 variant is selected at
// runtime when the CPU supports it. The two are equivalence-tested: scale,
// add_patch, row_max, col_max and max_value are bit-identical (single mul/add/
// max per element), the convolution and tensor reductions agree to 1e-12.
struct Ops {
    const char* name;

    /// data[i] *= factor
    void (*scale)(double* data, std::size_t n, double factor);

    /// grid[(cy+dy)*width + (cx+dx)] += patch[(dy+radius)*(2*radius+1) + (dx+radius)]
    /// for dx,dy in [-radius, radius], clipped to grid bounds.
    void (*add_patch)(double* grid, int width, int height, int cx, int cy,
                      const double* patch, int radius);

    /// dst[r*w+c] = max(src[r*w+cc]) over cc in [c+lo, c+hi] clipped to the row.
    void (*row_max)(const double* src, double* dst, int width, int height, int lo, int hi);

    /// dst[r*w+c] = max(src[rr*w+c]) over rr in [r+lo, r+hi] clipped to the column.
    void (*col_max)(const double* src, double* dst, int width, int height, int lo, int hi);

    double (*max_value)(const double* data, std::size_t n);

    /// 5x5 correlation of an n x n patch with zero padding outside the patch.
    /// kx/ky are row-major 5x5 kernels (offset -2..+2); writes n x n outputs.
    void (*sobel5)(const double* patch, int n, const double* kx, const double* ky,
                   double* ix, double* iy);

    /// a = sum w*ix*ix, b = sum w*ix*iy, c = sum w*iy*iy over n entries.
    void (*structure_tensor)(const double* ix, const double* iy, const double* w,
                             std::size_t n, double* a, double* b, double* c);
};

const Ops& scalar_ops();

/// True when an AVX2 build is compiled in and this CPU supports it.
bool avx2_available();
const Ops& avx2_ops();

/// The runtime-selected table. Honors select() and the EBVS_KERNELS
/// environment variable ("scalar", "avx2", "auto"); defaults to the widest
/// variant the CPU supports.
const Ops& active();
void select(std::string_view name);

}  // namespace ebvs::kernels
