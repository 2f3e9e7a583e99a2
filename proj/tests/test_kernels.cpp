#include <doctest.h>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ebvs/kernels.hpp"
#include "ebvs/rng.hpp"

using namespace ebvs;

namespace {

std::vector<double> random_grid(Rng& rng, std::size_t n) {
    std::vector<double> g(n);
    for (auto& v : g) v = rng.uniform(0.0, 10.0);
    return g;
}

}  // namespace

// Scalar and AVX2 variants must agree: exactly where the math is a single
// mul/add/max per element, to 1e-12 where the reduction order differs.
TEST_CASE("scalar and avx2 kernels are equivalent") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available on this machine, skipping equivalence checks");
        return;
    }
    const auto& s = kernels::scalar_ops();
    const auto& v = kernels::avx2_ops();
    Rng rng(2024);

    SUBCASE("scale is bit-identical") {
        for (int trial = 0; trial < 20; ++trial) {
            auto a = random_grid(rng, 533);
            auto b = a;
            const double f = rng.uniform(0.1, 0.999);
            s.scale(a.data(), a.size(), f);
            v.scale(b.data(), b.size(), f);
            CHECK(a == b);
        }
    }

    SUBCASE("add_patch is bit-identical, including clipped borders") {
        const int w = 61, h = 47, r = 6;
        auto patch = random_grid(rng, (2 * r + 1) * (2 * r + 1));
        for (int trial = 0; trial < 50; ++trial) {
            auto a = random_grid(rng, static_cast<std::size_t>(w) * h);
            auto b = a;
            const int cx = static_cast<int>(rng.below(w));
            const int cy = static_cast<int>(rng.below(h));
            s.add_patch(a.data(), w, h, cx, cy, patch.data(), r);
            v.add_patch(b.data(), w, h, cx, cy, patch.data(), r);
            CHECK(a == b);
        }
    }

    SUBCASE("row_max and col_max are bit-identical") {
        const int w = 240, h = 180;
        auto g = random_grid(rng, static_cast<std::size_t>(w) * h);
        std::vector<double> a(g.size()), b(g.size());
        for (const auto& [lo, hi] : std::vector<std::pair<int,int>>{{-4, 5}, {-5, 4}, {-1, 1}, {0, 9}}) {
            s.row_max(g.data(), a.data(), w, h, lo, hi);
            v.row_max(g.data(), b.data(), w, h, lo, hi);
            CHECK(a == b);
            s.col_max(g.data(), a.data(), w, h, lo, hi);
            v.col_max(g.data(), b.data(), w, h, lo, hi);
            CHECK(a == b);
        }
    }

    SUBCASE("max_value is bit-identical") {
        for (std::size_t n : {1u, 3u, 4u, 5u, 1023u, 43200u}) {
            auto g = random_grid(rng, n);
            CHECK(s.max_value(g.data(), n) == v.max_value(g.data(), n));
        }
    }

    SUBCASE("sobel5 and structure_tensor agree to 1e-12") {
        const int n = 9;
        std::vector<double> kx(25), ky(25);
        for (int i = 0; i < 25; ++i) {
            kx[i] = rng.uniform(-1.0, 1.0);
            ky[i] = rng.uniform(-1.0, 1.0);
        }
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> patch(n * n);
            for (auto& p : patch) p = rng.below(2) ? 1.0 : 0.0;
            std::vector<double> ix_a(n * n), iy_a(n * n), ix_b(n * n), iy_b(n * n);
            s.sobel5(patch.data(), n, kx.data(), ky.data(), ix_a.data(), iy_a.data());
            v.sobel5(patch.data(), n, kx.data(), ky.data(), ix_b.data(), iy_b.data());
            for (int i = 0; i < n * n; ++i) {
                CHECK(ix_a[i] == doctest::Approx(ix_b[i]).epsilon(1e-12));
                CHECK(iy_a[i] == doctest::Approx(iy_b[i]).epsilon(1e-12));
            }
            auto weights = random_grid(rng, n * n);
            double a0, b0, c0, a1, b1, c1;
            s.structure_tensor(ix_a.data(), iy_a.data(), weights.data(), weights.size(),
                               &a0, &b0, &c0);
            v.structure_tensor(ix_b.data(), iy_b.data(), weights.data(), weights.size(),
                               &a1, &b1, &c1);
            CHECK(a0 == doctest::Approx(a1).epsilon(1e-12));
            CHECK(b0 == doctest::Approx(b1).epsilon(1e-12));
            CHECK(c0 == doctest::Approx(c1).epsilon(1e-12));
        }
    }
}

TEST_CASE("runtime selection") {
    kernels::select("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
    if (kernels::avx2_available()) {
        kernels::select("avx2");
        CHECK(std::string(kernels::active().name) == "avx2");
    }
    kernels::select("auto");
    CHECK_THROWS(kernels::select("sse9"));
}

TEST_CASE("row_max window semantics") {
    // 1D row, window [-1, 2]: each output is the max over that offset range.
    const double src[6] = {1, 5, 2, 0, 7, 3};
    double dst[6];
    kernels::scalar_ops().row_max(src, dst, 6, 1, -1, 2);
    const double want[6] = {5, 5, 7, 7, 7, 7};
    for (int i = 0; i < 6; ++i) CHECK(dst[i] == want[i]);
}
