#include <doctest.h>

#include <cmath>
#include <vector>

#include "ebvs/heatmap.hpp"
#include "ebvs/rng.hpp"

using namespace ebvs;

namespace {

HeatMapConfig default_config() { return {}; }

// Untruncated dense-evaluation oracle: every deposit contributes its full
// Gaussian to every cell.
std::vector<double> dense_oracle(int w, int h, const std::vector<std::pair<int, int>>& deposits,
                                 double alpha, double sigma) {
    std::vector<double> grid(static_cast<std::size_t>(w) * h, 0.0);
    for (const auto& [dx, dy] : deposits) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double d2 = (x - dx) * (x - dx) + (y - dy) * (y - dy);
                grid[y * w + x] += alpha * std::exp(-0.5 * d2 / (sigma * sigma));
            }
    }
    return grid;
}

}  // namespace

TEST_CASE("deposit evaluates the Gaussian exactly") {
    CornerHeatMap map(100, 100, default_config());
    map.deposit(50, 50, 0);
    CHECK(map.at(50, 50) == doctest::Approx(1.0).epsilon(1e-12));
    // two pixels away with sigma 2: exp(-0.5 * 4 / 4) = exp(-0.5)
    CHECK(map.at(50, 52) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(map.at(52, 50) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("deposits at the same pixel and time add up") {
    CornerHeatMap map(100, 100, default_config());
    map.deposit(50, 50, 7);
    map.deposit(50, 50, 7);
    CHECK(map.at(50, 50) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("deposits near the border clip cleanly") {
    CornerHeatMap map(100, 100, default_config());
    map.deposit(0, 0, 0);
    map.deposit(99, 99, 0);
    CHECK(map.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map.at(99, 99) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(map.deposit(100, 0, 0), ContractViolation);
}

TEST_CASE("200 seeded deposits match the dense oracle within the truncation bound") {
    const HeatMapConfig cfg = default_config();
    CornerHeatMap map(120, 90, cfg);
    Rng rng(31);
    std::vector<std::pair<int, int>> deposits;
    for (int i = 0; i < 200; ++i) {
        deposits.push_back({static_cast<int>(rng.below(120)), static_cast<int>(rng.below(90))});
        map.deposit(deposits.back().first, deposits.back().second, 0);
    }
    const auto oracle = dense_oracle(120, 90, deposits, cfg.alpha, cfg.sigma);

    const int radius = static_cast<int>(std::ceil(3.0 * cfg.sigma));
    const double per_deposit_bound = std::exp(-4.5);  // kernel value at the cut
    for (int y = 0; y < 90; ++y) {
        for (int x = 0; x < 120; ++x) {
            int truncated = 0;
            for (const auto& [dx, dy] : deposits) {
                if (std::abs(dx - x) > radius || std::abs(dy - y) > radius) ++truncated;
            }
            const double bound = per_deposit_bound * truncated + 1e-6;
            CHECK(std::abs(map.at(x, y) - oracle[y * 120 + x]) <= bound);
        }
    }
}

TEST_CASE("decay") {
    SUBCASE("zero elapsed leaves the map unchanged") {
        CornerHeatMap map(50, 50, default_config());
        map.deposit(25, 25, 1000);
        const double before = map.at(25, 25);
        map.decay_to(1000);
        CHECK(map.at(25, 25) == before);
    }

    SUBCASE("a single cell decays exponentially") {
        CornerHeatMap map(50, 50, default_config());  // tau = 5
        map.deposit(25, 25, 0);
        map.decay_to(200000);  // 0.2 s: factor e^-1
        CHECK(map.at(25, 25) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }

    SUBCASE("decay in two steps equals one step (semigroup) to 1e-12") {
        CornerHeatMap a(80, 60, default_config());
        CornerHeatMap b(80, 60, default_config());
        Rng rng(5);
        for (int i = 0; i < 50; ++i) {
            const int x = static_cast<int>(rng.below(80));
            const int y = static_cast<int>(rng.below(60));
            a.deposit(x, y, 0);
            b.deposit(x, y, 0);
        }
        a.decay_to(100000);
        a.decay_to(200000);
        b.decay_to(200000);
        for (int y = 0; y < 60; ++y)
            for (int x = 0; x < 80; ++x) {
                CHECK(a.at(x, y) == doctest::Approx(b.at(x, y)).epsilon(1e-12));
            }
    }

    SUBCASE("every positive value strictly decreases") {
        CornerHeatMap map(50, 50, default_config());
        map.deposit(20, 20, 0);
        std::vector<double> before = map.values();
        map.decay_to(50000);
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (before[i] > 0.0) CHECK(map.values()[i] < before[i]);
        }
    }

    SUBCASE("going backwards in time is a contract violation") {
        CornerHeatMap map(50, 50, default_config());
        map.deposit(10, 10, 1000);
        CHECK_THROWS_AS(map.decay_to(999), ContractViolation);
        CHECK_THROWS_AS(map.deposit(10, 10, 500), ContractViolation);
    }
}

TEST_CASE("deposit locality: cells beyond the kernel radius are untouched") {
    const HeatMapConfig cfg = default_config();
    CornerHeatMap map(100, 100, cfg);
    Rng rng(9);
    for (int i = 0; i < 30; ++i) {
        map.deposit(static_cast<int>(rng.below(100)), static_cast<int>(rng.below(100)), 0);
    }
    const auto before = map.values();
    map.deposit(50, 50, 0);  // same timestamp: no decay, pure add
    const int radius = static_cast<int>(std::ceil(3.0 * cfg.sigma));
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x) {
            if (std::abs(x - 50) > radius || std::abs(y - 50) > radius) {
                CHECK(map.at(x, y) == before[y * 100 + x]);
            }
        }
}

TEST_CASE("peak extraction") {
    SUBCASE("one Gaussian gives exactly one peak at the deposit pixel") {
        CornerHeatMap map(100, 100, default_config());
        map.deposit(40, 60, 0);
        const auto peaks = map.extract_peaks();
        REQUIRE(peaks.size() == 1);
        CHECK(peaks.peaks[0].x == 40);
        CHECK(peaks.peaks[0].y == 60);
    }

    SUBCASE("four Gaussians on a 60 px square give four peaks, matching a brute scan") {
        CornerHeatMap map(240, 180, default_config());
        const std::pair<int, int> corners[4] = {{60, 40}, {120, 40}, {60, 100}, {120, 100}};
        for (const auto& [x, y] : corners) {
            for (int k = 0; k < 5; ++k) map.deposit(x, y, 0);
        }
        const auto peaks = map.extract_peaks();
        REQUIRE(peaks.size() == 4);

        // Brute-force local-max oracle over every cell, window offsets [-4, 5].
        std::vector<std::pair<int, int>> oracle;
        const double thr = 0.7 * map.max_value();
        for (int y = 0; y < 180; ++y)
            for (int x = 0; x < 240; ++x) {
                const double v = map.at(x, y);
                if (v <= 0.0 || v < thr) continue;
                bool is_max = true;
                for (int dy = -4; dy <= 5 && is_max; ++dy)
                    for (int dx = -4; dx <= 5 && is_max; ++dx) {
                        const int xx = x + dx, yy = y + dy;
                        if (xx < 0 || xx >= 240 || yy < 0 || yy >= 180) continue;
                        if (map.at(xx, yy) > v) is_max = false;
                    }
                if (is_max) oracle.push_back({x, y});
            }
        REQUIRE(oracle.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(peaks.peaks[i].x == oracle[i].first);
            CHECK(peaks.peaks[i].y == oracle[i].second);
        }
    }

    SUBCASE("an all-zero map has no peaks") {
        CornerHeatMap map(64, 64, default_config());
        CHECK(map.extract_peaks().empty());
    }

    SUBCASE("peaks below 0.7 of the maximum are dropped") {
        CornerHeatMap map(100, 100, default_config());
        for (int k = 0; k < 10; ++k) map.deposit(20, 20, 0);
        for (int k = 0; k < 6; ++k) map.deposit(80, 80, 0);   // 0.6 of max
        auto peaks = map.extract_peaks();
        REQUIRE(peaks.size() == 1);
        CHECK(peaks.peaks[0].x == 20);

        for (int k = 0; k < 2; ++k) map.deposit(80, 80, 0);   // now 0.8 of max
        peaks = map.extract_peaks();
        CHECK(peaks.size() == 2);
    }

    SUBCASE("exact-value plateaus resolve to the first cell in row-major order") {
        HeatMapConfig cfg;
        cfg.kernel_radius = 1;
        cfg.sigma = 0.4;  // nearly a point deposit
        CornerHeatMap map(64, 64, cfg);
        map.deposit(30, 30, 0);
        map.deposit(33, 30, 0);  // same value, 3 px apart, inside one window
        const auto peaks = map.extract_peaks();
        REQUIRE(peaks.size() == 1);
        CHECK(peaks.peaks[0].x == 30);
        CHECK(peaks.peaks[0].y == 30);
    }
}

TEST_CASE("centroid") {
    SUBCASE("square of peaks averages to the center") {
        PeakSet s;
        s.peaks = {{10, 10, 1.0}, {30, 10, 1.0}, {30, 30, 1.0}, {10, 30, 1.0}};
        const auto c = compute_centroid(s);
        REQUIRE(c.has_value());
        CHECK(c->x == doctest::Approx(20.0));
        CHECK(c->y == doctest::Approx(20.0));
    }

    SUBCASE("single peak is its own centroid") {
        PeakSet s;
        s.peaks = {{42, 17, 1.0}};
        const auto c = compute_centroid(s);
        REQUIRE(c.has_value());
        CHECK(c->x == 42.0);
        CHECK(c->y == 17.0);
    }

    SUBCASE("random peaks match the summation oracle to 1e-12") {
        Rng rng(13);
        PeakSet s;
        double sx = 0.0, sy = 0.0;
        for (int i = 0; i < 5; ++i) {
            const int x = static_cast<int>(rng.below(240));
            const int y = static_cast<int>(rng.below(180));
            s.peaks.push_back({x, y, 1.0});
            sx += x;
            sy += y;
        }
        const auto c = compute_centroid(s);
        REQUIRE(c.has_value());
        CHECK(c->x == doctest::Approx(sx / 5.0).epsilon(1e-12));
        CHECK(c->y == doctest::Approx(sy / 5.0).epsilon(1e-12));
    }

    SUBCASE("no peaks means no feature") {
        CHECK_FALSE(compute_centroid(PeakSet{}).has_value());
    }
}
