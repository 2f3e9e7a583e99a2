#include <doctest.h>

#include <chrono>
#include <cmath>

#include "ebvs/heatmap.hpp"
#include "ebvs/rng.hpp"
#include "ebvs/tracker.hpp"

using namespace ebvs;

namespace {

PeakSet square_peaks() {
    PeakSet s;
    s.peaks = {{100, 100, 1.0}, {140, 100, 1.0}, {140, 140, 1.0}, {100, 140, 1.0}};
    return s;
}

TrackedFeatureSet tracking_square() {
    TrackedFeatureSet t{TrackerConfig{}};
    REQUIRE(t.seed_from_peaks(square_peaks(), 0));
    return t;
}

}  // namespace

TEST_CASE("seeding") {
    SUBCASE("four square peaks seed four corners with the centroid at the center") {
        auto t = tracking_square();
        CHECK(t.mode() == TrackMode::Tracking);
        CHECK(t.corners().size() == 4);
        CHECK(t.centroid().x == doctest::Approx(120.0));
        CHECK(t.centroid().y == doctest::Approx(120.0));
    }

    SUBCASE("two peaks are not enough") {
        TrackedFeatureSet t{TrackerConfig{}};
        PeakSet s;
        s.peaks = {{10, 10, 1.0}, {20, 20, 1.0}};
        CHECK_FALSE(t.seed_from_peaks(s, 0));
        CHECK(t.mode() == TrackMode::Detecting);
    }

    SUBCASE("five pentagon peaks give the oracle mean") {
        TrackedFeatureSet t{TrackerConfig{}};
        PeakSet s;
        Rng rng(3);
        double sx = 0.0, sy = 0.0;
        for (int i = 0; i < 5; ++i) {
            const int x = 50 + static_cast<int>(rng.below(100));
            const int y = 50 + static_cast<int>(rng.below(100));
            s.peaks.push_back({x, y, 1.0});
            sx += x;
            sy += y;
        }
        REQUIRE(t.seed_from_peaks(s, 0));
        CHECK(t.centroid().x == doctest::Approx(sx / 5.0).epsilon(1e-12));
        CHECK(t.centroid().y == doctest::Approx(sy / 5.0).epsilon(1e-12));
    }
}

TEST_CASE("moving-average assimilation") {
    SUBCASE("a corner event at the tracked position is a fixed point") {
        auto t = tracking_square();
        t.assimilate({100.0, 100.0}, 1);
        CHECK(t.corners()[0].x == 100.0);
        CHECK(t.corners()[0].y == 100.0);
    }

    SUBCASE("0.9/0.1 blend within the gate") {
        auto t = tracking_square();
        t.assimilate({106.0, 100.0}, 1);
        CHECK(t.corners()[0].x == doctest::Approx(100.6).epsilon(1e-12));
        CHECK(t.corners()[0].y == doctest::Approx(100.0).epsilon(1e-12));
    }

    SUBCASE("textbook coefficients: (100,100) pulled to (101,100) by (110,100)") {
        // The 8 px association gate would drop a 10 px event, so widen it to
        // check the update arithmetic itself.
        TrackerConfig cfg;
        cfg.gate_px = 20.0;
        TrackedFeatureSet t{cfg};
        REQUIRE(t.seed_from_peaks(square_peaks(), 0));
        t.assimilate({110.0, 100.0}, 1);
        CHECK(t.corners()[0].x == doctest::Approx(101.0).epsilon(1e-12));
        CHECK(t.corners()[0].y == doctest::Approx(100.0).epsilon(1e-12));
    }

    SUBCASE("k identical events contract by exactly 0.9^k (geometric series)") {
        auto t = tracking_square();
        const double target = 106.0;  // inside the 8 px gate throughout
        for (int k = 1; k <= 40; ++k) {
            t.assimilate({target, 100.0}, k);
            const double expect = target - (target - 100.0) * std::pow(0.9, k);
            CHECK(t.corners()[0].x == doctest::Approx(expect).epsilon(1e-9));
        }
    }

    SUBCASE("events outside the gate are discarded as clutter") {
        auto t = tracking_square();
        t.assimilate({120.0, 120.0}, 1);  // 28 px from every corner
        CHECK(t.corners()[0].x == 100.0);
        CHECK(t.corners()[1].x == 140.0);
        CHECK(t.centroid().x == doctest::Approx(120.0));
    }

    SUBCASE("centroid equals the mean of corners after any sequence") {
        auto t = tracking_square();
        Rng rng(11);
        for (int i = 0; i < 500; ++i) {
            const double x = rng.uniform(95.0, 145.0);
            const double y = rng.uniform(95.0, 145.0);
            t.assimilate({x, y}, i);
            Vec2 mean{};
            for (const auto& c : t.corners()) mean += c;
            mean = mean * 0.25;
            CHECK(t.centroid().x == doctest::Approx(mean.x).epsilon(1e-12));
            CHECK(t.centroid().y == doctest::Approx(mean.y).epsilon(1e-12));
        }
    }
}

TEST_CASE("validation against detection") {
    SUBCASE("peaks equal to corners: no strike") {
        auto t = tracking_square();
        CHECK_FALSE(t.validate(square_peaks(), 300000));
        CHECK(t.strikes() == 0);
        CHECK(t.mode() == TrackMode::Tracking);
    }

    SUBCASE("a drifted corner strikes three times and reverts to detection") {
        auto t = tracking_square();
        auto peaks = square_peaks();
        peaks.peaks[0].x += 20;  // corner drifted 20 px
        CHECK_FALSE(t.validate(peaks, 300000));
        CHECK(t.strikes() == 1);
        CHECK_FALSE(t.validate(peaks, 600000));
        CHECK(t.strikes() == 2);
        CHECK(t.validate(peaks, 900000));
        CHECK(t.mode() == TrackMode::Detecting);
        CHECK(t.strikes() == 0);
    }

    SUBCASE("a clean validation resets the strike count") {
        auto t = tracking_square();
        PeakSet empty;
        CHECK_FALSE(t.validate(empty, 300000));
        CHECK_FALSE(t.validate(empty, 600000));
        CHECK(t.strikes() == 2);
        CHECK_FALSE(t.validate(square_peaks(), 900000));
        CHECK(t.strikes() == 0);
        CHECK(t.mode() == TrackMode::Tracking);
    }

    SUBCASE("cardinality changes count as discrepancies") {
        auto t = tracking_square();
        auto peaks = square_peaks();
        peaks.peaks.push_back({200, 50, 1.0});
        CHECK_FALSE(t.validate(peaks, 1));
        CHECK(t.strikes() == 1);
    }

    SUBCASE("empty peaks count as a strike") {
        auto t = tracking_square();
        CHECK_FALSE(t.validate(PeakSet{}, 1));
        CHECK(t.strikes() == 1);
    }
}

TEST_CASE("assimilation is much faster than heat-map detection") {
    // The whole point of the moving-average path: per-event cost O(|S|).
    auto t = tracking_square();
    constexpr int kOps = 20000;

    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < kOps; ++i) {
        t.assimilate({100.0 + (i % 5) * 0.1, 100.0}, i);
    }
    const auto t1 = std::chrono::steady_clock::now();

    CornerHeatMap map(240, 180, HeatMapConfig{});
    double sink = 0.0;
    const auto t2 = std::chrono::steady_clock::now();
    for (int i = 0; i < 200; ++i) {
        map.deposit(100 + (i % 5), 100, i);
        sink += static_cast<double>(map.extract_peaks().size());
    }
    const auto t3 = std::chrono::steady_clock::now();
    (void)sink;

    const double per_track = std::chrono::duration<double>(t1 - t0).count() / kOps;
    const double per_detect = std::chrono::duration<double>(t3 - t2).count() / 200;
    CHECK(per_detect > 10.0 * per_track);
}
