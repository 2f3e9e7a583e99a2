#include <doctest.h>

#include <cmath>
#include <vector>

#include "ebvs/rng.hpp"
#include "ebvs/servo.hpp"

using namespace ebvs;

namespace {

constexpr double kPi = 3.14159265358979323846;

// General pseudo-inverse oracle for the 2x2 case via normal equations,
// independent of the library's inversion path.
Vec2 pinv_law_oracle(double f, double z, double lambda, Vec2 e) {
    const double g = -f / z;
    // L = diag(g, g); pinv(L) = (L^T L)^-1 L^T = diag(1/g, 1/g)
    const double lt_l = g * g;
    const double inv = g / lt_l;
    return {-lambda * inv * e.x, -lambda * inv * e.y};
}

}  // namespace

TEST_CASE("control law") {
    InteractionModel model;
    model.focal_px = 120.0;
    model.depth_m = 0.6;  // f/Z = 200 px/m
    ServoLimits limits;

    SUBCASE("zero error commands zero velocity") {
        model.lambda = 1.0;
        ServoTarget t{{120.0, 90.0}, {120.0, 90.0}};
        const auto v = compute_velocity(model, t, limits);
        CHECK(v.v.x == 0.0);
        CHECK(v.v.y == 0.0);
        CHECK(v.w.z == 0.0);
    }

    SUBCASE("hand-solved 2x2 case: lambda=1, f/Z=200, e=(20,0) gives +0.1 m/s") {
        model.lambda = 1.0;
        ServoTarget t{{100.0, 90.0}, {120.0, 90.0}};  // e = (20, 0)
        const auto v = compute_velocity(model, t, limits);
        CHECK(v.v.x == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(v.v.y == doctest::Approx(0.0));
    }

    SUBCASE("matches the general pseudo-inverse oracle") {
        Rng rng(4);
        for (int i = 0; i < 50; ++i) {
            model.lambda = rng.uniform(0.2, 3.0);
            const Vec2 e{rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)};
            ServoTarget t{{0.0, 0.0}, e};
            const auto v = compute_velocity_unclamped(model, t);
            const Vec2 o = pinv_law_oracle(model.focal_px, model.depth_m, model.lambda, e);
            CHECK(v.v.x == doctest::Approx(o.x).epsilon(1e-12));
            CHECK(v.v.y == doctest::Approx(o.y).epsilon(1e-12));
        }
    }

    SUBCASE("doubling lambda doubles the command exactly") {
        ServoTarget t{{100.0, 80.0}, {110.0, 95.0}};
        model.lambda = 0.7;
        const auto v1 = compute_velocity_unclamped(model, t);
        model.lambda = 1.4;
        const auto v2 = compute_velocity_unclamped(model, t);
        CHECK(v2.v.x == doctest::Approx(2.0 * v1.v.x).epsilon(1e-12));
        CHECK(v2.v.y == doctest::Approx(2.0 * v1.v.y).epsilon(1e-12));
    }

    SUBCASE("linearity in the error below the clamp") {
        model.lambda = 1.2;
        const Vec2 e1{5.0, -3.0}, e2{-2.0, 7.0};
        const auto va = compute_velocity_unclamped(model, {{0, 0}, e1});
        const auto vb = compute_velocity_unclamped(model, {{0, 0}, e2});
        const auto vc = compute_velocity_unclamped(model, {{0, 0}, e1 + e2});
        CHECK(vc.v.x == doctest::Approx(va.v.x + vb.v.x).epsilon(1e-12));
        CHECK(vc.v.y == doctest::Approx(va.v.y + vb.v.y).epsilon(1e-12));
    }

    SUBCASE("clamping scales magnitude but keeps direction") {
        model.lambda = 10.0;
        ServoTarget t{{0.0, 0.0}, {30.0, 40.0}};
        const auto raw = compute_velocity_unclamped(model, t);
        const auto v = compute_velocity(model, t, limits);
        CHECK(v.v.norm() == doctest::Approx(limits.v_max));
        CHECK(v.v.x * raw.v.y == doctest::Approx(v.v.y * raw.v.x).epsilon(1e-9));
    }

    SUBCASE("non-positive depth is a configuration error") {
        model.depth_m = 0.0;
        CHECK_THROWS(compute_velocity(model, {{0, 0}, {1, 1}}, limits));
    }
}

TEST_CASE("alignment angle") {
    SUBCASE("farthest corner on the +x axis gives 0") {
        const std::vector<Vec2> corners = {{30.0, 20.0}, {25.0, 20.0}};
        CHECK(alignment_angle({20.0, 20.0}, corners) == doctest::Approx(0.0));
    }

    SUBCASE("farthest corner straight down the +y axis gives pi/2") {
        const std::vector<Vec2> corners = {{20.0, 30.0}, {22.0, 20.0}};
        CHECK(alignment_angle({20.0, 20.0}, corners) == doctest::Approx(kPi / 2));
    }

    SUBCASE("matches a brute-force scan oracle on a seeded pentagon") {
        Rng rng(21);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec2 centroid{rng.uniform(50.0, 150.0), rng.uniform(50.0, 150.0)};
            std::vector<Vec2> corners;
            for (int i = 0; i < 5; ++i) {
                corners.push_back({centroid.x + rng.uniform(-40.0, 40.0),
                                   centroid.y + rng.uniform(-40.0, 40.0)});
            }
            // oracle: full scan with atan2
            double best_d = -1.0;
            double want = 0.0;
            for (const auto& c : corners) {
                const double d =
                    std::hypot(c.x - centroid.x, c.y - centroid.y);
                if (d > best_d) {
                    best_d = d;
                    want = std::atan2(c.y - centroid.y, c.x - centroid.x);
                }
            }
            CHECK(alignment_angle(centroid, corners) == doctest::Approx(want).epsilon(1e-9));
        }
    }

    SUBCASE("invariant under uniform translation") {
        Rng rng(22);
        std::vector<Vec2> corners = {{10, 0}, {0, 12}, {-8, -3}};
        const Vec2 centroid{1.0, 2.0};
        const double base = alignment_angle(centroid, corners);
        for (int i = 0; i < 10; ++i) {
            const Vec2 shift{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
            std::vector<Vec2> moved;
            for (const auto& c : corners) moved.push_back(c + shift);
            CHECK(alignment_angle(centroid + shift, moved) ==
                  doctest::Approx(base).epsilon(1e-12));
        }
    }

    SUBCASE("equivariant under rotation about the centroid") {
        std::vector<Vec2> corners = {{10, 0}, {0, 12}, {-8, -3}};
        const Vec2 centroid{0.0, 0.0};
        const double base = alignment_angle(centroid, corners);
        for (double phi : {0.3, 1.2, -2.0}) {
            std::vector<Vec2> rotated;
            for (const auto& c : corners) {
                rotated.push_back({c.x * std::cos(phi) - c.y * std::sin(phi),
                                   c.x * std::sin(phi) + c.y * std::cos(phi)});
            }
            const double got = alignment_angle(centroid, rotated);
            CHECK(wrap_angle(got - base - phi) == doctest::Approx(0.0).epsilon(1e-9));
        }
    }

    SUBCASE("empty corner set is an error") {
        CHECK_THROWS(alignment_angle({0, 0}, std::vector<Vec2>{}));
    }
}

TEST_CASE("alignment step") {
    const double tol = deg_to_rad(2.0);

    SUBCASE("already aligned: done with zero command") {
        const auto s = alignment_step(1.0, 1.0, 0.5, 0.1, tol);
        CHECK(s.done);
        CHECK(s.rate == 0.0);
        CHECK(s.yaw_next == 1.0);
    }

    SUBCASE("plain Euler step toward the target") {
        const auto s = alignment_step(0.0, kPi / 2, 0.5, 0.1, tol);
        CHECK_FALSE(s.done);
        CHECK(s.yaw_next == doctest::Approx(0.05));
        CHECK(s.rate == doctest::Approx(0.5));
    }

    SUBCASE("takes the shorter arc across the pi wrap") {
        // From 0.1 to -3.1: the short way is up through +pi.
        const auto s = alignment_step(0.1, -3.1, 0.5, 0.1, tol);
        // oracle: independent wrap of the difference
        double diff = -3.1 - 0.1;
        while (diff <= -kPi) diff += 2.0 * kPi;
        while (diff > kPi) diff -= 2.0 * kPi;
        CHECK(diff > 0.0);
        CHECK(s.rate == doctest::Approx(0.5));
        CHECK(s.yaw_next == doctest::Approx(0.1 + 0.05));
    }

    SUBCASE("never overshoots the target") {
        const auto s = alignment_step(0.0, 0.06, 0.5, 1.0, tol);  // full step would be 0.5
        CHECK(s.yaw_next == doctest::Approx(0.06));
    }

    SUBCASE("omega must be positive") {
        CHECK_THROWS(alignment_step(0.0, 1.0, 0.0, 0.1, tol));
    }
}
