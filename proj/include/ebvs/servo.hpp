#pragma once

#include <span>

#include "ebvs/camera.hpp"
#include "ebvs/math.hpp"

namespace ebvs {

/// Desired and measured feature positions on the sensor plane.
struct ServoTarget {
    Vec2 desired{};  // f_d*, typically the sensor center
    Vec2 current{};  // f, the tracked high-level feature
    Vec2 error() const { return current - desired; }
};

/// Point-feature interaction model for planar translation at constant depth:
/// a camera-frame translation (vx, vy) moves the feature pixel at
/// (-f/Z * vx, -f/Z * vy), so L = diag(-f/Z, -f/Z). With the projection
/// convention in camera.hpp, the resulting command moves the camera so the
/// feature drifts toward the desired pixel.
struct InteractionModel {
    double focal_px = 120.0;
    double depth_m = 0.6;   // constant camera height over the workspace
    double lambda = 1.2;    // control gain, 1/s
};

struct ServoLimits {
    double v_max = 0.25;  // m/s
    double w_max = 1.0;   // rad/s
};

/// Control law V_c = -lambda * pinv(L) * e embedded in the planar twist.
/// Throws on non-positive depth; a degenerate L falls back to a regularized
/// least-squares inverse.
CameraVelocity compute_velocity(const InteractionModel& model, const ServoTarget& target,
                                const ServoLimits& limits);

/// Unclamped form, used by tests to probe linearity.
CameraVelocity compute_velocity_unclamped(const InteractionModel& model,
                                          const ServoTarget& target);

/// Grasp-line orientation: angle from the centroid to the corner farthest
/// from it (ties resolved to the earliest corner in the list). Returns
/// atan2(yc - yv, xc - xv) in (-pi, pi]. Throws on an empty corner set.
double alignment_angle(const Vec2& centroid, std::span<const Vec2> corners);

struct AlignmentStep {
    double yaw_next = 0.0;  // commanded orientation after this step
    double rate = 0.0;      // signed angular rate for the step
    bool done = false;
};

/// Rotates theta_now toward theta_target along the shorter arc at omega_align,
/// never overshooting; done when the wrapped difference is inside the
/// admissible range.
AlignmentStep alignment_step(double theta_now, double theta_target, double omega_align,
                             double dt, double tolerance_rad);

}  // namespace ebvs
