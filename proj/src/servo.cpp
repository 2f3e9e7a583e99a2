#include "ebvs/servo.hpp"

#include <cmath>
#include <stdexcept>

namespace ebvs {
namespace {

// 2x2 inverse with a Tikhonov fallback for near-singular input.
struct Mat2 {
    double a, b, c, d;  // [a b; c d]
};

Mat2 pinv2x2(const Mat2& m) {
    const double det = m.a * m.d - m.b * m.c;
    const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
    if (std::abs(det) > 1e-12 * scale * scale) {
        return {m.d / det, -m.b / det, -m.c / det, m.a / det};
    }
    // (M^T M + eps I)^-1 M^T
    const double eps = 1e-9 * (scale * scale + 1.0);
    const double ta = m.a * m.a + m.c * m.c + eps;
    const double tb = m.a * m.b + m.c * m.d;
    const double tc = tb;
    const double td = m.b * m.b + m.d * m.d + eps;
    const double tdet = ta * td - tb * tc;
    const double ia = td / tdet, ib = -tb / tdet, ic = -tc / tdet, id = ta / tdet;
    return {ia * m.a + ib * m.b, ia * m.c + ib * m.d,
            ic * m.a + id * m.b, ic * m.c + id * m.d};
}

}  // namespace

CameraVelocity compute_velocity_unclamped(const InteractionModel& model,
                                          const ServoTarget& target) {
    if (model.depth_m <= 0.0) throw std::invalid_argument("interaction depth must be > 0");
    if (model.focal_px <= 0.0) throw std::invalid_argument("focal length must be > 0");
    const double g = -model.focal_px / model.depth_m;
    const Mat2 l_inv = pinv2x2({g, 0.0, 0.0, g});
    const Vec2 e = target.error();
    CameraVelocity vel;
    vel.v.x = -model.lambda * (l_inv.a * e.x + l_inv.b * e.y);
    vel.v.y = -model.lambda * (l_inv.c * e.x + l_inv.d * e.y);
    return vel;
}

CameraVelocity compute_velocity(const InteractionModel& model, const ServoTarget& target,
                                const ServoLimits& limits) {
    return clamp_velocity(compute_velocity_unclamped(model, target), limits.v_max,
                          limits.w_max);
}

double alignment_angle(const Vec2& centroid, std::span<const Vec2> corners) {
    if (corners.empty()) throw std::invalid_argument("alignment needs at least one corner");
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < corners.size(); ++i) {
        const double d = (corners[i] - centroid).norm();
        if (d > best_d) {
            best_d = d;
            best = i;
        }
    }
    const Vec2 d = corners[best] - centroid;
    return wrap_angle(std::atan2(d.y, d.x));  // maps -pi onto +pi
}

AlignmentStep alignment_step(double theta_now, double theta_target, double omega_align,
                             double dt, double tolerance_rad) {
    if (omega_align <= 0.0) throw std::invalid_argument("omega_align must be > 0");
    AlignmentStep out;
    const double diff = wrap_angle(theta_target - theta_now);
    if (std::abs(diff) <= tolerance_rad) {
        out.yaw_next = theta_now;
        out.done = true;
        return out;
    }
    const double step = std::min(omega_align * dt, std::abs(diff));
    const double sign = diff >= 0.0 ? 1.0 : -1.0;
    out.yaw_next = theta_now + sign * step;
    out.rate = sign * omega_align;
    out.done = false;
    return out;
}

}  // namespace ebvs
