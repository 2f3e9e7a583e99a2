#pragma once

#include <optional>

#include "ebvs/math.hpp"

namespace ebvs {

/// Pinhole intrinsics. K = [f 0 cx; 0 f cy; 0 0 1].
struct CameraModel {
    double focal_px = 120.0;
    double cx = 120.0;
    double cy = 90.0;
    int width = 240;
    int height = 180;

    bool valid() const {
        return focal_px > 0.0 && cx >= 0.0 && cx < width && cy >= 0.0 && cy < height;
    }
    Vec2 center() const { return {cx, cy}; }
    /// Meters per pixel on a plane at the given depth.
    double metres_per_px(double depth) const { return depth / focal_px; }
};

/// Camera pose over the workspace plane (z = 0 in world coordinates). The
/// optic axis points straight down; yaw rotates about it. Camera axes in
/// world coordinates:
///   x_cam = ( cos yaw, -sin yaw, 0)
///   y_cam = (-sin yaw, -cos yaw, 0)
///   z_cam = (0, 0, -1)
/// so at yaw = 0, image u grows with world +x and image v with world -y.
struct CameraPose {
    Vec3 position{0.0, 0.0, 0.6};
    double yaw = 0.0;

    Vec3 x_axis() const { return {std::cos(yaw), -std::sin(yaw), 0.0}; }
    Vec3 y_axis() const { return {-std::sin(yaw), -std::cos(yaw), 0.0}; }
    Vec3 z_axis() const { return {0.0, 0.0, -1.0}; }

    /// World point into camera coordinates.
    Vec3 to_camera(const Vec3& world) const {
        const Vec3 d = world - position;
        return {d.dot(x_axis()), d.dot(y_axis()), d.dot(z_axis())};
    }
};

/// Commanded camera twist, expressed in the camera frame. Outside the grasp
/// descent the planar constraint keeps v.z = w.x = w.y = 0.
struct CameraVelocity {
    Vec3 v{};  // m/s
    Vec3 w{};  // rad/s; w.z spins about the optic axis
};

/// Scales v and w down to the given norm limits. Direction is never changed.
CameraVelocity clamp_velocity(const CameraVelocity& vel, double v_max, double w_max);

/// Pinhole projection of a world point; empty when the camera-frame depth
/// is <= 0 (point behind the camera).
std::optional<Vec2> project(const CameraModel& camera, const CameraPose& pose,
                            const Vec3& world);

/// Inverse of project() onto the workspace plane z = 0.
Vec3 plane_point_for_pixel(const CameraModel& camera, const CameraPose& pose,
                           const Vec2& pixel);

/// Euler-integrates the camera-frame twist over dt seconds.
CameraPose apply_velocity(const CameraPose& pose, const CameraVelocity& vel, double dt);

}  // namespace ebvs
