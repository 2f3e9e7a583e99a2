#include "ebvs/camera.hpp"

#include <stdexcept>

namespace ebvs {

CameraVelocity clamp_velocity(const CameraVelocity& vel, double v_max, double w_max) {
    CameraVelocity out = vel;
    const double vn = out.v.norm();
    if (vn > v_max && vn > 0.0) out.v = out.v * (v_max / vn);
    const double wn = out.w.norm();
    if (wn > w_max && wn > 0.0) out.w = out.w * (w_max / wn);
    return out;
}

std::optional<Vec2> project(const CameraModel& camera, const CameraPose& pose,
                            const Vec3& world) {
    if (!camera.valid()) throw std::invalid_argument("invalid camera model");
    const Vec3 pc = pose.to_camera(world);
    if (pc.z <= 0.0) return std::nullopt;
    return Vec2{camera.cx + camera.focal_px * pc.x / pc.z,
                camera.cy + camera.focal_px * pc.y / pc.z};
}

Vec3 plane_point_for_pixel(const CameraModel& camera, const CameraPose& pose,
                           const Vec2& pixel) {
    const double depth = pose.position.z;  // plane at z = 0, optic axis straight down
    const double xc = (pixel.x - camera.cx) * depth / camera.focal_px;
    const double yc = (pixel.y - camera.cy) * depth / camera.focal_px;
    return pose.position + pose.x_axis() * xc + pose.y_axis() * yc + pose.z_axis() * depth;
}

CameraPose apply_velocity(const CameraPose& pose, const CameraVelocity& vel, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    CameraPose out = pose;
    out.position += pose.x_axis() * (vel.v.x * dt);
    out.position += pose.y_axis() * (vel.v.y * dt);
    out.position += pose.z_axis() * (vel.v.z * dt);
    // yaw is measured about the camera z axis itself, so w.z integrates directly
    out.yaw = pose.yaw + vel.w.z * dt;
    return out;
}

}  // namespace ebvs
