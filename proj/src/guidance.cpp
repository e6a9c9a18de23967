#include "bhsim/guidance.hpp"

#include "bhsim/vehicle.hpp"

#include <algorithm>

namespace bhsim {

Vec3 los_unit_vector(const PixelTarget& t) {
    if (!(t.f > 0.0)) throw PreconditionError("focal length must be > 0");
    const Vec3 ray{t.p_x, t.p_y, t.f};
    return ray / ray.norm();
}

Vec3 velocity_command_camera(const PixelTarget& t, double V) {
    if (!(V > 0.0)) throw PreconditionError("commanded speed must be > 0");
    return V * los_unit_vector(t);
}

std::optional<YawTarget> desired_yaw(const PixelTarget& t, YawMode mode) {
    switch (mode) {
        case YawMode::PixelBearing:
            if (t.p_x == 0.0 && t.p_y == 0.0) return std::nullopt;
            return YawTarget{std::atan2(t.p_y, t.p_x), false};
        case YawMode::HorizontalOffset:
            if (t.p_x == 0.0) return std::nullopt;
            return YawTarget{std::atan(t.p_x / t.f), true};
    }
    return std::nullopt;
}

Vec3 to_vehicle_frame(const Vec3& v_camera, const Mat3& camera_to_body, const Mat3& body_to_vehicle) {
    return body_to_vehicle * (camera_to_body * v_camera);
}

double yaw_rate_command(double psi_des, double psi, double gain, double limit) {
    if (!(gain > 0.0)) throw PreconditionError("yaw gain must be > 0");
    return std::clamp(gain * wrap_angle(psi_des - psi), -limit, limit);
}

GuidanceCommand compute_guidance(const PixelTarget& t, double V, double yaw, const Mat3& camera_to_body,
                                 YawMode mode, double yaw_gain, double yaw_rate_limit) {
    GuidanceCommand cmd;
    cmd.V = V;
    cmd.v_camera = velocity_command_camera(t, V);
    cmd.v_vehicle = to_vehicle_frame(cmd.v_camera, camera_to_body, rotation_body_to_vehicle(yaw));
    cmd.psi_des = desired_yaw(t, mode);
    if (cmd.psi_des) {
        const double target = cmd.psi_des->relative ? yaw + cmd.psi_des->value : cmd.psi_des->value;
        cmd.yaw_rate_cmd = yaw_rate_command(target, yaw, yaw_gain, yaw_rate_limit);
    }
    return cmd;
}

}  // namespace bhsim
