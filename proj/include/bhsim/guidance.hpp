#pragma once

#include "bhsim/core.hpp"

#include <optional>

namespace bhsim {

struct PixelTarget {
    double p_x = 0.0;  // px from the principal point
    double p_y = 0.0;
    double f = 600.0;  // focal length, px
};

enum class YawMode { PixelBearing, HorizontalOffset };

// What desired_yaw returns: an absolute in-image bearing (PixelBearing), an offset
// relative to the current yaw (HorizontalOffset), or nothing (hold).
struct YawTarget {
    double value = 0.0;
    bool relative = false;
};

struct GuidanceCommand {
    double V = 0.0;
    Vec3 v_camera = Vec3::Zero();
    std::optional<YawTarget> psi_des;
    Vec3 v_vehicle = Vec3::Zero();  // NED
    double yaw_rate_cmd = 0.0;
};

/// Line-of-sight unit vector (p_x, p_y, f) / |(p_x, p_y, f)| in the camera frame.
Vec3 los_unit_vector(const PixelTarget& t);

/// Camera-frame velocity of magnitude V along the line of sight. The third
/// component uses f as its numerator, so the command lies on the LOS.
Vec3 velocity_command_camera(const PixelTarget& t, double V);

/// PixelBearing: atan2(p_y, p_x), empty at the principal point. HorizontalOffset:
/// atan(p_x / f) relative to the current yaw, empty when p_x = 0.
std::optional<YawTarget> desired_yaw(const PixelTarget& t, YawMode mode = YawMode::HorizontalOffset);

/// V_f = R2 R1 V_c: camera to body, then body to vehicle.
Vec3 to_vehicle_frame(const Vec3& v_camera, const Mat3& camera_to_body, const Mat3& body_to_vehicle);

/// clamp(gain * wrap(psi_des - psi), +-limit).
double yaw_rate_command(double psi_des, double psi, double gain, double limit);

/// Full pipeline for one target pixel at the current vehicle yaw.
GuidanceCommand compute_guidance(const PixelTarget& t, double V, double yaw, const Mat3& camera_to_body,
                                 YawMode mode, double yaw_gain, double yaw_rate_limit);

}  // namespace bhsim
