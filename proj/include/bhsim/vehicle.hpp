#pragma once

#include "bhsim/core.hpp"
#include "bhsim/world.hpp"

#include <string_view>

namespace bhsim {

// Kinematic state. Position and velocity are in the world frame
// (north, east, up); yaw is measured from north towards east.
struct UavState {
    int id = 0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    double yaw = 0.0;
    double yaw_rate = 0.0;
    bool alive = true;
};

struct VehicleParams {
    double tau = 0.3;            // velocity lag time constant, s
    double v_max = 2.0;          // m/s
    double yaw_rate_max = 1.0;   // rad/s
};

struct Geofence {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const;
    Vec3 center() const { return 0.5 * (min + max); }
    Geofence shrunk(double margin) const;
};

// Effective volume inflated horizontally and upwards by the arena's
// geofence margin. The floor stays at ground level.
Geofence geofence_for(const Arena& arena);

/// Advances one tick. The commanded velocity (world frame) is clamped to
/// v_max and the velocity follows a first-order lag, integrated with the
/// exact discretization over `dt`; position integrates the same closed-form
/// response. Yaw integrates the clamped yaw-rate command.
UavState step_uav(const UavState& state, const Vec3& cmd_velocity, double cmd_yaw_rate, double dt,
                  const VehicleParams& params = {});

// The vehicle frame is local NED; the world frame shares north/east and
// flips the vertical axis.
inline Vec3 ned_to_world(const Vec3& v) { return {v.x(), v.y(), -v.z()}; }
inline Vec3 world_to_ned(const Vec3& v) { return {v.x(), v.y(), -v.z()}; }

enum class CameraMount { Forward, Down };

// Throws UnknownMount for anything other than "forward" or "down".
CameraMount parse_mount(std::string_view name);

/// Camera (x right, y down, z optic axis) to body (front, right, down).
Mat3 rotation_camera_to_body(CameraMount mount = CameraMount::Forward);
Mat3 rotation_camera_to_body(std::string_view mount);

/// Body to vehicle (NED) for level flight: rotation by yaw about down.
Mat3 rotation_body_to_vehicle(double yaw);

/// Geofence velocity filter.
///
/// Inside the fence shrunk by `margin` the command passes through. In the
/// braking band any command component pointing out of the nearest face is
/// zeroed. Outside the fence the command becomes a `v_max` vector towards
/// the fence center.
Vec3 clamp_to_geofence(const Vec3& position, const Vec3& velocity_cmd, const Geofence& fence,
                       double margin, double v_max);

}  // namespace bhsim
