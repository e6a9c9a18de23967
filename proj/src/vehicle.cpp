#include "bhsim/vehicle.hpp"

#include <algorithm>
#include <string>

namespace bhsim {

bool Geofence::contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

Geofence Geofence::shrunk(double margin) const {
    return {min + Vec3::Constant(margin), max - Vec3::Constant(margin)};
}

Geofence geofence_for(const Arena& arena) {
    const double m = arena.geofence_margin;
    Geofence g{arena.effective_min() - Vec3{m, m, 0.0}, arena.effective_max() + Vec3{m, m, m}};
    return g;
}

UavState step_uav(const UavState& state, const Vec3& cmd_velocity, double cmd_yaw_rate, double dt,
                  const VehicleParams& params) {
    if (!(dt > 0.0)) throw PreconditionError("dt must be > 0");
    if (!cmd_velocity.allFinite() || !std::isfinite(cmd_yaw_rate))
        throw PreconditionError("non-finite command");

    Vec3 cmd = cmd_velocity;
    const double speed = cmd.norm();
    if (speed > params.v_max) cmd *= params.v_max / speed;

    UavState next = state;
    const double decay = std::exp(-dt / params.tau);
    const Vec3 transient = state.velocity - cmd;
    next.velocity = cmd + transient * decay;
    next.position = state.position + cmd * dt + transient * params.tau * (1.0 - decay);

    next.yaw_rate = std::clamp(cmd_yaw_rate, -params.yaw_rate_max, params.yaw_rate_max);
    next.yaw = wrap_angle(state.yaw + next.yaw_rate * dt);
    return next;
}

CameraMount parse_mount(std::string_view name) {
    if (name == "forward") return CameraMount::Forward;
    if (name == "down") return CameraMount::Down;
    throw UnknownMount("unsupported camera mount '" + std::string(name) + "'");
}

Mat3 rotation_camera_to_body(CameraMount mount) {
    Mat3 r;
    switch (mount) {
        case CameraMount::Forward:
            // columns: images of camera x, y, z in the body frame
            r << 0, 0, 1,
                 1, 0, 0,
                 0, 1, 0;
            break;
        case CameraMount::Down:
            r << 0, -1, 0,
                 1,  0, 0,
                 0,  0, 1;
            break;
    }
    return r;
}

Mat3 rotation_camera_to_body(std::string_view mount) {
    return rotation_camera_to_body(parse_mount(mount));
}

Mat3 rotation_body_to_vehicle(double yaw) {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    Mat3 r;
    r << c, -s, 0,
         s,  c, 0,
         0,  0, 1;
    return r;
}

Vec3 clamp_to_geofence(const Vec3& position, const Vec3& velocity_cmd, const Geofence& fence,
                       double margin, double v_max) {
    if (margin < 0.0) throw PreconditionError("margin must be >= 0");
    if (!fence.contains(position)) {
        Vec3 to_center = fence.center() - position;
        const double n = to_center.norm();
        return n > 0.0 ? Vec3(to_center * (v_max / n)) : Vec3::Zero();
    }
    Vec3 out = velocity_cmd;
    for (int i = 0; i < 3; ++i) {
        if (position[i] >= fence.max[i] - margin && out[i] > 0.0) out[i] = 0.0;
        if (position[i] <= fence.min[i] + margin && out[i] < 0.0) out[i] = 0.0;
    }
    return out;
}

}  // namespace bhsim
