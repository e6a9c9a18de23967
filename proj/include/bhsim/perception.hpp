#pragma once

#include "bhsim/core.hpp"
#include "bhsim/rng.hpp"
#include "bhsim/vehicle.hpp"
#include "bhsim/world.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace bhsim {

// Pixel coordinates throughout are offsets from the principal point.
struct CameraIntrinsics {
    double focal_px = 600.0;
    int image_width = 1280;
    int image_height = 720;
    Vec2 principal_point{640.0, 360.0};  // from the top-left image corner

    void validate() const;
    bool in_image(const Vec2& p) const;
};

struct CameraPose {
    Vec3 position = Vec3::Zero();  // world frame
    double yaw = 0.0;
    Mat3 camera_to_body = rotation_camera_to_body(CameraMount::Forward);

    static CameraPose of(const UavState& uav, const Mat3& mount);

    Vec3 world_to_camera(const Vec3& point_world) const;
    Vec3 camera_to_world(const Vec3& point_camera) const;
};

// What the tracker sees. Carries no ground truth.
struct BoxMeasurement {
    Vec2 center = Vec2::Zero();
    double w = 1.0;
    double h = 1.0;
    double confidence = 1.0;
    std::int64_t frame_index = 0;
};

struct Detection {
    BoxMeasurement box;
    std::optional<int> truth_id;  // scoring only
};

struct NoiseModel {
    double center_sigma = 2.0;
    double size_sigma_frac = 0.05;
    double p_miss_base = 0.05;
    double p_miss_range_scale = 0.002;
    double false_alarm_rate = 0.1;
    double confidence_floor = 0.1;

    static NoiseModel zero();
    void validate() const;
};

struct FittedCircle {
    Vec2 center = Vec2::Zero();
    double radius = 1.0;
};

struct Projection {
    Vec2 pixel;
    double depth;
};

/// Pinhole projection. Empty when the point is at or behind the image plane
/// or lands outside the image.
std::optional<Projection> project_point(const CameraIntrinsics& camera, const CameraPose& pose,
                                        const Vec3& point_world);

/// Projected diameter of a sphere under the small-angle model, f D / Z.
inline double projected_size(const CameraIntrinsics& camera, double diameter, double depth) {
    return camera.focal_px * diameter / depth;
}

/// Synthetic balloon detector: one noisy, possibly missed box per visible
/// alive balloon (in balloon id order) followed by Poisson false alarms.
std::vector<Detection> generate_detections(const CameraIntrinsics& camera, const CameraPose& pose,
                                           const WorldState& world, const NoiseModel& noise,
                                           Rng& rng, std::int64_t frame_index = 0);

FittedCircle fit_circle(const BoxMeasurement& box);
inline FittedCircle fit_circle(const Detection& d) { return fit_circle(d.box); }

/// Depth of a sphere of known diameter from its fitted image circle.
/// Throws DegenerateCircle below half a pixel of radius.
double estimate_range(const FittedCircle& circle, const CameraIntrinsics& camera, double diameter);

/// Track ids sorted by ascending range, ties to the lower id.
std::vector<int> order_by_depth(std::vector<std::pair<int, double>> ranges);

/// Back-projects a pixel at known depth into the world frame.
Vec3 pixel_to_world(const CameraIntrinsics& camera, const CameraPose& pose, const Vec2& pixel,
                    double depth);

}  // namespace bhsim
