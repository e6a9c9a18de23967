#include "bhsim/perception.hpp"

#include <algorithm>

namespace bhsim {

void CameraIntrinsics::validate() const {
    if (!(focal_px > 0.0)) throw PreconditionError("focal length must be > 0");
    if (image_width <= 0 || image_height <= 0) throw PreconditionError("image size must be > 0");
    if (principal_point.x() < 0.0 || principal_point.x() > image_width ||
        principal_point.y() < 0.0 || principal_point.y() > image_height)
        throw PreconditionError("principal point outside the image");
}

bool CameraIntrinsics::in_image(const Vec2& p) const {
    const Vec2 corner = p + principal_point;
    return corner.x() >= 0.0 && corner.x() <= image_width && corner.y() >= 0.0 &&
           corner.y() <= image_height;
}

CameraPose CameraPose::of(const UavState& uav, const Mat3& mount) {
    return CameraPose{uav.position, uav.yaw, mount};
}

Vec3 CameraPose::world_to_camera(const Vec3& point_world) const {
    const Mat3 camera_to_vehicle = rotation_body_to_vehicle(yaw) * camera_to_body;
    return camera_to_vehicle.transpose() * world_to_ned(point_world - position);
}

Vec3 CameraPose::camera_to_world(const Vec3& point_camera) const {
    const Mat3 camera_to_vehicle = rotation_body_to_vehicle(yaw) * camera_to_body;
    return position + ned_to_world(camera_to_vehicle * point_camera);
}

NoiseModel NoiseModel::zero() {
    return NoiseModel{0.0, 0.0, 0.0, 0.0, 0.0, 0.1};
}

void NoiseModel::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (center_sigma < 0.0 || size_sigma_frac < 0.0 || p_miss_range_scale < 0.0 ||
        false_alarm_rate < 0.0)
        throw PreconditionError("noise rates must be >= 0");
    if (!prob(p_miss_base) || !prob(confidence_floor))
        throw PreconditionError("noise probabilities must lie in [0, 1]");
}

std::optional<Projection> project_point(const CameraIntrinsics& camera, const CameraPose& pose,
                                        const Vec3& point_world) {
    const Vec3 pc = pose.world_to_camera(point_world);
    if (!(pc.z() > 0.0)) return std::nullopt;
    Vec2 pixel{camera.focal_px * pc.x() / pc.z(), camera.focal_px * pc.y() / pc.z()};
    if (!camera.in_image(pixel)) return std::nullopt;
    return Projection{pixel, pc.z()};
}

std::vector<Detection> generate_detections(const CameraIntrinsics& camera, const CameraPose& pose,
                                           const WorldState& world, const NoiseModel& noise,
                                           Rng& rng, std::int64_t frame_index) {
    std::vector<Detection> out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto gauss = [&rng](double sigma) {
        return sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(rng) : 0.0;
    };

    for (const auto& b : world.balloons) {
        if (!b.alive) continue;
        auto proj = project_point(camera, pose, b.center);
        if (!proj) continue;
        const double range = (b.center - pose.position).norm();
        const double p_miss = std::min(1.0, noise.p_miss_base + noise.p_miss_range_scale * range);
        if (unit(rng) < p_miss) continue;

        const double size = projected_size(camera, b.diameter, proj->depth);
        Detection d;
        d.box.center = proj->pixel + Vec2{gauss(noise.center_sigma), gauss(noise.center_sigma)};
        d.box.w = std::max(1e-3, size * (1.0 + gauss(noise.size_sigma_frac)));
        d.box.h = std::max(1e-3, size * (1.0 + gauss(noise.size_sigma_frac)));
        d.box.confidence = std::max(noise.confidence_floor, 1.0 - range / 50.0);
        d.box.frame_index = frame_index;
        d.truth_id = b.id;

        // keep the center within the image extended by half the box
        const Vec2 lo = -camera.principal_point - 0.5 * Vec2{d.box.w, d.box.h};
        const Vec2 hi = Vec2{double(camera.image_width), double(camera.image_height)} -
                        camera.principal_point + 0.5 * Vec2{d.box.w, d.box.h};
        d.box.center = d.box.center.cwiseMax(lo).cwiseMin(hi);
        out.push_back(d);
    }

    if (noise.false_alarm_rate > 0.0) {
        const int n = std::poisson_distribution<int>(noise.false_alarm_rate)(rng);
        std::uniform_real_distribution<double> ux(0.0, camera.image_width);
        std::uniform_real_distribution<double> uy(0.0, camera.image_height);
        std::uniform_real_distribution<double> usize(8.0, 60.0);
        std::uniform_real_distribution<double> uaspect(0.8, 1.2);
        std::uniform_real_distribution<double> uconf(noise.confidence_floor,
                                                     std::max(noise.confidence_floor, 0.6));
        for (int i = 0; i < n; ++i) {
            Detection d;
            d.box.center = Vec2{ux(rng), uy(rng)} - camera.principal_point;
            d.box.w = usize(rng);
            d.box.h = d.box.w * uaspect(rng);
            d.box.confidence = uconf(rng);
            d.box.frame_index = frame_index;
            out.push_back(d);
        }
    }
    return out;
}

FittedCircle fit_circle(const BoxMeasurement& box) {
    return FittedCircle{box.center, 0.5 * std::max(box.w, box.h)};
}

double estimate_range(const FittedCircle& circle, const CameraIntrinsics& camera,
                      double diameter) {
    if (!(circle.radius >= 0.5))
        throw DegenerateCircle("fitted radius below 0.5 px");
    return camera.focal_px * diameter / (2.0 * circle.radius);
}

std::vector<int> order_by_depth(std::vector<std::pair<int, double>> ranges) {
    std::sort(ranges.begin(), ranges.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    std::vector<int> ids;
    ids.reserve(ranges.size());
    for (const auto& r : ranges) ids.push_back(r.first);
    return ids;
}

Vec3 pixel_to_world(const CameraIntrinsics& camera, const CameraPose& pose, const Vec2& pixel,
                    double depth) {
    const Vec3 pc{pixel.x() * depth / camera.focal_px, pixel.y() * depth / camera.focal_px, depth};
    return pose.camera_to_world(pc);
}

}  // namespace bhsim
