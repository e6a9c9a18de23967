#pragma once

#include "bhsim/assignment.hpp"
#include "bhsim/perception.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace bhsim {

using TrackVector = Eigen::Matrix<double, 6, 1>;  // [cx, cy, w, h, vx, vy]
using TrackCovariance = Eigen::Matrix<double, 6, 6>;

enum class TrackStatus { Tentative, Confirmed, Dead };

std::string_view to_string(TrackStatus s);

struct TrackParams {
    TrackVector q_diag = (TrackVector() << 1, 1, 1, 1, 0.5, 0.5).finished();
    Eigen::Vector4d r_diag{4, 4, 8, 8};
    TrackVector p0_diag = (TrackVector() << 10, 10, 10, 10, 100, 100).finished();
    double gate_px = 80.0;
    int m_confirm = 3;
    int k_delete = 5;
};

struct Track {
    int id = 0;
    TrackVector x = TrackVector::Zero();
    TrackCovariance P = TrackCovariance::Identity();
    int age = 0;     // frames since birth
    int hits = 0;    // consecutive associated frames
    int misses = 0;  // consecutive unassociated frames
    TrackStatus status = TrackStatus::Tentative;
    std::optional<double> last_range;

    Vec2 center() const { return x.head<2>(); }
    BoxMeasurement box() const;
};

/// Constant-velocity prediction over `dt_frames`; w and h random-walk.
Track kf_predict(const Track& t, double dt_frames, const TrackParams& params = {});

/// Linear Kalman correction with a [cx, cy, w, h] measurement (Joseph form).
/// Resets misses and counts a hit. Throws NumericalFailure when the
/// innovation covariance cannot be inverted.
Track kf_update(const Track& t, const BoxMeasurement& z, const TrackParams& params = {});

/// cost(i, j) = Euclidean distance between track i's center and box j's.
Eigen::MatrixXd assignment_cost(const std::vector<Track>& tracks,
                                const std::vector<BoxMeasurement>& boxes);

enum class TrackEventKind { Birth, Confirm, Coast, Death };

std::string_view to_string(TrackEventKind k);

struct TrackEvent {
    TrackEventKind kind;
    int track_id;
};

struct TrackerStep {
    std::vector<TrackEvent> events;
    std::vector<std::pair<int, int>> associations;  // (track id, box index)
};

/// Image-plane multi-balloon tracker. A value type: copying it copies every
/// filter, and nothing is shared between instances.
class Tracker {
public:
    explicit Tracker(TrackParams params = {}) : params_(std::move(params)) {}

    /// One frame: predict, associate, correct, coast, spawn, promote, delete.
    TrackerStep step(const std::vector<BoxMeasurement>& boxes);

    const std::vector<Track>& tracks() const { return tracks_; }
    const Track* find(int id) const;
    const TrackParams& params() const { return params_; }
    void set_last_range(int id, double range);

private:
    TrackParams params_;
    std::vector<Track> tracks_;
    int next_id_ = 0;
};

}  // namespace bhsim
