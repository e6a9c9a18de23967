#include "bhsim/tracking.hpp"

#include <algorithm>

namespace bhsim {

namespace {

using Meas = Eigen::Vector4d;
using MeasMatrix = Eigen::Matrix<double, 4, 6>;

MeasMatrix observation() {
    MeasMatrix h = MeasMatrix::Zero();
    h.leftCols<4>().setIdentity();
    return h;
}

}  // namespace

std::string_view to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tentative: return "tentative";
        case TrackStatus::Confirmed: return "confirmed";
        case TrackStatus::Dead: return "dead";
    }
    return "?";
}

std::string_view to_string(TrackEventKind k) {
    switch (k) {
        case TrackEventKind::Birth: return "birth";
        case TrackEventKind::Confirm: return "confirm";
        case TrackEventKind::Coast: return "coast";
        case TrackEventKind::Death: return "death";
    }
    return "?";
}

BoxMeasurement Track::box() const {
    BoxMeasurement b;
    b.center = center();
    b.w = x[2];
    b.h = x[3];
    return b;
}

Track kf_predict(const Track& t, double dt_frames, const TrackParams& params) {
    TrackCovariance f = TrackCovariance::Identity();
    f(0, 4) = dt_frames;
    f(1, 5) = dt_frames;
    Track out = t;
    out.x = f * t.x;
    out.P = f * t.P * f.transpose();
    out.P.diagonal() += params.q_diag * dt_frames;
    return out;
}

Track kf_update(const Track& t, const BoxMeasurement& z, const TrackParams& params) {
    const MeasMatrix h = observation();
    const Eigen::Matrix4d r = params.r_diag.asDiagonal();
    const Meas meas{z.center.x(), z.center.y(), z.w, z.h};

    const Meas innovation = meas - h * t.x;
    const Eigen::Matrix4d s = h * t.P * h.transpose() + r;
    Eigen::LDLT<Eigen::Matrix4d> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * std::max(1.0, s.diagonal().maxCoeff()))
        throw NumericalFailure("innovation covariance is not invertible");

    const Eigen::Matrix<double, 6, 4> gain = ldlt.solve(h * t.P).transpose();
    const TrackCovariance i_kh = TrackCovariance::Identity() - gain * h;

    Track out = t;
    out.x = t.x + gain * innovation;
    out.P = i_kh * t.P * i_kh.transpose() + gain * r * gain.transpose();
    out.P = 0.5 * (out.P + out.P.transpose());
    out.x[2] = std::max(out.x[2], 1e-3);
    out.x[3] = std::max(out.x[3], 1e-3);
    out.hits = t.hits + 1;
    out.misses = 0;
    return out;
}

Eigen::MatrixXd assignment_cost(const std::vector<Track>& tracks,
                                const std::vector<BoxMeasurement>& boxes) {
    Eigen::MatrixXd cost(tracks.size(), boxes.size());
    for (std::size_t i = 0; i < tracks.size(); ++i)
        for (std::size_t j = 0; j < boxes.size(); ++j)
            cost(i, j) = (tracks[i].center() - boxes[j].center).norm();
    return cost;
}

const Track* Tracker::find(int id) const {
    auto it = std::find_if(tracks_.begin(), tracks_.end(),
                           [id](const Track& t) { return t.id == id; });
    return it == tracks_.end() ? nullptr : &*it;
}

void Tracker::set_last_range(int id, double range) {
    for (auto& t : tracks_)
        if (t.id == id) t.last_range = range;
}

TrackerStep Tracker::step(const std::vector<BoxMeasurement>& boxes) {
    TrackerStep out;

    for (auto& t : tracks_) {
        t = kf_predict(t, 1.0, params_);
        ++t.age;
    }

    // Out-of-gate pairs all cost the same, so the solver never trades an
    // in-gate match for two pairs the gate would reject anyway.
    const Eigen::MatrixXd cost = assignment_cost(tracks_, boxes).cwiseMin(2.0 * params_.gate_px);
    const Assignment a = solve_assignment(cost, params_.gate_px);

    for (const auto& [ti, bi] : a.matches) {
        tracks_[ti] = kf_update(tracks_[ti], boxes[bi], params_);
        out.associations.emplace_back(tracks_[ti].id, bi);
    }
    for (int ti : a.unmatched_rows) {
        Track& t = tracks_[ti];
        t.hits = 0;
        if (++t.misses == 1) out.events.push_back({TrackEventKind::Coast, t.id});
    }

    for (int bi : a.unmatched_cols) {
        const BoxMeasurement& b = boxes[bi];
        Track t;
        t.id = next_id_++;
        t.x << b.center.x(), b.center.y(), b.w, b.h, 0.0, 0.0;
        t.P = params_.p0_diag.asDiagonal();
        t.hits = 1;
        tracks_.push_back(t);
        out.events.push_back({TrackEventKind::Birth, t.id});
        out.associations.emplace_back(t.id, bi);
    }

    for (auto& t : tracks_) {
        if (t.status == TrackStatus::Tentative && t.hits >= params_.m_confirm) {
            t.status = TrackStatus::Confirmed;
            out.events.push_back({TrackEventKind::Confirm, t.id});
        }
        if (t.misses >= params_.k_delete) {
            t.status = TrackStatus::Dead;
            out.events.push_back({TrackEventKind::Death, t.id});
        }
    }
    std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Dead; });
    return out;
}

}  // namespace bhsim
