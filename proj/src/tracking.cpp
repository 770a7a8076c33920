#include "gesturepipe/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gp::track {

KalmanFilter::KalmanFilter(const KalmanConfig& cfg) : p0_(cfg.p0) {
    F_ << 1, 0, 1, 0,
          0, 1, 0, 1,
          0, 0, 1, 0,
          0, 0, 0, 1;
    H_ << 1, 0, 0, 0,
          0, 1, 0, 0;
    Q_ = Eigen::Vector4d(cfg.q_pos, cfg.q_pos, cfg.q_vel, cfg.q_vel).asDiagonal();
    R_ = Eigen::Vector2d(cfg.r_meas, cfg.r_meas).asDiagonal();
}

void KalmanFilter::init(const Vec2& z) {
    x_ << z.x, z.y, 0.0, 0.0;
    P_ = p0_ * Eigen::Matrix4d::Identity();
}

void KalmanFilter::predict() {
    x_ = F_ * x_;
    P_ = F_ * P_ * F_.transpose() + Q_;
}

bool KalmanFilter::update(const Vec2& z) {
    const Eigen::Vector2d zv(z.x, z.y);
    const Eigen::Vector2d y = zv - H_ * x_;
    const Eigen::Matrix2d S = H_ * P_ * H_.transpose() + R_;

    // Closed-form 2x2 inverse; a vanishing determinant signals divergence.
    const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    if (!std::isfinite(det) || std::abs(det) < 1e-12) return false;
    Eigen::Matrix2d S_inv;
    S_inv << S(1, 1), -S(0, 1), -S(1, 0), S(0, 0);
    S_inv /= det;

    const Eigen::Matrix<double, 4, 2> K = P_ * H_.transpose() * S_inv;
    x_ += K * y;
    P_ = (Eigen::Matrix4d::Identity() - K * H_) * P_;
    P_ = (0.5 * (P_ + P_.transpose())).eval();
    return true;
}

std::optional<Vec2> PointTracker::feed(const std::optional<Vec2>& measurement) {
    if (!alive_) {
        if (!measurement) return std::nullopt;
        filter_.init(*measurement);
        alive_ = true;
        coast_ = 0;
        return filter_.position();
    }

    filter_.predict();
    if (measurement) {
        if (!filter_.update(*measurement)) {
            // Diverged: restart from the measurement.
            filter_.init(*measurement);
        }
        coast_ = 0;
        return filter_.position();
    }

    if (++coast_ > cfg_.max_coast) {
        reset();
        return std::nullopt;
    }
    return filter_.position();
}

void PointTracker::reset() {
    alive_ = false;
    coast_ = 0;
}

std::vector<TrackSample> smooth_track(const std::vector<std::optional<Vec2>>& measurements,
                                      const KalmanConfig& cfg) {
    PointTracker tracker(cfg);
    std::vector<TrackSample> out;
    out.reserve(measurements.size());
    for (const auto& m : measurements) out.push_back({m, tracker.feed(m)});
    return out;
}

Vec2 map_to_screen_f(const Vec2& p, const ScreenMap& map) {
    const double cx = map.active.x + map.active.w / 2.0;
    const double cy = map.active.y + map.active.h / 2.0;
    const double sx = static_cast<double>(map.screen_w) / map.active.w;
    const double sy = static_cast<double>(map.screen_h) / map.active.h;
    double out_x = map.screen_w / 2.0 + (p.x - cx) * sx * map.gain;
    double out_y = map.screen_h / 2.0 + (p.y - cy) * sy * map.gain;
    out_x = std::clamp(out_x, 0.0, static_cast<double>(map.screen_w - 1));
    out_y = std::clamp(out_y, 0.0, static_cast<double>(map.screen_h - 1));
    return {out_x, out_y};
}

geom::Pt map_to_screen(const Vec2& p, const ScreenMap& map) {
    const Vec2 f = map_to_screen_f(p, map);
    return {static_cast<int>(std::lround(f.x)), static_cast<int>(std::lround(f.y))};
}

void export_track_csv(const std::vector<TrackSample>& samples, const ScreenMap& map,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "frame,raw_x,raw_y,filt_x,filt_y,screen_x,screen_y\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << i << ",";
        if (samples[i].raw)
            out << samples[i].raw->x << "," << samples[i].raw->y << ",";
        else
            out << ",,";
        if (samples[i].filtered) {
            const geom::Pt s = map_to_screen(*samples[i].filtered, map);
            out << samples[i].filtered->x << "," << samples[i].filtered->y << "," << s.x << ","
                << s.y;
        } else {
            out << ",,,";
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace gp::track
