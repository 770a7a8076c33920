#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gesturepipe/geometry.hpp"

namespace gp::track {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct KalmanConfig {
    double q_pos = 1e-2;  // process noise, position
    double q_vel = 1e-1;  // process noise, velocity
    double r_meas = 4.0;  // measurement noise, px^2
    double p0 = 100.0;    // initial covariance scale
    int max_coast = 5;    // predict-only frames before the track resets
};

/// Frames a settled default-config filter needs to cover 90% of a position
/// step. Measured; asserted stable (+-1 frame) by the tests.
inline constexpr int kStepResponse90Frames = 3;

/// Constant-velocity filter on state (x, y, dx, dy) with measurements (x, y)
/// and unit frame time.
class KalmanFilter {
public:
    explicit KalmanFilter(const KalmanConfig& cfg = {});

    void init(const Vec2& z);

    /// x <- F x; P <- F P F^T + Q.
    void predict();

    /// Standard innovation update; returns false (state untouched) when the
    /// innovation covariance is numerically singular and the track should be
    /// reset by the caller.
    bool update(const Vec2& z);

    Vec2 position() const { return {x_(0), x_(1)}; }
    Vec2 velocity() const { return {x_(2), x_(3)}; }
    const Eigen::Vector4d& state() const { return x_; }
    const Eigen::Matrix4d& covariance() const { return P_; }
    const Eigen::Matrix4d& transition() const { return F_; }

private:
    Eigen::Vector4d x_ = Eigen::Vector4d::Zero();
    Eigen::Matrix4d P_ = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d F_;
    Eigen::Matrix<double, 2, 4> H_;
    Eigen::Matrix4d Q_;
    Eigen::Matrix2d R_;
    double p0_;
};

/// Per-frame tracker with the coast/reset policy on missed detections.
class PointTracker {
public:
    explicit PointTracker(const KalmanConfig& cfg = {}) : cfg_(cfg), filter_(cfg) {}

    /// Feed one frame's measurement (nullopt = no detection). Returns the
    /// filtered position, or nullopt while no track is alive.
    std::optional<Vec2> feed(const std::optional<Vec2>& measurement);

    bool has_track() const { return alive_; }
    void reset();

private:
    KalmanConfig cfg_;
    KalmanFilter filter_;
    bool alive_ = false;
    int coast_ = 0;
};

struct TrackSample {
    std::optional<Vec2> raw;
    std::optional<Vec2> filtered;
};

std::vector<TrackSample> smooth_track(const std::vector<std::optional<Vec2>>& measurements,
                                      const KalmanConfig& cfg = {});

/// Maps a camera-space active region onto the screen about the region center,
/// with a sensitivity gain; results clamp to the screen and round half away
/// from zero.
struct ScreenMap {
    geom::Rect active{0, 0, 640, 480};
    int screen_w = 1920;
    int screen_h = 1080;
    double gain = 1.0;
};

Vec2 map_to_screen_f(const Vec2& p, const ScreenMap& map);
geom::Pt map_to_screen(const Vec2& p, const ScreenMap& map);

/// CSV rows: frame,raw_x,raw_y,filt_x,filt_y,screen_x,screen_y (blank cells
/// where a frame had no measurement or no track).
void export_track_csv(const std::vector<TrackSample>& samples, const ScreenMap& map,
                      const std::string& path);

}  // namespace gp::track
