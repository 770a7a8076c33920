#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gesturepipe/geometry.hpp"

namespace gp::handgeom {

struct Config {
    int min_area = 1000;             // px^2; contours below are ignored
    double rdp_epsilon_frac = 0.02;  // of contour perimeter
    double min_depth_frac = 0.3;     // of polygon bounding-box height
    double max_angle_deg = 90.0;     // at the defect far point
    double merge_radius = 10.0;      // fingertip dedup radius, px
    double wrist_factor = 1.5;       // wrist cut at center.y + factor * palm radius
    int canvas_side = 64;
};

struct HandObservation {
    geom::Pt center;
    double palm_radius = 0.0;
    std::vector<geom::Pt> fingertips;
    geom::Pt tracked_point;
    BinaryMask canvas;
};

/// Argmax of the distance transform inside the contour's component; ties by
/// smallest row, then smallest column. Throws on an empty region.
geom::Pt estimate_center(const BinaryMask& mask, const geom::Contour& contour);
geom::Pt estimate_center(const BinaryMask& mask, const geom::Contour& contour,
                         const geom::DistanceGrid& dt);

/// Keeps defects that are deep (>= min_depth_frac of the polygon bbox height)
/// and sharp (angle at far < max_angle_deg). Fingertips are the deduplicated
/// start/end points of the kept defects; within merge_radius the point
/// farthest from the center wins.
std::pair<std::vector<geom::Pt>, std::vector<geom::ConvexityDefect>> validate_defects(
    const std::vector<geom::ConvexityDefect>& defects, const geom::Pt& center,
    const geom::Polygon& polygon, const Config& cfg);

/// Max far-point distance over valid defects, or the distance-transform value
/// at the center when there are none.
double estimate_palm_radius(const geom::Pt& center,
                            const std::vector<geom::ConvexityDefect>& valid_defects,
                            const geom::DistanceGrid& dt);

/// Keeps foreground rows up to center.y + wrist_factor * radius inside the
/// contour bounding box, re-tightened to its own bounding box. Returns an
/// empty mask when nothing is kept.
BinaryMask crop_hand(const BinaryMask& mask, const geom::Contour& contour,
                     const geom::Pt& center, double radius, const Config& cfg);

/// Aspect-preserving nearest-neighbor resize of the region onto a centered
/// side x side canvas. Throws on an empty region.
BinaryMask normalize_canvas(const BinaryMask& region, int side = 64);

/// Topmost polygon vertex; ties by smallest column.
geom::Pt locate_tracked_point(const geom::Polygon& polygon);

/// Full per-frame geometry: largest contour above min_area -> polygon ->
/// defects -> center/radius -> crop -> canvas. nullopt when no hand.
std::optional<HandObservation> analyze(const BinaryMask& mask, const Config& cfg);

/// One-line JSON record for debugging logs.
std::string observation_json(const HandObservation& obs, long frame_index);

}  // namespace gp::handgeom
