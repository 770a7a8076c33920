#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gesturepipe/image.hpp"

namespace gp::geom {

struct Pt {
    int x = 0;
    int y = 0;
    bool operator==(const Pt&) const = default;
};

struct PtF {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;
    int right() const { return x + w; }   // exclusive
    int bottom() const { return y + h; }  // exclusive
};

/// Cross product of (a-o) x (b-o). Positive = left turn in image coordinates
/// (x right, y down) under the tracing orientation used throughout.
inline long long cross(const Pt& o, const Pt& a, const Pt& b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

inline double dist(const Pt& a, const Pt& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline long long dist_sq(const Pt& a, const Pt& b) {
    const long long dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Euclidean distance from p to segment [a, b].
double point_segment_distance(const Pt& p, const Pt& a, const Pt& b);

/// Perpendicular distance from p to the line through a and b (a != b).
double point_line_distance(const Pt& p, const Pt& a, const Pt& b);

/// Closed boundary of one 8-connected foreground component; consecutive
/// points are 8-adjacent, first != last (closure implicit).
struct Contour {
    std::vector<Pt> points;

    /// Signed doubled shoelace area. Positive for traced contours.
    long long twice_signed_area() const;
    double area() const { return std::abs(twice_signed_area()) / 2.0; }
    double perimeter() const;
    Rect bbox() const;
};

/// Ordered vertex subset of a contour (hull or simplified polygon).
struct Polygon {
    std::vector<Pt> vertices;
    Rect bbox() const;
};

struct ConvexityDefect {
    Pt start;      // hull vertex opening the arc
    Pt end;        // hull vertex closing the arc
    Pt far;        // contour point of maximum deviation on the arc
    double depth;  // distance from far to the hull edge
};

/// Moore-neighbor border following over 8-connected components, outer borders
/// only. Components whose traced boundary has fewer than 3 points are
/// skipped. Result sorted largest shoelace area first.
std::vector<Contour> trace_contours(const BinaryMask& mask);

/// Minimal convex polygon over the points, positively oriented, no three
/// collinear vertices. Throws std::invalid_argument when all points are
/// collinear.
Polygon convex_hull(const std::vector<Pt>& points);

/// For each hull edge, the contour point on the subtended arc with maximum
/// distance to the edge. Edges with zero depth are omitted.
std::vector<ConvexityDefect> convexity_defects(const std::vector<Pt>& contour,
                                               const Polygon& hull);

/// Ramer-Douglas-Peucker on a closed point ring; vertices are original
/// points, order preserved, every dropped point within epsilon of the result.
Polygon approx_polygon(const std::vector<Pt>& contour, double epsilon);

/// Exact Euclidean distance to the nearest background cell; the image border
/// counts as background. Background cells hold 0.
struct DistanceGrid {
    int width = 0;
    int height = 0;
    std::vector<std::int64_t> sq;  // squared distances

    std::int64_t squared(int x, int y) const { return sq[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return std::sqrt(static_cast<double>(squared(x, y))); }
};

DistanceGrid distance_transform(const BinaryMask& mask);

}  // namespace gp::geom
