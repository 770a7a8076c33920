#include "gesturepipe/handgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace gp::handgeom {

using geom::Contour;
using geom::ConvexityDefect;
using geom::DistanceGrid;
using geom::Polygon;
using geom::Pt;

geom::Pt estimate_center(const BinaryMask& mask, const Contour& contour) {
    return estimate_center(mask, contour, geom::distance_transform(mask));
}

geom::Pt estimate_center(const BinaryMask& mask, const Contour& contour,
                         const DistanceGrid& dt) {
    if (contour.points.empty()) throw std::invalid_argument("empty contour region");

    // Flood-fill the component the contour belongs to.
    std::vector<std::uint8_t> in_region(mask.bits.size(), 0);
    std::vector<Pt> stack{contour.points.front()};
    if (!mask.at(stack[0].x, stack[0].y)) throw std::invalid_argument("contour seed is background");
    in_region[static_cast<std::size_t>(stack[0].y) * mask.width + stack[0].x] = 1;

    std::int64_t best = -1;
    Pt best_pt{};
    while (!stack.empty()) {
        const Pt p = stack.back();
        stack.pop_back();
        const std::int64_t d = dt.squared(p.x, p.y);
        if (d > best || (d == best && (p.y < best_pt.y || (p.y == best_pt.y && p.x < best_pt.x)))) {
            best = d;
            best_pt = p;
        }
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = p.x + dx, ny = p.y + dy;
                if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                const std::size_t ni = static_cast<std::size_t>(ny) * mask.width + nx;
                if (mask.bits[ni] && !in_region[ni]) {
                    in_region[ni] = 1;
                    stack.push_back({nx, ny});
                }
            }
    }
    return best_pt;
}

std::pair<std::vector<Pt>, std::vector<ConvexityDefect>> validate_defects(
    const std::vector<ConvexityDefect>& defects, const Pt& center, const Polygon& polygon,
    const Config& cfg) {
    const double min_depth = cfg.min_depth_frac * polygon.bbox().h;
    const double max_angle_rad = cfg.max_angle_deg * std::numbers::pi / 180.0;

    std::vector<ConvexityDefect> valid;
    for (const ConvexityDefect& d : defects) {
        if (d.depth < min_depth) continue;
        const double ax = d.start.x - d.far.x, ay = d.start.y - d.far.y;
        const double bx = d.end.x - d.far.x, by = d.end.y - d.far.y;
        const double la = std::hypot(ax, ay), lb = std::hypot(bx, by);
        if (la == 0.0 || lb == 0.0) continue;
        const double cosang = std::clamp((ax * bx + ay * by) / (la * lb), -1.0, 1.0);
        if (std::acos(cosang) >= max_angle_rad) continue;
        valid.push_back(d);
    }

    std::vector<Pt> tips;
    for (const ConvexityDefect& d : valid)
        for (const Pt& cand : {d.start, d.end}) {
            bool merged = false;
            for (Pt& t : tips) {
                if (geom::dist(t, cand) < cfg.merge_radius) {
                    if (geom::dist_sq(cand, center) > geom::dist_sq(t, center)) t = cand;
                    merged = true;
                    break;
                }
            }
            if (!merged) tips.push_back(cand);
        }
    return {std::move(tips), std::move(valid)};
}

double estimate_palm_radius(const Pt& center, const std::vector<ConvexityDefect>& valid_defects,
                            const DistanceGrid& dt) {
    if (valid_defects.empty()) return dt.at(center.x, center.y);
    double best = 0.0;
    for (const ConvexityDefect& d : valid_defects)
        best = std::max(best, geom::dist(d.far, center));
    return best;
}

BinaryMask crop_hand(const BinaryMask& mask, const Contour& contour, const Pt& center,
                     double radius, const Config& cfg) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    const geom::Rect box = contour.bbox();
    const int cut_row = static_cast<int>(std::floor(center.y + cfg.wrist_factor * radius));
    const int y_end = std::min(box.bottom(), cut_row + 1);

    int min_x = mask.width, max_x = -1, min_y = mask.height, max_y = -1;
    for (int y = box.y; y < y_end; ++y)
        for (int x = box.x; x < box.right(); ++x)
            if (mask.at(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x < 0) return BinaryMask{};

    BinaryMask out(max_x - min_x + 1, max_y - min_y + 1);
    for (int y = min_y; y <= max_y; ++y)
        for (int x = min_x; x <= max_x; ++x)
            out.set(x - min_x, y - min_y, mask.at(x, y));
    return out;
}

BinaryMask normalize_canvas(const BinaryMask& region, int side) {
    if (region.count_foreground() == 0) throw std::invalid_argument("empty region");
    const int w = region.width, h = region.height;
    int out_w, out_h;
    if (w >= h) {
        out_w = side;
        out_h = std::max(1, (h * side) / w);
    } else {
        out_h = side;
        out_w = std::max(1, (w * side) / h);
    }

    BinaryMask canvas(side, side);
    const int off_x = (side - out_w) / 2;
    const int off_y = (side - out_h) / 2;
    for (int y = 0; y < out_h; ++y) {
        const int sy = std::min(h - 1, ((2 * y + 1) * h) / (2 * out_h));
        for (int x = 0; x < out_w; ++x) {
            const int sx = std::min(w - 1, ((2 * x + 1) * w) / (2 * out_w));
            canvas.set(off_x + x, off_y + y, region.at(sx, sy));
        }
    }
    return canvas;
}

geom::Pt locate_tracked_point(const Polygon& polygon) {
    if (polygon.vertices.empty()) throw std::invalid_argument("empty polygon");
    Pt best = polygon.vertices.front();
    for (const Pt& p : polygon.vertices)
        if (p.y < best.y || (p.y == best.y && p.x < best.x)) best = p;
    return best;
}

std::optional<HandObservation> analyze(const BinaryMask& mask, const Config& cfg) {
    const std::vector<Contour> contours = geom::trace_contours(mask);
    if (contours.empty()) return std::nullopt;
    const Contour& contour = contours.front();
    if (contour.area() < cfg.min_area) return std::nullopt;

    Polygon polygon = geom::approx_polygon(
        contour.points, std::max(1e-6, cfg.rdp_epsilon_frac * contour.perimeter()));
    if (polygon.vertices.size() < 3) return std::nullopt;

    Polygon hull;
    try {
        hull = geom::convex_hull(polygon.vertices);
    } catch (const std::invalid_argument&) {
        return std::nullopt;  // collinear sliver
    }
    const std::vector<ConvexityDefect> defects = geom::convexity_defects(polygon.vertices, hull);

    const DistanceGrid dt = geom::distance_transform(mask);
    const Pt center = estimate_center(mask, contour, dt);
    auto [tips, valid] = validate_defects(defects, center, polygon, cfg);
    const double radius = estimate_palm_radius(center, valid, dt);
    if (!(radius > 0.0)) return std::nullopt;

    const BinaryMask region = crop_hand(mask, contour, center, radius, cfg);
    if (region.count_foreground() == 0) return std::nullopt;

    HandObservation obs;
    obs.center = center;
    obs.palm_radius = radius;
    obs.fingertips = std::move(tips);
    obs.tracked_point = locate_tracked_point(polygon);
    obs.canvas = normalize_canvas(region, cfg.canvas_side);
    return obs;
}

std::string observation_json(const HandObservation& obs, long frame_index) {
    nlohmann::ordered_json j;
    j["frame"] = frame_index;
    j["center"] = {obs.center.x, obs.center.y};
    j["palm_radius"] = obs.palm_radius;
    nlohmann::ordered_json tips = nlohmann::ordered_json::array();
    for (const Pt& t : obs.fingertips) tips.push_back({t.x, t.y});
    j["fingertips"] = std::move(tips);
    j["tracked_point"] = {obs.tracked_point.x, obs.tracked_point.y};
    j["canvas_foreground"] = obs.canvas.count_foreground();
    return j.dump();
}

}  // namespace gp::handgeom
