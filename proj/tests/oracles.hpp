// Brute-force reference implementations used to check the library. These are
// deliberately simple and independent of the production code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gesturepipe/geometry.hpp"
#include "gesturepipe/image.hpp"

namespace oracle {

using gp::BinaryMask;
using gp::Frame;
using gp::geom::Pt;

// --- imgproc ---------------------------------------------------------------

inline Frame blur_direct(const Frame& f, double sigma, int radius) {
    const int w = f.width, h = f.height, ch = f.channels;
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;

    Frame out(w, h, ch);
    auto cl = [](int v, int hi) { return std::max(0, std::min(v, hi)); };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double acc = 0;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx)
                        acc += k[dy + radius] * k[dx + radius] *
                               f.at(cl(x + dx, w - 1), cl(y + dy, h - 1), c);
                out.at(x, y, c) = static_cast<std::uint8_t>(
                    std::clamp(std::lround(acc), 0L, 255L));
            }
    return out;
}

/// Exhaustive 256-threshold scan maximizing between-class variance;
/// smallest threshold wins ties.
inline int otsu_scan(const Frame& f) {
    int best_t = 0;
    double best = -1;
    const double n = static_cast<double>(f.data.size());
    for (int t = 0; t < 256; ++t) {
        double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (std::uint8_t v : f.data) {
            if (v <= t) { n0 += 1; s0 += v; }
            else { n1 += 1; s1 += v; }
        }
        if (n0 == 0 || n1 == 0) continue;
        const double m0 = s0 / n0, m1 = s1 / n1;
        const double var = (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1);
        if (var > best + 1e-12) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

inline BinaryMask erode_set(const BinaryMask& m, int r) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy)
                for (int dx = -r; dx <= r && all; ++dx)
                    if (!m.at_clamped(x + dx, y + dy)) all = false;
            out.set(x, y, all);
        }
    return out;
}

inline BinaryMask dilate_set(const BinaryMask& m, int r) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (int dy = -r; dy <= r && !any; ++dy)
                for (int dx = -r; dx <= r && !any; ++dx)
                    if (m.at_clamped(x + dx, y + dy)) any = true;
            out.set(x, y, any);
        }
    return out;
}

// --- geometry ---------------------------------------------------------------

/// O(n^3)-ish hull: a point is a hull vertex iff it is not strictly inside
/// the hull, i.e. not expressible as lying inside any triangle of other
/// points and not strictly between two collinear points.
inline std::vector<Pt> hull_brute(const std::vector<Pt>& pts_in) {
    std::vector<Pt> pts = pts_in;
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();

    auto inside_triangle = [](const Pt& p, const Pt& a, const Pt& b, const Pt& c) {
        const long long d1 = gp::geom::cross(a, b, p);
        const long long d2 = gp::geom::cross(b, c, p);
        const long long d3 = gp::geom::cross(c, a, p);
        const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
        const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
        return !(has_neg && has_pos);
    };
    auto strictly_between = [](const Pt& p, const Pt& a, const Pt& b) {
        if (gp::geom::cross(a, b, p) != 0) return false;
        const long long dot = static_cast<long long>(p.x - a.x) * (b.x - a.x) +
                              static_cast<long long>(p.y - a.y) * (b.y - a.y);
        return dot > 0 && dot < gp::geom::dist_sq(a, b);
    };

    std::vector<Pt> vertices;
    for (std::size_t i = 0; i < n; ++i) {
        bool dominated = false;
        for (std::size_t a = 0; a < n && !dominated; ++a) {
            if (a == i) continue;
            for (std::size_t b = a + 1; b < n && !dominated; ++b) {
                if (b == i) continue;
                if (strictly_between(pts[i], pts[a], pts[b])) dominated = true;
                for (std::size_t c = b + 1; c < n && !dominated; ++c) {
                    if (c == i) continue;
                    if (inside_triangle(pts[i], pts[a], pts[b], pts[c]) &&
                        !(pts[i] == pts[a]) && !(pts[i] == pts[b]) && !(pts[i] == pts[c]) &&
                        !strictly_between(pts[i], pts[a], pts[b]) &&
                        !strictly_between(pts[i], pts[b], pts[c]) &&
                        !strictly_between(pts[i], pts[a], pts[c]) &&
                        gp::geom::cross(pts[a], pts[b], pts[c]) != 0)
                        dominated = true;
                }
            }
        }
        if (!dominated) vertices.push_back(pts[i]);
    }
    return vertices;  // as a set; caller compares ignoring order
}

/// O(n^2 m^2) nearest-background scan with the image border as background.
inline std::vector<std::int64_t> dt_brute(const BinaryMask& m) {
    std::vector<std::int64_t> out(m.bits.size(), 0);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y)) continue;
            // Border: nearest out-of-image cell.
            std::int64_t best = std::min({std::int64_t(x + 1), std::int64_t(y + 1),
                                          std::int64_t(m.width - x), std::int64_t(m.height - y)});
            best *= best;
            for (int by = 0; by < m.height; ++by)
                for (int bx = 0; bx < m.width; ++bx) {
                    if (m.at(bx, by)) continue;
                    const std::int64_t dx = bx - x, dy = by - y;
                    best = std::min(best, dx * dx + dy * dy);
                }
            out[static_cast<std::size_t>(y) * m.width + x] = best;
        }
    return out;
}

/// Max deviation of any dropped contour point from the polygon, treating the
/// polygon as a closed polyline.
inline double max_deviation(const std::vector<Pt>& contour, const std::vector<Pt>& poly) {
    double worst = 0;
    for (const Pt& p : contour) {
        if (std::find(poly.begin(), poly.end(), p) != poly.end()) continue;
        double best = 1e300;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Pt& a = poly[i];
            const Pt& b = poly[(i + 1) % poly.size()];
            best = std::min(best, gp::geom::point_segment_distance(p, a, b));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

/// Reference HSV conversion kept separate from the library implementation.
struct HsvD {
    double h, s, v;  // h in degrees [0, 360)
};

inline HsvD rgb_to_hsv_ref(double r, double g, double b) {
    r /= 255.0; g /= 255.0; b /= 255.0;
    const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    const double d = mx - mn;
    double h = 0;
    if (d > 0) {
        if (mx == r) h = std::fmod((g - b) / d, 6.0);
        else if (mx == g) h = (b - r) / d + 2.0;
        else h = (r - g) / d + 4.0;
        h *= 60.0;
        if (h < 0) h += 360.0;
    }
    return {h, mx > 0 ? d / mx : 0.0, mx};
}

}  // namespace oracle
