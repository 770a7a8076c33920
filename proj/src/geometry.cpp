#include "gesturepipe/geometry.hpp"

#include <algorithm>
#include <limits>

namespace gp::geom {

double point_segment_distance(const Pt& p, const Pt& a, const Pt& b) {
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double apx = p.x - a.x, apy = p.y - a.y;
    const double len_sq = abx * abx + aby * aby;
    if (len_sq == 0.0) return dist(p, a);
    const double t = std::clamp((apx * abx + apy * aby) / len_sq, 0.0, 1.0);
    const double dx = apx - t * abx, dy = apy - t * aby;
    return std::sqrt(dx * dx + dy * dy);
}

double point_line_distance(const Pt& p, const Pt& a, const Pt& b) {
    const double len = dist(a, b);
    if (len == 0.0) return dist(p, a);
    return std::abs(static_cast<double>(cross(a, b, p))) / len;
}

long long Contour::twice_signed_area() const {
    long long sum = 0;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt& a = points[i];
        const Pt& b = points[(i + 1) % n];
        sum += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
    }
    return sum;
}

double Contour::perimeter() const {
    double sum = 0.0;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) sum += dist(points[i], points[(i + 1) % n]);
    return sum;
}

namespace {

Rect bbox_of(const std::vector<Pt>& pts) {
    if (pts.empty()) return {};
    int min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const Pt& p : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace

Rect Contour::bbox() const { return bbox_of(points); }
Rect Polygon::bbox() const { return bbox_of(vertices); }

namespace {

// Moore neighborhood in clockwise screen order (x right, y down).
constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int direction_between(const Pt& from, const Pt& to) {
    for (int d = 0; d < 8; ++d)
        if (from.x + kDx[d] == to.x && from.y + kDy[d] == to.y) return d;
    return -1;
}

// Moore-neighbor border following with Jacob's stopping criterion; the walk
// terminates when the first transition out of the start pixel repeats.
std::vector<Pt> trace_border(const BinaryMask& mask, const Pt& start) {
    struct State {
        Pt cur;
        int back;  // direction from cur to the background pixel we came from
    };

    auto step = [&](const State& s) -> State {
        for (int i = 1; i <= 8; ++i) {
            const int d = (s.back + i) % 8;
            const Pt p{s.cur.x + kDx[d], s.cur.y + kDy[d]};
            if (mask.at_clamped(p.x, p.y)) {
                const int prev = (d + 7) % 8;
                const Pt bg{s.cur.x + kDx[prev], s.cur.y + kDy[prev]};
                return {p, direction_between(p, bg)};
            }
        }
        return {s.cur, -1};  // isolated pixel
    };

    const State init{start, 0};  // backtrack = west of start, background by construction
    const State first = step(init);
    if (first.back < 0) return {start};

    std::vector<Pt> ring;
    State s = first;
    const std::size_t limit = 4 * mask.bits.size() + 8;
    while (ring.size() < limit) {
        ring.push_back(s.cur);
        s = step(s);
        if (s.cur == first.cur && s.back == first.back) break;
    }

    // Present the ring starting at the topmost-leftmost pixel.
    for (std::size_t i = 0; i < ring.size(); ++i)
        if (ring[i] == start) {
            std::rotate(ring.begin(), ring.begin() + i, ring.end());
            break;
        }
    return ring;
}

}  // namespace

std::vector<Contour> trace_contours(const BinaryMask& mask) {
    std::vector<std::uint8_t> seen(mask.bits.size(), 0);
    std::vector<Contour> contours;
    std::vector<Pt> stack;

    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
            if (!mask.bits[idx] || seen[idx]) continue;

            // Row-major scan hits each component at its topmost-leftmost pixel.
            const Pt start{x, y};
            stack.assign(1, start);
            seen[idx] = 1;
            while (!stack.empty()) {
                const Pt p = stack.back();
                stack.pop_back();
                for (int d = 0; d < 8; ++d) {
                    const int nx = p.x + kDx[d], ny = p.y + kDy[d];
                    if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                    const std::size_t ni = static_cast<std::size_t>(ny) * mask.width + nx;
                    if (mask.bits[ni] && !seen[ni]) {
                        seen[ni] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }

            std::vector<Pt> ring = trace_border(mask, start);
            if (ring.size() >= 3) contours.push_back(Contour{std::move(ring)});
        }

    std::stable_sort(contours.begin(), contours.end(), [](const Contour& a, const Contour& b) {
        return std::abs(a.twice_signed_area()) > std::abs(b.twice_signed_area());
    });
    return contours;
}

Polygon convex_hull(const std::vector<Pt>& points) {
    std::vector<Pt> pts = points;
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw std::invalid_argument("degenerate contour: fewer than 3 distinct points");

    // Monotone chain; strict turns only, so no three output vertices are collinear.
    auto build = [](auto begin, auto end) {
        std::vector<Pt> chain;
        for (auto it = begin; it != end; ++it) {
            while (chain.size() >= 2 &&
                   cross(chain[chain.size() - 2], chain[chain.size() - 1], *it) <= 0)
                chain.pop_back();
            chain.push_back(*it);
        }
        return chain;
    };

    std::vector<Pt> lower = build(pts.begin(), pts.end());
    std::vector<Pt> upper = build(pts.rbegin(), pts.rend());
    if (lower.size() < 2 || (lower.size() == 2 && upper.size() == 2))
        throw std::invalid_argument("degenerate contour: all points collinear");

    lower.pop_back();
    upper.pop_back();
    lower.insert(lower.end(), upper.begin(), upper.end());
    if (lower.size() < 3) throw std::invalid_argument("degenerate contour: all points collinear");
    return Polygon{std::move(lower)};
}

std::vector<ConvexityDefect> convexity_defects(const std::vector<Pt>& contour,
                                               const Polygon& hull) {
    const std::size_t n = contour.size();
    std::vector<std::size_t> hull_idx;
    hull_idx.reserve(hull.vertices.size());
    for (const Pt& v : hull.vertices) {
        const auto it = std::find(contour.begin(), contour.end(), v);
        if (it == contour.end())
            throw std::invalid_argument("hull vertex is not a contour point");
        hull_idx.push_back(static_cast<std::size_t>(it - contour.begin()));
    }
    std::sort(hull_idx.begin(), hull_idx.end());
    hull_idx.erase(std::unique(hull_idx.begin(), hull_idx.end()), hull_idx.end());

    std::vector<ConvexityDefect> defects;
    const std::size_t m = hull_idx.size();
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i0 = hull_idx[k];
        const std::size_t i1 = hull_idx[(k + 1) % m];
        const Pt& s = contour[i0];
        const Pt& e = contour[i1];

        double best = 0.0;
        Pt far{};
        const std::size_t arc_len = (i1 + n - i0) % n;
        for (std::size_t j = 1; j < arc_len; ++j) {
            const Pt& p = contour[(i0 + j) % n];
            const double d = point_line_distance(p, s, e);
            if (d > best) {
                best = d;
                far = p;
            }
        }
        if (best > 0.0) defects.push_back({s, e, far, best});
    }
    return defects;
}

namespace {

void rdp_chain(const std::vector<Pt>& pts, std::size_t lo, std::size_t hi, double epsilon,
               std::vector<Pt>& out) {
    // Keeps pts[lo], recurses on the interior, never emits pts[hi].
    double best = 0.0;
    std::size_t split = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
        if (d > best) {
            best = d;
            split = i;
        }
    }
    if (best > epsilon) {
        rdp_chain(pts, lo, split, epsilon, out);
        rdp_chain(pts, split, hi, epsilon, out);
    } else {
        out.push_back(pts[lo]);
    }
}

}  // namespace

Polygon approx_polygon(const std::vector<Pt>& contour, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const std::size_t n = contour.size();
    if (n < 3) return Polygon{contour};

    // Anchor the closed ring at point 0 and the point farthest from it.
    std::size_t anchor = 0;
    long long best = -1;
    for (std::size_t i = 1; i < n; ++i) {
        const long long d = dist_sq(contour[0], contour[i]);
        if (d > best) {
            best = d;
            anchor = i;
        }
    }

    std::vector<Pt> half1(contour.begin(), contour.begin() + anchor + 1);
    std::vector<Pt> half2(contour.begin() + anchor, contour.end());
    half2.push_back(contour[0]);

    std::vector<Pt> out;
    rdp_chain(half1, 0, half1.size() - 1, epsilon, out);
    rdp_chain(half2, 0, half2.size() - 1, epsilon, out);
    return Polygon{std::move(out)};
}

DistanceGrid distance_transform(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    DistanceGrid grid{w, h, std::vector<std::int64_t>(static_cast<std::size_t>(w) * h, 0)};
    if (w == 0 || h == 0) return grid;

    // Column pass: row distance to the nearest background cell, with virtual
    // background rows at -1 and h.
    std::vector<std::int64_t> g(static_cast<std::size_t>(w) * h);
    for (int x = 0; x < w; ++x) {
        std::int64_t d = 0;  // virtual background above
        for (int y = 0; y < h; ++y) {
            d = mask.at(x, y) ? d + 1 : 0;
            g[static_cast<std::size_t>(y) * w + x] = d;
        }
        d = 0;  // virtual background below
        for (int y = h - 1; y >= 0; --y) {
            d = mask.at(x, y) ? d + 1 : 0;
            auto& cell = g[static_cast<std::size_t>(y) * w + x];
            cell = std::min(cell, d);
        }
    }

    // Row pass: 1-D squared-distance lower envelope (Felzenszwalb-Huttenlocher).
    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    std::vector<std::int64_t> f(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int64_t gy = g[static_cast<std::size_t>(y) * w + x];
            f[x] = gy * gy;
        }
        int k = 0;
        v[0] = 0;
        z[0] = -std::numeric_limits<double>::infinity();
        z[1] = std::numeric_limits<double>::infinity();
        for (int q = 1; q < w; ++q) {
            double s;
            for (;;) {
                const int p = v[k];
                s = (double(f[q] + std::int64_t(q) * q) - double(f[p] + std::int64_t(p) * p)) /
                    (2.0 * (q - p));
                if (s > z[k]) break;
                --k;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = std::numeric_limits<double>::infinity();
        }
        k = 0;
        for (int q = 0; q < w; ++q) {
            while (z[k + 1] < q) ++k;
            const std::int64_t dx = q - v[k];
            std::int64_t d2 = dx * dx + f[v[k]];
            // Virtual background columns at -1 and w.
            d2 = std::min(d2, std::int64_t(q + 1) * (q + 1));
            d2 = std::min(d2, std::int64_t(w - q) * (w - q));
            grid.sq[static_cast<std::size_t>(y) * w + q] = mask.at(q, y) ? d2 : 0;
        }
    }
    return grid;
}

}  // namespace gp::geom
