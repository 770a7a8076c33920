#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gesturepipe/handgeom.hpp"
#include "gesturepipe/rng.hpp"
#include "gesturepipe/synth.hpp"
#include "oracles.hpp"

using namespace gp;
using namespace gp::geom;
using namespace gp::handgeom;

namespace {

BinaryMask disk(int w, int h, int cx, int cy, int r) {
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
    return m;
}

Pt brute_dt_argmax(const BinaryMask& m) {
    const auto dt = oracle::dt_brute(m);
    Pt best{0, 0};
    std::int64_t best_v = -1;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            const std::int64_t v = dt[static_cast<std::size_t>(y) * m.width + x];
            if (v > best_v) {
                best_v = v;
                best = {x, y};
            }
        }
    return best;
}

}  // namespace

TEST_CASE("estimate_center") {
    SUBCASE("filled square finds the geometric center") {
        BinaryMask m(21, 21);
        for (int y = 4; y <= 16; ++y)
            for (int x = 4; x <= 16; ++x) m.set(x, y, true);
        const auto contours = trace_contours(m);
        REQUIRE(contours.size() == 1);
        CHECK(estimate_center(m, contours[0]) == Pt{10, 10});
    }
    SUBCASE("palm and fist centers stay inside the palm disk") {
        for (int cls : {0, 5}) {
            const BinaryMask m = synth::render_silhouette(cls, 160, 160, 80, 100, 34);
            const auto contours = trace_contours(m);
            REQUIRE(!contours.empty());
            const Pt c = estimate_center(m, contours[0]);
            CHECK(c == brute_dt_argmax(m));
            CHECK(dist(c, Pt{80, 100}) <= 34.0);
        }
    }
    SUBCASE("tie broken to the smallest row then column") {
        BinaryMask m(12, 8);
        for (int y = 2; y <= 4; ++y)
            for (int x = 2; x <= 7; ++x) m.set(x, y, true);
        const auto contours = trace_contours(m);
        const Pt c = estimate_center(m, contours[0]);
        // Middle row y=3 has DT 2 for x in 3..6; tie -> smallest x.
        CHECK(c == Pt{3, 3});
    }
    SUBCASE("empty contour rejected") {
        const BinaryMask m(4, 4);
        CHECK_THROWS(estimate_center(m, Contour{}));
    }
}

TEST_CASE("validate_defects") {
    Config cfg;

    SUBCASE("fist silhouette yields nothing") {
        Config small = cfg;
        small.min_area = 200;
        const BinaryMask m = synth::render_silhouette(0, 160, 160, 80, 100, 34);
        const auto obs = analyze(m, small);
        REQUIRE(obs.has_value());
        CHECK(obs->fingertips.empty());
    }
    SUBCASE("five-finger comb: 4 valid defects, 5 fingertips") {
        const std::vector<Pt> tips = {{0, 40}, {100, 10}, {200, 0}, {300, 10}, {400, 40}};
        const std::vector<Pt> valleys = {{50, 120}, {150, 90}, {250, 90}, {350, 120}};
        std::vector<Pt> comb;
        for (int t = 0; t < 5; ++t) {
            comb.push_back(tips[t]);
            if (t < 4) comb.push_back(valleys[t]);
        }
        comb.push_back({400, 200});
        comb.push_back({0, 200});
        const Polygon poly{comb};
        const auto hull = convex_hull(comb);
        const auto defects = convexity_defects(comb, hull);
        const Pt center{200, 160};
        const auto [fingertips, valid] = validate_defects(defects, center, poly, cfg);
        CHECK(valid.size() == 4);
        CHECK(fingertips.size() == 5);
        for (const Pt& t : tips)
            CHECK(std::find(fingertips.begin(), fingertips.end(), t) != fingertips.end());
    }
    SUBCASE("shallow ripple rejected by the depth fraction") {
        ConvexityDefect ripple{{0, 0}, {50, 0}, {25, 2}, 2.0};
        Polygon poly{{{0, 0}, {50, 0}, {50, 100}, {0, 100}}};  // 100 px tall hand
        const auto [tips, valid] = validate_defects({ripple}, {25, 50}, poly, cfg);
        CHECK(valid.empty());
        CHECK(tips.empty());
    }
    SUBCASE("wide-angle valley rejected") {
        // Deep but blunt: angle at far is about 127 degrees.
        ConvexityDefect blunt{{0, 0}, {200, 0}, {100, 50}, 50.0};
        Polygon poly{{{0, 0}, {200, 0}, {200, 100}, {0, 100}}};
        const auto [tips, valid] = validate_defects({blunt}, {100, 80}, poly, cfg);
        CHECK(valid.empty());
    }
}

TEST_CASE("estimate_palm_radius") {
    SUBCASE("fist fallback equals the distance transform at the center") {
        const BinaryMask m = disk(64, 64, 32, 32, 20);
        const DistanceGrid dt = distance_transform(m);
        const auto contours = trace_contours(m);
        const Pt c = estimate_center(m, contours[0], dt);
        const double r = estimate_palm_radius(c, {}, dt);
        CHECK(r == doctest::Approx(dt.at(c.x, c.y)));  // definitional identity
        CHECK(r == doctest::Approx(20.0).epsilon(0.06));
        const auto brute = oracle::dt_brute(m);
        CHECK(r == doctest::Approx(std::sqrt(
                       double(brute[static_cast<std::size_t>(c.y) * m.width + c.x]))));
    }
    SUBCASE("max far distance wins") {
        const Pt center{0, 0};
        std::vector<ConvexityDefect> defects;
        for (int d : {25, 28, 26, 27})
            defects.push_back({{}, {}, Pt{d, 0}, 10.0});
        const DistanceGrid dummy{1, 1, {0}};
        CHECK(estimate_palm_radius(center, defects, dummy) == doctest::Approx(28.0));
    }
    SUBCASE("single valid defect gives its far distance") {
        const DistanceGrid dummy{1, 1, {0}};
        const std::vector<ConvexityDefect> one = {{{}, {}, Pt{3, 4}, 5.0}};
        CHECK(estimate_palm_radius({0, 0}, one, dummy) == doctest::Approx(5.0));
    }
}

TEST_CASE("crop_hand") {
    Config cfg;  // wrist_factor 1.5

    SUBCASE("arm rows beyond center + 1.5R are removed") {
        BinaryMask m = disk(40, 80, 20, 20, 10);
        for (int y = 20; y < 80; ++y)
            for (int x = 17; x <= 23; ++x) m.set(x, y, true);
        const auto contours = trace_contours(m);
        const Pt center = estimate_center(m, contours[0]);
        const BinaryMask out = crop_hand(m, contours[0], center, 10.0, cfg);
        const int expected_h = center.y + 15 - 10 + 1;  // rows 10 .. cut
        CHECK(out.height == expected_h);
        CHECK(out.width == 21);
    }
    SUBCASE("hand fully above the cut is just tight-boxed") {
        BinaryMask m = disk(64, 64, 30, 20, 9);
        const auto contours = trace_contours(m);
        const BinaryMask out = crop_hand(m, contours[0], {30, 20}, 9.0, cfg);
        CHECK(out.width == 19);
        CHECK(out.height == 19);
        CHECK(out.count_foreground() == m.count_foreground());
    }
    SUBCASE("huge wrist factor is the identity crop") {
        Config loose = cfg;
        loose.wrist_factor = 100.0;
        BinaryMask m = disk(40, 80, 20, 20, 10);
        for (int y = 20; y < 80; ++y) m.set(20, y, true);
        const auto contours = trace_contours(m);
        const BinaryMask out = crop_hand(m, contours[0], {20, 20}, 10.0, loose);
        CHECK(out.height == 70);  // rows 10..79
        CHECK(out.count_foreground() == m.count_foreground());
    }
}

TEST_CASE("normalize_canvas") {
    SUBCASE("64x64 input is unchanged") {
        rng::Rng rng(3);
        BinaryMask m(64, 64);
        for (auto& b : m.bits) b = rng.uniform() < 0.5;
        if (m.count_foreground() == 0) m.set(0, 0, true);
        CHECK(normalize_canvas(m, 64) == m);
    }
    SUBCASE("128x64 scales to 64x32 with 16-row margins") {
        const BinaryMask m(128, 64, true);
        const BinaryMask out = normalize_canvas(m, 64);
        CHECK(out.width == 64);
        CHECK(out.height == 64);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                CHECK(out.at(x, y) == (y >= 16 && y < 48));
    }
    SUBCASE("10x30 region becomes 21x64 centered") {
        const BinaryMask m(10, 30, true);
        const BinaryMask out = normalize_canvas(m, 64);
        int min_x = 64, max_x = -1, min_y = 64, max_y = -1;
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                if (out.at(x, y)) {
                    min_x = std::min(min_x, x);
                    max_x = std::max(max_x, x);
                    min_y = std::min(min_y, y);
                    max_y = std::max(max_y, y);
                }
        CHECK(max_x - min_x + 1 == 21);  // floor(10 * 64 / 30)
        CHECK(max_y - min_y + 1 == 64);
        CHECK(min_x == (64 - 21) / 2);
        CHECK(min_y == 0);
    }
    SUBCASE("nearest-neighbor sampling matches the stripe oracle") {
        BinaryMask m(96, 40);
        for (int y = 0; y < 40; ++y)
            for (int x = 0; x < 96; ++x) m.set(x, y, (x / 8) % 2 == 0);
        const BinaryMask out = normalize_canvas(m, 64);
        const int out_h = (40 * 64) / 96;  // 26
        const int off_y = (64 - out_h) / 2;
        for (int y = 0; y < out_h; ++y)
            for (int x = 0; x < 64; ++x) {
                const int sx = std::min(95, static_cast<int>((x + 0.5) * 96.0 / 64.0));
                CHECK(out.at(x, off_y + y) == ((sx / 8) % 2 == 0));
            }
    }
    SUBCASE("solid regions keep the longest side exactly and center within 1 px") {
        rng::Rng rng(9);
        for (int it = 0; it < 20; ++it) {
            const int w = 5 + static_cast<int>(rng.index(120));
            const int h = 5 + static_cast<int>(rng.index(120));
            const BinaryMask m(w, h, true);
            const BinaryMask out = normalize_canvas(m, 64);
            int min_x = 64, max_x = -1, min_y = 64, max_y = -1;
            for (int y = 0; y < 64; ++y)
                for (int x = 0; x < 64; ++x)
                    if (out.at(x, y)) {
                        min_x = std::min(min_x, x);
                        max_x = std::max(max_x, x);
                        min_y = std::min(min_y, y);
                        max_y = std::max(max_y, y);
                    }
            CHECK(std::max(max_x - min_x, max_y - min_y) + 1 == 64);
            CHECK(std::abs((min_x + max_x) / 2.0 - 31.5) <= 1.0);
            CHECK(std::abs((min_y + max_y) / 2.0 - 31.5) <= 1.0);
        }
    }
    SUBCASE("empty region rejected") {
        CHECK_THROWS(normalize_canvas(BinaryMask(8, 8), 64));
    }
}

TEST_CASE("locate_tracked_point") {
    SUBCASE("unique apex") {
        CHECK(locate_tracked_point(Polygon{{{5, 9}, {9, 1}, {1, 12}}}) == Pt{9, 1});
    }
    SUBCASE("flat top breaks ties to the left") {
        CHECK(locate_tracked_point(Polygon{{{8, 2}, {3, 2}, {5, 7}}}) == Pt{3, 2});
    }
    SUBCASE("palm polygon tracks the middle fingertip") {
        const BinaryMask m = synth::render_silhouette(5, 160, 160, 80, 100, 34);
        const auto contours = trace_contours(m);
        const Polygon poly =
            approx_polygon(contours[0].points, 0.02 * contours[0].perimeter());
        const Pt tracked = locate_tracked_point(poly);
        Pt expect = poly.vertices[0];  // min-row scan oracle
        for (const Pt& p : poly.vertices)
            if (p.y < expect.y || (p.y == expect.y && p.x < expect.x)) expect = p;
        CHECK(tracked == expect);
        CHECK(std::abs(tracked.x - 80) <= 3);  // middle fingertip
    }
}

TEST_CASE("analyze") {
    Config cfg;
    cfg.min_area = 200;

    SUBCASE("pipeline determinism: identical mask, identical observation") {
        const BinaryMask m = synth::render_silhouette(4, 160, 160, 80, 100, 34);
        const auto a = analyze(m, cfg);
        const auto b = analyze(m, cfg);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(a->center == b->center);
        CHECK(a->palm_radius == b->palm_radius);
        CHECK(a->fingertips == b->fingertips);
        CHECK(a->tracked_point == b->tracked_point);
        CHECK(a->canvas == b->canvas);
    }
    SUBCASE("fingertip count equals the finger count for k >= 2") {
        for (int cls = 2; cls <= 5; ++cls) {
            const BinaryMask m = synth::render_silhouette(cls, 160, 160, 80, 100, 34);
            const auto obs = analyze(m, cfg);
            REQUIRE(obs.has_value());
            CHECK(obs->fingertips.size() == static_cast<std::size_t>(cls));
        }
        // A single finger produces no between-finger defect, so no fingertips;
        // same for the fist. Inherent to defect-endpoint fingertip detection.
        for (int cls : {0, 1}) {
            const BinaryMask m = synth::render_silhouette(cls, 160, 160, 80, 100, 34);
            const auto obs = analyze(m, cfg);
            REQUIRE(obs.has_value());
            CHECK(obs->fingertips.empty());
        }
    }
    SUBCASE("blobs below min_area are ignored") {
        BinaryMask m(64, 64);
        for (int y = 10; y < 20; ++y)
            for (int x = 10; x < 20; ++x) m.set(x, y, true);  // area 100 < 200
        CHECK(!analyze(m, cfg).has_value());
        CHECK(!analyze(BinaryMask(32, 32), cfg).has_value());
    }
    SUBCASE("canvas is centered and tracked point lies on the polygon") {
        const BinaryMask m = synth::render_silhouette(5, 160, 160, 76, 104, 30);
        const auto obs = analyze(m, cfg);
        REQUIRE(obs.has_value());
        CHECK(obs->canvas.width == 64);
        CHECK(obs->canvas.height == 64);
        CHECK(obs->palm_radius > 0.0);
        const auto contours = trace_contours(m);
        const Polygon poly =
            approx_polygon(contours[0].points, 0.02 * contours[0].perimeter());
        CHECK(std::find(poly.vertices.begin(), poly.vertices.end(), obs->tracked_point) !=
              poly.vertices.end());
    }
}
