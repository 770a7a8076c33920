#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gesturepipe/imgproc.hpp"
#include "gesturepipe/rng.hpp"
#include "oracles.hpp"

using namespace gp;
using namespace gp::imgproc;

namespace {

BinaryMask random_mask(int w, int h, double density, rng::Rng& rng) {
    BinaryMask m(w, h);
    for (auto& b : m.bits) b = rng.uniform() < density;
    return m;
}

Frame random_gray(int w, int h, rng::Rng& rng) {
    Frame f = Frame::gray(w, h);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(rng.index(256));
    return f;
}

}  // namespace

TEST_CASE("subtract_background basics") {
    Frame ref = Frame::gray(8, 6, 100);
    BackgroundModel model{ref, 30};

    SUBCASE("identical frame is all background") {
        const BinaryMask m = subtract_background(ref, model);
        CHECK(m.count_foreground() == 0);
    }
    SUBCASE("saturated difference is all foreground") {
        model.reference = Frame::gray(8, 6, 0);
        model.diff_threshold = 50;
        const BinaryMask m = subtract_background(Frame::gray(8, 6, 255), model);
        CHECK(m.count_foreground() == m.bits.size());
    }
    SUBCASE("difference of exactly the threshold stays background") {
        Frame f = ref;
        f.at(3, 2) = 130;  // |130-100| == 30, strict >
        const BinaryMask m = subtract_background(f, model);
        CHECK(m.count_foreground() == 0);
        f.at(3, 2) = 131;
        CHECK(subtract_background(f, model).at(3, 2));
    }
    SUBCASE("dimension mismatch rejected") {
        CHECK_THROWS(subtract_background(Frame::gray(4, 4), model));
    }
    SUBCASE("matches per-pixel oracle on random frames") {
        rng::Rng rng(7);
        Frame f = random_gray(8, 6, rng);
        model.reference = random_gray(8, 6, rng);
        const BinaryMask m = subtract_background(f, model);
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 8; ++x)
                CHECK(m.at(x, y) ==
                      (std::abs(int(f.at(x, y)) - int(model.reference.at(x, y))) > 30));
    }
}

TEST_CASE("color_filter ranges") {
    Frame f = Frame::rgb(4, 3);

    SUBCASE("full range accepts everything") {
        rng::Rng rng(3);
        for (auto& v : f.data) v = static_cast<std::uint8_t>(rng.index(256));
        CHECK(color_filter(f, ColorRange{}).count_foreground() == 12);
    }
    SUBCASE("empty (non-wrapping) range rejects everything") {
        ColorRange r;
        r.s_lo = 200;
        r.s_hi = 100;  // lower > upper on a non-wrapping channel
        CHECK(color_filter(f, r).count_foreground() == 0);
    }
    SUBCASE("wrap-around hue range catches pure red") {
        for (int i = 0; i < 12; ++i) {
            f.data[i * 3 + 0] = 255;
            f.data[i * 3 + 1] = 0;
            f.data[i * 3 + 2] = 0;
        }
        ColorRange r;
        r.h_lo = 175;  // 350 degrees
        r.h_hi = 5;    // 10 degrees
        CHECK(color_filter(f, r).count_foreground() == 12);

        // Green (120 degrees) is outside the wrapped interval.
        for (int i = 0; i < 12; ++i) {
            f.data[i * 3 + 0] = 0;
            f.data[i * 3 + 1] = 255;
            f.data[i * 3 + 2] = 0;
        }
        CHECK(color_filter(f, r).count_foreground() == 0);
    }
    SUBCASE("grayscale input rejected") {
        CHECK_THROWS(color_filter(Frame::gray(4, 3), ColorRange{}));
    }
    SUBCASE("quantized hue agrees with the reference conversion") {
        rng::Rng rng(11);
        for (int i = 0; i < 200; ++i) {
            const auto r8 = static_cast<std::uint8_t>(rng.index(256));
            const auto g8 = static_cast<std::uint8_t>(rng.index(256));
            const auto b8 = static_cast<std::uint8_t>(rng.index(256));
            const Hsv got = rgb_to_hsv(r8, g8, b8);
            const oracle::HsvD want = oracle::rgb_to_hsv_ref(r8, g8, b8);
            const double h_exp = std::fmod(want.h / 2.0, 180.0);
            double dh = std::abs(got.h - h_exp);
            dh = std::min(dh, 180.0 - dh);  // circular
            CHECK(dh <= 1.0);
            CHECK(std::abs(got.s - want.s * 255.0) <= 1.5);
            CHECK(std::abs(got.v - want.v * 255.0) <= 0.5);
        }
    }
}

TEST_CASE("gaussian_blur") {
    SUBCASE("uniform image unchanged") {
        const Frame f = Frame::gray(9, 7, 123);
        const Frame out = gaussian_blur(f, 2.0, 2);
        CHECK(out.data == f.data);
    }
    SUBCASE("impulse spreads symmetrically and preserves mass") {
        Frame f = Frame::gray(15, 15, 0);
        f.at(7, 7) = 255;
        const Frame out = gaussian_blur(f, 1.0, 2);
        long mass = 0;
        for (auto v : out.data) mass += v;
        CHECK(std::abs(mass - 255) <= 25);  // +-1 count per touched pixel
        CHECK(out.at(6, 7) == out.at(8, 7));
        CHECK(out.at(7, 6) == out.at(7, 8));
        CHECK(out.at(6, 6) == out.at(8, 8));
        CHECK(out.at(7, 7) > out.at(6, 7));
    }
    SUBCASE("matches the direct 2-D convolution oracle") {
        rng::Rng rng(5);
        const Frame f = random_gray(17, 11, rng);
        const Frame got = gaussian_blur(f, 1.3, 3);
        const Frame want = oracle::blur_direct(f, 1.3, 3);
        for (std::size_t i = 0; i < f.data.size(); ++i)
            CHECK(std::abs(int(got.data[i]) - int(want.data[i])) <= 1);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS(gaussian_blur(Frame::gray(4, 4), 0.0, 2));
        CHECK_THROWS(gaussian_blur(Frame::gray(4, 4), 1.0, 0));
    }
}

TEST_CASE("thresholding") {
    SUBCASE("all-zero image with fixed t=0 is background") {
        CHECK(threshold_fixed(Frame::gray(6, 6, 0), 0).count_foreground() == 0);
    }
    SUBCASE("fixed t=255 is always background") {
        CHECK(threshold_fixed(Frame::gray(6, 6, 255), 255).count_foreground() == 0);
    }
    SUBCASE("otsu separates a bimodal image") {
        Frame f = Frame::gray(10, 10);
        for (int i = 0; i < 100; ++i) f.data[i] = i < 50 ? 10 : 200;
        const int t = otsu_threshold(f);
        CHECK(t >= 10);
        CHECK(t < 200);
        CHECK(t == oracle::otsu_scan(f));
        const BinaryMask m = threshold_otsu(f);
        CHECK(m.count_foreground() == 50);
        for (int i = 50; i < 100; ++i) CHECK(m.bits[i] == 1);
    }
    SUBCASE("otsu equals the exhaustive scan on random images") {
        rng::Rng rng(23);
        for (int it = 0; it < 25; ++it) {
            const Frame f = random_gray(12, 9, rng);
            CHECK(otsu_threshold(f) == oracle::otsu_scan(f));
        }
    }
}

TEST_CASE("morphology") {
    SUBCASE("opening removes an isolated pixel") {
        BinaryMask m(9, 9);
        m.set(4, 4, true);
        CHECK(morphology(m, MorphOp::Open, 1).count_foreground() == 0);
    }
    SUBCASE("closing fills a single-pixel hole") {
        BinaryMask m(11, 11, true);
        m.set(5, 5, false);
        const BinaryMask out = morphology(m, MorphOp::Close, 1);
        CHECK(out.at(5, 5));
    }
    SUBCASE("matches the set-based oracle and opening is idempotent") {
        rng::Rng rng(31);
        for (int it = 0; it < 15; ++it) {
            const BinaryMask m = random_mask(14, 10, 0.45, rng);
            for (int r = 1; r <= 2; ++r) {
                CHECK(erode(m, r) == oracle::erode_set(m, r));
                CHECK(dilate(m, r) == oracle::dilate_set(m, r));
                const BinaryMask opened = morphology(m, MorphOp::Open, r);
                CHECK(morphology(opened, MorphOp::Open, r) == opened);
            }
        }
    }
    SUBCASE("opening never adds, closing never removes interior foreground") {
        rng::Rng rng(37);
        for (int it = 0; it < 10; ++it) {
            // Interior-supported mask: the border rule treats out-of-image as
            // background, so extensivity is only promised away from the edge.
            BinaryMask m(16, 16);
            for (int y = 2; y < 14; ++y)
                for (int x = 2; x < 14; ++x) m.set(x, y, rng.uniform() < 0.6);
            const BinaryMask opened = morphology(m, MorphOp::Open, 1);
            const BinaryMask closed = morphology(m, MorphOp::Close, 1);
            for (std::size_t i = 0; i < m.bits.size(); ++i) {
                CHECK(opened.bits[i] <= m.bits[i]);
                CHECK(closed.bits[i] >= m.bits[i]);
            }
        }
    }
}

TEST_CASE("per-pixel maps commute with tile permutation") {
    // color_filter and subtract_background act pixelwise: swapping two tiles
    // of the input swaps the corresponding tiles of the output.
    rng::Rng rng(41);
    Frame f = Frame::rgb(8, 4);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(rng.index(256));

    Frame swapped = f;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            for (int c = 0; c < 3; ++c)
                std::swap(swapped.at(x, y, c), swapped.at(x + 4, y, c));

    ColorRange range;
    range.h_lo = 160;
    range.h_hi = 20;
    range.s_lo = 40;
    const BinaryMask a = color_filter(f, range);
    const BinaryMask b = color_filter(swapped, range);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            CHECK(a.at(x, y) == b.at(x + 4, y));
            CHECK(a.at(x + 4, y) == b.at(x, y));
        }
}

TEST_CASE("preprocess chain keeps dimensions") {
    rng::Rng rng(43);
    const Frame f = random_gray(32, 24, rng);
    PreprocessConfig cfg;
    const BinaryMask m = preprocess(f, cfg);
    CHECK(m.width == 32);
    CHECK(m.height == 24);
}
