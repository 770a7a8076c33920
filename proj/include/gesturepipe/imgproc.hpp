#pragma once

#include "gesturepipe/image.hpp"

namespace gp::imgproc {

// HSV quantized OpenCV-style: h in [0,180), s and v in [0,255].
inline constexpr int kHuePeriod = 180;

struct Hsv {
    std::uint8_t h = 0;
    std::uint8_t s = 0;
    std::uint8_t v = 0;
};

/// Hexcone RGB -> HSV, 8-bit quantized.
Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Componentwise bounds; the hue interval wraps when h_lo > h_hi.
struct ColorRange {
    std::uint8_t h_lo = 0, h_hi = kHuePeriod - 1;
    std::uint8_t s_lo = 0, s_hi = 255;
    std::uint8_t v_lo = 0, v_hi = 255;

    bool contains(const Hsv& c) const {
        const bool hue_ok = h_lo <= h_hi ? (c.h >= h_lo && c.h <= h_hi)
                                         : (c.h >= h_lo || c.h <= h_hi);
        return hue_ok && c.s >= s_lo && c.s <= s_hi && c.v >= v_lo && c.v <= v_hi;
    }
};

struct BackgroundModel {
    Frame reference;         // grayscale
    int diff_threshold = 30; // strict >
};

/// Foreground where |gray(frame) - gray(reference)| > diff_threshold.
BinaryMask subtract_background(const Frame& frame, const BackgroundModel& model);

/// Foreground where the pixel's HSV triple lies within the range. Requires 3 channels.
BinaryMask color_filter(const Frame& frame, const ColorRange& range);

/// Separable convolution with a normalized sampled Gaussian; borders replicate.
Frame gaussian_blur(const Frame& frame, double sigma, int radius);

/// Foreground where intensity > t. Grayscale input only.
BinaryMask threshold_fixed(const Frame& frame, int t);

/// Threshold maximizing between-class variance; ties broken by the smallest t.
int otsu_threshold(const Frame& frame);
BinaryMask threshold_otsu(const Frame& frame);

enum class MorphOp { Open, Close };

// Square structuring element of side 2r+1. Out-of-bounds pixels count as
// background for erosion and dilation alike.
BinaryMask erode(const BinaryMask& mask, int kernel_radius);
BinaryMask dilate(const BinaryMask& mask, int kernel_radius);
BinaryMask morphology(const BinaryMask& mask, MorphOp op, int kernel_radius);

struct PreprocessConfig {
    bool background_enabled = false;
    BackgroundModel background;
    bool color_enabled = false;
    ColorRange color;
    double blur_sigma = 2.0;
    int blur_radius = 2;
    bool use_otsu = true;
    int fixed_threshold = 127;
    int open_radius = 1;
    int close_radius = 2;
};

/// Full chain: (background subtraction AND color filter when enabled, else
/// grayscale) -> blur -> threshold -> open -> close.
BinaryMask preprocess(const Frame& frame, const PreprocessConfig& cfg);

}  // namespace gp::imgproc
