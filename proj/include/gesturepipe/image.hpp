#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gp {

/// Error opening/reading/writing files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration, bindings or model/descriptor mismatch.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit raster image, row-major, 1 (grayscale) or 3 (RGB) channels.
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    Frame() = default;
    Frame(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    static Frame gray(int w, int h, std::uint8_t fill = 0) { return Frame(w, h, 1, fill); }
    static Frame rgb(int w, int h, std::uint8_t fill = 0) { return Frame(w, h, 3, fill); }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool same_size(const Frame& o) const { return width == o.width && height == o.height; }
};

/// Boolean foreground grid. Stored as one byte per pixel, strictly 0 or 1.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    /// Out-of-bounds reads count as background.
    bool at_clamped(int x, int y) const {
        if (x < 0 || y < 0 || x >= width || y >= height) return false;
        return at(x, y);
    }
    std::size_t count_foreground() const;
    bool operator==(const BinaryMask&) const = default;
};

/// Rec.601 integer luma; identity on grayscale frames.
Frame to_gray(const Frame& frame);

// Binary netpbm, maxval 255. P5 = grayscale, P6 = RGB.
Frame load_netpbm(const std::string& path);
void save_netpbm(const Frame& frame, const std::string& path);

// Masks are serialized as P5 with values 0/255; loading treats >127 as foreground.
BinaryMask load_mask(const std::string& path);
void save_mask(const BinaryMask& mask, const std::string& path);

Frame mask_to_frame(const BinaryMask& mask);  // 0/255 grayscale
BinaryMask frame_to_mask(const Frame& frame); // grayscale >127

}  // namespace gp
