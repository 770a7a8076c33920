#include "gesturepipe/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace gp::imgproc {

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8, g = g8, b = b8;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    double h_deg = 0.0;
    if (delta > 0.0) {
        if (mx == r)
            h_deg = 60.0 * std::fmod((g - b) / delta + 6.0, 6.0);
        else if (mx == g)
            h_deg = 60.0 * ((b - r) / delta + 2.0);
        else
            h_deg = 60.0 * ((r - g) / delta + 4.0);
    }
    Hsv out;
    out.h = static_cast<std::uint8_t>(static_cast<int>(std::lround(h_deg / 2.0)) % kHuePeriod);
    out.s = mx > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * delta / mx)) : 0;
    out.v = static_cast<std::uint8_t>(mx);
    return out;
}

BinaryMask subtract_background(const Frame& frame, const BackgroundModel& model) {
    if (frame.width != model.reference.width || frame.height != model.reference.height)
        throw std::invalid_argument("background reference dimensions mismatch");
    const Frame gray = to_gray(frame);
    const Frame ref = to_gray(model.reference);
    BinaryMask mask(frame.width, frame.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask.bits[i] = std::abs(int(gray.data[i]) - int(ref.data[i])) > model.diff_threshold;
    return mask;
}

BinaryMask color_filter(const Frame& frame, const ColorRange& range) {
    if (frame.channels != 3) throw std::invalid_argument("color_filter needs a 3-channel frame");
    BinaryMask mask(frame.width, frame.height);
    const std::size_t n = mask.bits.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Hsv c = rgb_to_hsv(frame.data[i * 3], frame.data[i * 3 + 1], frame.data[i * 3 + 2]);
        mask.bits[i] = range.contains(c);
    }
    return mask;
}

Frame gaussian_blur(const Frame& frame, double sigma, int radius) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (radius < 1) throw std::invalid_argument("radius must be >= 1");

    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = frame.width, h = frame.height, ch = frame.channels;
    auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

    // Horizontal pass into a double buffer, vertical pass back to 8 bit.
    // Border replication only needs the clamped path near the edges.
    std::vector<double> tmp(frame.data.size());
    const int stride = w * ch;
    for (int y = 0; y < h; ++y)
        for (int c = 0; c < ch; ++c) {
            const std::uint8_t* row = frame.data.data() + static_cast<std::size_t>(y) * stride + c;
            double* dst = tmp.data() + static_cast<std::size_t>(y) * stride + c;
            const int lo = std::min(radius, w), hi = std::max(lo, w - radius);
            for (int x = 0; x < lo; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[k + radius] * row[clamp(x + k, w - 1) * ch];
                dst[x * ch] = acc;
            }
            for (int x = lo; x < hi; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[k + radius] * row[(x + k) * ch];
                dst[x * ch] = acc;
            }
            for (int x = hi; x < w; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[k + radius] * row[clamp(x + k, w - 1) * ch];
                dst[x * ch] = acc;
            }
        }

    Frame out(w, h, ch);
    std::vector<double> acc_row(stride);
    for (int y = 0; y < h; ++y) {
        std::fill(acc_row.begin(), acc_row.end(), 0.0);
        for (int k = -radius; k <= radius; ++k) {
            const int yy = clamp(y + k, h - 1);
            const double kv = kernel[k + radius];
            const double* src = tmp.data() + static_cast<std::size_t>(yy) * stride;
            for (int i = 0; i < stride; ++i) acc_row[i] += kv * src[i];
        }
        std::uint8_t* dst = out.data.data() + static_cast<std::size_t>(y) * stride;
        for (int i = 0; i < stride; ++i) {
            const long v = std::lround(acc_row[i]);
            dst[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
        }
    }
    return out;
}

BinaryMask threshold_fixed(const Frame& frame, int t) {
    if (frame.channels != 1) throw std::invalid_argument("threshold needs a grayscale frame");
    BinaryMask mask(frame.width, frame.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask.bits[i] = frame.data[i] > t;
    return mask;
}

int otsu_threshold(const Frame& frame) {
    if (frame.channels != 1) throw std::invalid_argument("threshold needs a grayscale frame");
    long long hist[256] = {};
    for (std::uint8_t v : frame.data) ++hist[v];
    const long long total = static_cast<long long>(frame.data.size());

    long long sum_all = 0;
    for (int i = 0; i < 256; ++i) sum_all += static_cast<long long>(i) * hist[i];

    // Classes: background <= t, foreground > t.
    int best_t = 0;
    double best_var = -1.0;
    long long w0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += static_cast<long long>(t) * hist[t];
        const long long w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = double(sum0) / double(w0);
        const double mu1 = double(sum_all - sum0) / double(w1);
        const double var = double(w0) * double(w1) * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask threshold_otsu(const Frame& frame) {
    return threshold_fixed(frame, otsu_threshold(frame));
}

namespace {

// The square structuring element separates into a horizontal and a vertical
// min/max pass; out-of-bounds samples count as background in each pass, which
// composes to the same rule over the full square window.
BinaryMask morph_pass(const BinaryMask& mask, int radius, bool is_erode) {
    const int w = mask.width, h = mask.height;
    BinaryMask mid(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = &mask.bits[static_cast<std::size_t>(y) * w];
        std::uint8_t* dst = &mid.bits[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = is_erode ? 1 : 0;
            for (int dx = -radius; dx <= radius; ++dx) {
                const int xx = x + dx;
                const std::uint8_t p = (xx < 0 || xx >= w) ? 0 : row[xx];
                if (is_erode) v &= p;
                else v |= p;
            }
            dst[x] = v;
        }
    }
    for (int y = 0; y < h; ++y) {
        std::uint8_t* dst = &out.bits[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) dst[x] = is_erode ? 1 : 0;
        for (int dy = -radius; dy <= radius; ++dy) {
            const int yy = y + dy;
            if (yy < 0 || yy >= h) {
                if (is_erode) std::fill(dst, dst + w, std::uint8_t{0});
                continue;
            }
            const std::uint8_t* src = &mid.bits[static_cast<std::size_t>(yy) * w];
            if (is_erode)
                for (int x = 0; x < w; ++x) dst[x] &= src[x];
            else
                for (int x = 0; x < w; ++x) dst[x] |= src[x];
        }
    }
    return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int kernel_radius) {
    if (kernel_radius < 1) throw std::invalid_argument("kernel_radius must be >= 1");
    return morph_pass(mask, kernel_radius, true);
}

BinaryMask dilate(const BinaryMask& mask, int kernel_radius) {
    if (kernel_radius < 1) throw std::invalid_argument("kernel_radius must be >= 1");
    return morph_pass(mask, kernel_radius, false);
}

BinaryMask morphology(const BinaryMask& mask, MorphOp op, int kernel_radius) {
    if (op == MorphOp::Open) return dilate(erode(mask, kernel_radius), kernel_radius);
    return erode(dilate(mask, kernel_radius), kernel_radius);
}

BinaryMask preprocess(const Frame& frame, const PreprocessConfig& cfg) {
    Frame stage;
    if (cfg.background_enabled || cfg.color_enabled) {
        BinaryMask combined(frame.width, frame.height, true);
        if (cfg.background_enabled) {
            const BinaryMask bg = subtract_background(frame, cfg.background);
            for (std::size_t i = 0; i < combined.bits.size(); ++i)
                combined.bits[i] &= bg.bits[i];
        }
        if (cfg.color_enabled) {
            const BinaryMask col = color_filter(frame, cfg.color);
            for (std::size_t i = 0; i < combined.bits.size(); ++i)
                combined.bits[i] &= col.bits[i];
        }
        stage = mask_to_frame(combined);
    } else {
        stage = to_gray(frame);
    }
    const Frame blurred = gaussian_blur(stage, cfg.blur_sigma, cfg.blur_radius);
    BinaryMask mask = cfg.use_otsu ? threshold_otsu(blurred)
                                   : threshold_fixed(blurred, cfg.fixed_threshold);
    if (cfg.open_radius > 0) mask = morphology(mask, MorphOp::Open, cfg.open_radius);
    if (cfg.close_radius > 0) mask = morphology(mask, MorphOp::Close, cfg.close_radius);
    return mask;
}

}  // namespace gp::imgproc
