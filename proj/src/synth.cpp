#include "gesturepipe/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gesturepipe/handgeom.hpp"
#include "gesturepipe/rng.hpp"

namespace fs = std::filesystem;

namespace gp::synth {

namespace {

const std::vector<std::string> kAllClasses = {"Fist", "One",  "V",         "W",
                                              "Four", "Palm", "Palm-Left", "Palm-Right"};

// Finger band as a fraction of the palm radius. The fan and width are tuned
// so that between-finger valleys validate as defects while the shoulders
// where the outer fingers meet the palm do not.
constexpr double kFingerInner = 0.70;
constexpr double kFingerOuter = 2.05;
constexpr double kFingerCap = 1.80;  // pointed cap start, so RDP leaves one apex per tip
constexpr double kFingerHalfWidth = 0.16;
constexpr double kFanStepDeg = 26.0;

constexpr double kNotchInner = 0.45;
constexpr double kNotchHalfWidth = 0.30;

}  // namespace

std::vector<std::string> class_names(int count) {
    if (count < 2 || count > static_cast<int>(kAllClasses.size()))
        throw std::invalid_argument("class count must be in [2, 8]");
    return {kAllClasses.begin(), kAllClasses.begin() + count};
}

int finger_count(int class_id) {
    if (class_id >= 1 && class_id <= 5) return class_id;
    return class_id == 0 ? 0 : -1;
}

BinaryMask render_silhouette(int class_id, int width, int height, double cx, double cy,
                             double radius, const ShapeJitter& jitter) {
    if (class_id < 0 || class_id >= static_cast<int>(kAllClasses.size()))
        throw std::invalid_argument("unknown silhouette class");

    const double r = radius * jitter.scale;
    const double phi = jitter.rot_deg * std::numbers::pi / 180.0;
    const double cos_phi = std::cos(phi), sin_phi = std::sin(phi);
    const double ox = cx + jitter.dx, oy = cy + jitter.dy;

    const int fingers = class_id >= 1 && class_id <= 5 ? class_id : 0;
    std::vector<double> angles;  // from vertical, radians
    for (int i = 0; i < fingers; ++i)
        angles.push_back((i - (fingers - 1) / 2.0) * kFanStepDeg * std::numbers::pi / 180.0);

    const int notch = class_id == 6 ? -1 : (class_id == 7 ? 1 : 0);

    BinaryMask mask(width, height);
    for (int py = 0; py < height; ++py)
        for (int px = 0; px < width; ++px) {
            // Undo translation and rotation to sample in shape space.
            const double tx = px - ox, ty = py - oy;
            const double x = tx * cos_phi + ty * sin_phi;
            const double y = -tx * sin_phi + ty * cos_phi;

            bool inside = x * x + y * y <= r * r;
            if (inside && notch != 0) {
                const double s = notch * x;  // toward the notched side
                if (s >= kNotchInner * r && std::abs(y) <= kNotchHalfWidth * r) inside = false;
            }
            if (!inside)
                for (double a : angles) {
                    const double lx = std::sin(a), ly = -std::cos(a);  // finger axis, up
                    const double t = x * lx + y * ly;
                    const double s = x * ly - y * lx;
                    if (t < kFingerInner * r || t > kFingerOuter * r) continue;
                    double half = kFingerHalfWidth * r;
                    if (t > kFingerCap * r)
                        half *= (kFingerOuter * r - t) / ((kFingerOuter - kFingerCap) * r);
                    if (std::abs(s) <= half) {
                        inside = true;
                        break;
                    }
                }
            if (inside) mask.set(px, py, true);
        }
    return mask;
}

namespace {

BinaryMask tight_crop(const BinaryMask& mask) {
    int min_x = mask.width, max_x = -1, min_y = mask.height, max_y = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x < 0) return BinaryMask{};
    BinaryMask out(max_x - min_x + 1, max_y - min_y + 1);
    for (int y = min_y; y <= max_y; ++y)
        for (int x = min_x; x <= max_x; ++x) out.set(x - min_x, y - min_y, mask.at(x, y));
    return out;
}

BinaryMask render_sample(int class_id, rng::Rng& rng, const SynthConfig& cfg) {
    const int side = 160;
    const double base_radius = 34.0;
    ShapeJitter j;
    j.dx = rng.uniform(-cfg.jitter_px, cfg.jitter_px);
    j.dy = rng.uniform(-cfg.jitter_px, cfg.jitter_px);
    j.scale = 1.0 + rng.uniform(-cfg.jitter_scale, cfg.jitter_scale);
    j.rot_deg = rng.uniform(-cfg.jitter_rot_deg, cfg.jitter_rot_deg);
    const BinaryMask big =
        render_silhouette(class_id, side, side, side / 2.0, side * 0.62, base_radius, j);
    return handgeom::normalize_canvas(tight_crop(big), cfg.canvas_side);
}

}  // namespace

cnn::LabeledDataset make_dataset(const SynthConfig& cfg) {
    cnn::LabeledDataset ds;
    ds.class_names = class_names(cfg.classes);
    rng::Rng rng(cfg.seed);
    for (int c = 0; c < cfg.classes; ++c)
        for (int i = 0; i < cfg.per_class; ++i) {
            ds.masks.push_back(render_sample(c, rng, cfg));
            ds.labels.push_back(c);
        }
    return ds;
}

void write_dataset(const std::string& out_dir, const SynthConfig& cfg) {
    const cnn::LabeledDataset ds = make_dataset(cfg);
    const fs::path root(out_dir);
    fs::create_directories(root);

    std::ofstream manifest(root / "manifest.txt");
    if (!manifest) throw IoError("cannot write manifest in " + out_dir);
    for (const std::string& name : ds.class_names) manifest << name << "\n";
    manifest.close();

    std::vector<int> counter(ds.class_names.size(), 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int c = ds.labels[i];
        const fs::path dir = root / ds.class_names[c];
        fs::create_directories(dir);
        char name[32];
        std::snprintf(name, sizeof(name), "%05d.pgm", counter[c]++);
        save_mask(ds.masks[i], (dir / name).string());
    }
}

}  // namespace gp::synth
