#pragma once

#include <string>
#include <vector>

#include "gesturepipe/cnn.hpp"

namespace gp::synth {

// Silhouette classes keyed to the geometric signatures the defect model and
// the classifier both read: a palm disk plus k rectangular fingers for
// classes 1..5, and side-notched disks for the last two.
std::vector<std::string> class_names(int count);
int finger_count(int class_id);  // -1 for non-finger classes

struct ShapeJitter {
    double dx = 0.0;       // px
    double dy = 0.0;       // px
    double scale = 1.0;    // multiplier on the palm radius
    double rot_deg = 0.0;  // whole-shape rotation
};

/// Rasterizes the class silhouette centered at (cx, cy), palm radius r, by
/// pixel-center sampling of the continuous shape.
BinaryMask render_silhouette(int class_id, int width, int height, double cx, double cy,
                             double radius, const ShapeJitter& jitter = {});

struct SynthConfig {
    int classes = 8;
    int per_class = 300;
    std::uint64_t seed = 1;
    double jitter_px = 4.0;
    double jitter_scale = 0.10;
    double jitter_rot_deg = 10.0;
    int canvas_side = 64;
};

/// Dataset in memory: rendered large, tight-cropped and normalized onto the
/// canvas like the live pipeline does.
cnn::LabeledDataset make_dataset(const SynthConfig& cfg);

/// Same, written as class directories of P5 files plus manifest.txt.
void write_dataset(const std::string& out_dir, const SynthConfig& cfg);

}  // namespace gp::synth
