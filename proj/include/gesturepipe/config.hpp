#pragma once

#include <string>

#include "gesturepipe/handgeom.hpp"
#include "gesturepipe/imgproc.hpp"
#include "gesturepipe/responder.hpp"
#include "gesturepipe/tracking.hpp"

namespace gp {

/// Everything the frame loop needs, loadable from a flat key=value file with
/// section-prefixed keys (e.g. "kalman.q_pos=0.01", '#' comments).
struct PipelineConfig {
    imgproc::PreprocessConfig preprocess;
    std::string background_reference;  // path; loaded into preprocess at load time
    handgeom::Config handgeom;
    track::KalmanConfig kalman;
    track::ScreenMap screen;
    respond::ResponderConfig responder;
    double fps = 30.0;
    std::string model_path;     // optional; CLI flags override
    std::string bindings_path;
    std::string classes_path;
};

PipelineConfig load_config(const std::string& path);

/// Parses config text from a string (used by tests and calibrate fragments).
PipelineConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace gp
