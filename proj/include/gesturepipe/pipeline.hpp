#pragma once

#include <optional>

#include "gesturepipe/cnn.hpp"
#include "gesturepipe/config.hpp"
#include "gesturepipe/events.hpp"

namespace gp::pipeline {

/// Everything produced for one frame of the loop.
struct FrameEvent {
    long frame = 0;
    int gesture = respond::kNoHand;
    std::string gesture_name;  // empty when no hand detected
    double confidence = 0.0;   // classifier probability of the argmax class
    std::optional<track::Vec2> raw;       // tracked point, camera px
    std::optional<track::Vec2> filtered;  // Kalman output
    std::optional<geom::Pt> screen;       // mapped cursor
    std::optional<handgeom::HandObservation> observation;
    std::vector<events::CommandEvent> command_events;
    double latency_ms = 0.0;  // preprocess + geometry + inference + decide
};

/// Sequential per-frame loop: preprocess -> detect -> classify -> track ->
/// decide. Deterministic for identical inputs and config.
class Pipeline {
public:
    Pipeline(const PipelineConfig& cfg, cnn::CnnModel model,
             std::vector<std::string> class_names, const respond::BindingSet& bindings);

    FrameEvent process(const Frame& frame);

    const std::vector<std::string>& class_names() const { return class_names_; }
    const PipelineConfig& config() const { return cfg_; }
    long frames_processed() const { return frame_index_; }

private:
    PipelineConfig cfg_;
    cnn::CnnModel model_;
    std::vector<std::string> class_names_;
    respond::Responder responder_;
    track::PointTracker tracker_;
    geom::Pt cursor_;  // last known screen position; starts at screen center
    long frame_index_ = 0;
};

struct RunOptions {
    std::string frames_dir;
    std::vector<events::EventSink*> sinks;
    std::ostream* warn = nullptr;     // unreadable-frame warnings
    std::ostream* obs_log = nullptr;  // per-frame HandObservation JSON
    std::string track_csv;            // optional trajectory export path
};

struct RunStats {
    long frames = 0;
    long skipped = 0;
    long command_events = 0;
    std::size_t dropped_events = 0;
    double p95_latency_ms = 0.0;
    double mean_latency_ms = 0.0;
};

/// Feeds every numbered netpbm frame in the directory (lexical order) through
/// the pipeline; unreadable frames are skipped with a warning.
RunStats run(Pipeline& pipeline, const RunOptions& options);

/// Class-name sidecar (one name per line) written next to trained models.
std::vector<std::string> load_class_names(const std::string& path);
void save_class_names(const std::vector<std::string>& names, const std::string& path);

struct CalibrateOptions {
    int hue_margin = 5;  // applied to each side; hue is wrap-aware
    int sat_margin = 30;
    int val_margin = 30;
    int diff_threshold = 30;
};

/// Builds a config fragment (background reference + padded HSV range covering
/// the patch) from one reference frame. Throws on a patch below 4 px^2.
std::string calibrate(const std::string& frame_path, const geom::Rect& patch,
                      const CalibrateOptions& options = {});

}  // namespace gp::pipeline
