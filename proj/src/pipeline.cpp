#include "gesturepipe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gesturepipe/handgeom.hpp"
#include "gesturepipe/tracking.hpp"

namespace fs = std::filesystem;

namespace gp::pipeline {

Pipeline::Pipeline(const PipelineConfig& cfg, cnn::CnnModel model,
                   std::vector<std::string> class_names, const respond::BindingSet& bindings)
    : cfg_(cfg), model_(std::move(model)), class_names_(std::move(class_names)),
      responder_(bindings, cfg.responder), tracker_(cfg.kalman) {
    if (model_.num_classes != static_cast<int>(class_names_.size()))
        throw ConfigError("model expects " + std::to_string(model_.num_classes) +
                          " classes but " + std::to_string(class_names_.size()) +
                          " class names were given");
    if (cfg_.handgeom.canvas_side != cnn::kInputSide)
        throw ConfigError("handgeom.canvas_side must match the classifier input size");
    cursor_ = track::map_to_screen(
        {cfg_.screen.active.x + cfg_.screen.active.w / 2.0,
         cfg_.screen.active.y + cfg_.screen.active.h / 2.0},
        cfg_.screen);
}

namespace {

const char* type_name(respond::EventType t) {
    switch (t) {
        case respond::EventType::Activate: return "activate";
        case respond::EventType::Release: return "release";
        case respond::EventType::Fire: return "fire";
    }
    return "?";
}

// The gesture to report for a command event: the bound gesture with the most
// window votes, ties to the smallest label.
std::string gesture_for_command(const respond::Responder& responder,
                                const std::vector<std::string>& class_names, int command) {
    const auto& bindings = responder.bindings();
    int best_label = -1;
    int best_votes = -1;
    for (int label = 0; label < static_cast<int>(class_names.size()); ++label) {
        if (bindings.command_of_label(label) != command) continue;
        int votes = 0;
        for (int l : responder.window())
            if (l == label) ++votes;
        if (votes > best_votes) {
            best_votes = votes;
            best_label = label;
        }
    }
    return best_label >= 0 ? class_names[best_label] : std::string{};
}

}  // namespace

FrameEvent Pipeline::process(const Frame& frame) {
    const auto t0 = std::chrono::steady_clock::now();

    FrameEvent out;
    out.frame = frame_index_;

    const BinaryMask mask = imgproc::preprocess(frame, cfg_.preprocess);
    out.observation = handgeom::analyze(mask, cfg_.handgeom);

    int label = respond::kNoHand;
    std::optional<track::Vec2> measurement;
    if (out.observation) {
        const cnn::GestureScores scores = cnn::forward(model_, out.observation->canvas);
        label = scores.label;
        out.gesture = label;
        out.gesture_name = class_names_[label];
        out.confidence = scores.probabilities[label];
        measurement = track::Vec2{static_cast<double>(out.observation->tracked_point.x),
                                  static_cast<double>(out.observation->tracked_point.y)};
        out.raw = measurement;
    }

    if (const auto filtered = tracker_.feed(measurement)) {
        out.filtered = filtered;
        cursor_ = track::map_to_screen(*filtered, cfg_.screen);
        out.screen = cursor_;
    }

    for (const respond::Event& e : responder_.step(label)) {
        events::CommandEvent ce;
        ce.frame = frame_index_;
        ce.type = type_name(e.type);
        ce.command = responder_.bindings().command_name(e.command);
        ce.gesture = gesture_for_command(responder_, class_names_, e.command);
        ce.confidence = e.confidence;
        ce.cursor = cursor_;
        out.command_events.push_back(std::move(ce));
    }

    const auto t1 = std::chrono::steady_clock::now();
    out.latency_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    ++frame_index_;
    return out;
}

RunStats run(Pipeline& pipeline, const RunOptions& options) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(options.frames_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".pgm" || ext == ".ppm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no .pgm/.ppm frames in " + options.frames_dir);

    RunStats stats;
    std::vector<double> latencies;
    std::vector<track::TrackSample> track_samples;
    latencies.reserve(files.size());

    for (const fs::path& file : files) {
        Frame frame;
        try {
            frame = load_netpbm(file.string());
        } catch (const IoError& e) {
            ++stats.skipped;
            if (options.warn) *options.warn << "warning: skipping " << file.string() << ": "
                                            << e.what() << "\n";
            continue;
        }

        FrameEvent ev = pipeline.process(frame);
        ++stats.frames;
        latencies.push_back(ev.latency_ms);
        track_samples.push_back({ev.raw, ev.filtered});

        for (const events::CommandEvent& ce : ev.command_events) {
            ++stats.command_events;
            for (events::EventSink* sink : options.sinks) sink->publish(ce);
        }
        if (options.obs_log && ev.observation)
            *options.obs_log << handgeom::observation_json(*ev.observation, ev.frame) << "\n";
    }

    for (events::EventSink* sink : options.sinks) stats.dropped_events += sink->dropped();

    if (!latencies.empty()) {
        stats.mean_latency_ms = 0.0;
        for (double l : latencies) stats.mean_latency_ms += l;
        stats.mean_latency_ms /= static_cast<double>(latencies.size());
        std::sort(latencies.begin(), latencies.end());
        const std::size_t idx =
            std::min(latencies.size() - 1,
                     static_cast<std::size_t>(std::ceil(0.95 * latencies.size())) - 1);
        stats.p95_latency_ms = latencies[idx];
    }

    if (!options.track_csv.empty())
        track::export_track_csv(track_samples, pipeline.config().screen, options.track_csv);
    return stats;
}

std::vector<std::string> load_class_names(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open class list " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    if (names.empty()) throw ConfigError("class list is empty: " + path);
    return names;
}

void save_class_names(const std::vector<std::string>& names, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write class list " + path);
    for (const std::string& n : names) out << n << "\n";
}

std::string calibrate(const std::string& frame_path, const geom::Rect& patch,
                      const CalibrateOptions& options) {
    const Frame frame = load_netpbm(frame_path);
    if (frame.channels != 3) throw ConfigError("calibration frame must be color (P6)");
    if (patch.w * patch.h < 4) throw std::invalid_argument("degenerate patch (< 4 px^2)");
    if (patch.x < 0 || patch.y < 0 || patch.right() > frame.width ||
        patch.bottom() > frame.height)
        throw std::invalid_argument("patch out of frame bounds");

    std::vector<std::uint8_t> hues;
    int s_min = 255, s_max = 0, v_min = 255, v_max = 0;
    for (int y = patch.y; y < patch.bottom(); ++y)
        for (int x = patch.x; x < patch.right(); ++x) {
            const imgproc::Hsv c =
                imgproc::rgb_to_hsv(frame.at(x, y, 0), frame.at(x, y, 1), frame.at(x, y, 2));
            hues.push_back(c.h);
            s_min = std::min(s_min, int(c.s));
            s_max = std::max(s_max, int(c.s));
            v_min = std::min(v_min, int(c.v));
            v_max = std::max(v_max, int(c.v));
        }

    // Minimal wrap-aware hue cover: the complement of the largest circular gap.
    std::sort(hues.begin(), hues.end());
    hues.erase(std::unique(hues.begin(), hues.end()), hues.end());
    int h_lo = hues.front(), h_hi = hues.back();
    if (hues.size() > 1) {
        int best_gap = imgproc::kHuePeriod - (hues.back() - hues.front());
        for (std::size_t i = 1; i < hues.size(); ++i) {
            const int gap = hues[i] - hues[i - 1];
            if (gap > best_gap) {
                best_gap = gap;
                h_lo = hues[i];
                h_hi = hues[i - 1];
            }
        }
    }

    const int covered = h_lo <= h_hi ? h_hi - h_lo + 1
                                     : imgproc::kHuePeriod - h_lo + h_hi + 1;
    if (covered + 2 * options.hue_margin >= imgproc::kHuePeriod) {
        h_lo = 0;
        h_hi = imgproc::kHuePeriod - 1;
    } else {
        h_lo = (h_lo - options.hue_margin + imgproc::kHuePeriod) % imgproc::kHuePeriod;
        h_hi = (h_hi + options.hue_margin) % imgproc::kHuePeriod;
    }

    std::ostringstream out;
    out << "imgproc.background.enabled=true\n"
        << "imgproc.background.reference=" << frame_path << "\n"
        << "imgproc.background.diff_threshold=" << options.diff_threshold << "\n"
        << "imgproc.color.enabled=true\n"
        << "imgproc.color.h_lo=" << h_lo << "\n"
        << "imgproc.color.h_hi=" << h_hi << "\n"
        << "imgproc.color.s_lo=" << std::max(0, s_min - options.sat_margin) << "\n"
        << "imgproc.color.s_hi=" << std::min(255, s_max + options.sat_margin) << "\n"
        << "imgproc.color.v_lo=" << std::max(0, v_min - options.val_margin) << "\n"
        << "imgproc.color.v_hi=" << std::min(255, v_max + options.val_margin) << "\n";
    return out.str();
}

}  // namespace gp::pipeline
