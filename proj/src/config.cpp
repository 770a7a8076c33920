#include "gesturepipe/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace gp {

namespace {

int to_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::uint8_t to_u8(const std::string& v, const std::string& key) {
    const int r = to_int(v, key);
    if (r < 0 || r > 255) throw ConfigError(key + " out of byte range: " + v);
    return static_cast<std::uint8_t>(r);
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    PipelineConfig cfg;
    auto& pp = cfg.preprocess;

    const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
        setters = {
            {"pipeline.fps", [&](const std::string& v, const std::string& k) { cfg.fps = to_double(v, k); }},
            {"pipeline.model", [&](const std::string& v, const std::string&) { cfg.model_path = v; }},
            {"pipeline.bindings", [&](const std::string& v, const std::string&) { cfg.bindings_path = v; }},
            {"pipeline.classes", [&](const std::string& v, const std::string&) { cfg.classes_path = v; }},
            {"imgproc.blur_sigma", [&](const std::string& v, const std::string& k) { pp.blur_sigma = to_double(v, k); }},
            {"imgproc.blur_radius", [&](const std::string& v, const std::string& k) { pp.blur_radius = to_int(v, k); }},
            {"imgproc.threshold",
             [&](const std::string& v, const std::string& k) {
                 if (v == "otsu") pp.use_otsu = true;
                 else if (v == "fixed") pp.use_otsu = false;
                 else throw ConfigError(k + " must be 'otsu' or 'fixed'");
             }},
            {"imgproc.fixed_threshold", [&](const std::string& v, const std::string& k) { pp.fixed_threshold = to_int(v, k); }},
            {"imgproc.open_radius", [&](const std::string& v, const std::string& k) { pp.open_radius = to_int(v, k); }},
            {"imgproc.close_radius", [&](const std::string& v, const std::string& k) { pp.close_radius = to_int(v, k); }},
            {"imgproc.background.enabled", [&](const std::string& v, const std::string& k) { pp.background_enabled = to_bool(v, k); }},
            {"imgproc.background.reference", [&](const std::string& v, const std::string&) { cfg.background_reference = v; }},
            {"imgproc.background.diff_threshold", [&](const std::string& v, const std::string& k) { pp.background.diff_threshold = to_int(v, k); }},
            {"imgproc.color.enabled", [&](const std::string& v, const std::string& k) { pp.color_enabled = to_bool(v, k); }},
            {"imgproc.color.h_lo", [&](const std::string& v, const std::string& k) { pp.color.h_lo = to_u8(v, k); }},
            {"imgproc.color.h_hi", [&](const std::string& v, const std::string& k) { pp.color.h_hi = to_u8(v, k); }},
            {"imgproc.color.s_lo", [&](const std::string& v, const std::string& k) { pp.color.s_lo = to_u8(v, k); }},
            {"imgproc.color.s_hi", [&](const std::string& v, const std::string& k) { pp.color.s_hi = to_u8(v, k); }},
            {"imgproc.color.v_lo", [&](const std::string& v, const std::string& k) { pp.color.v_lo = to_u8(v, k); }},
            {"imgproc.color.v_hi", [&](const std::string& v, const std::string& k) { pp.color.v_hi = to_u8(v, k); }},
            {"handgeom.min_area", [&](const std::string& v, const std::string& k) { cfg.handgeom.min_area = to_int(v, k); }},
            {"handgeom.rdp_epsilon_frac", [&](const std::string& v, const std::string& k) { cfg.handgeom.rdp_epsilon_frac = to_double(v, k); }},
            {"handgeom.min_depth_frac", [&](const std::string& v, const std::string& k) { cfg.handgeom.min_depth_frac = to_double(v, k); }},
            {"handgeom.max_angle_deg", [&](const std::string& v, const std::string& k) { cfg.handgeom.max_angle_deg = to_double(v, k); }},
            {"handgeom.merge_radius", [&](const std::string& v, const std::string& k) { cfg.handgeom.merge_radius = to_double(v, k); }},
            {"handgeom.wrist_factor", [&](const std::string& v, const std::string& k) { cfg.handgeom.wrist_factor = to_double(v, k); }},
            {"handgeom.canvas_side", [&](const std::string& v, const std::string& k) { cfg.handgeom.canvas_side = to_int(v, k); }},
            {"kalman.q_pos", [&](const std::string& v, const std::string& k) { cfg.kalman.q_pos = to_double(v, k); }},
            {"kalman.q_vel", [&](const std::string& v, const std::string& k) { cfg.kalman.q_vel = to_double(v, k); }},
            {"kalman.r_meas", [&](const std::string& v, const std::string& k) { cfg.kalman.r_meas = to_double(v, k); }},
            {"kalman.p0", [&](const std::string& v, const std::string& k) { cfg.kalman.p0 = to_double(v, k); }},
            {"kalman.max_coast", [&](const std::string& v, const std::string& k) { cfg.kalman.max_coast = to_int(v, k); }},
            {"responder.window", [&](const std::string& v, const std::string& k) { cfg.responder.window = to_int(v, k); }},
            {"responder.tau", [&](const std::string& v, const std::string& k) { cfg.responder.tau = to_double(v, k); }},
            {"screen.active_x", [&](const std::string& v, const std::string& k) { cfg.screen.active.x = to_int(v, k); }},
            {"screen.active_y", [&](const std::string& v, const std::string& k) { cfg.screen.active.y = to_int(v, k); }},
            {"screen.active_w", [&](const std::string& v, const std::string& k) { cfg.screen.active.w = to_int(v, k); }},
            {"screen.active_h", [&](const std::string& v, const std::string& k) { cfg.screen.active.h = to_int(v, k); }},
            {"screen.width", [&](const std::string& v, const std::string& k) { cfg.screen.screen_w = to_int(v, k); }},
            {"screen.height", [&](const std::string& v, const std::string& k) { cfg.screen.screen_h = to_int(v, k); }},
            {"screen.gain", [&](const std::string& v, const std::string& k) { cfg.screen.gain = to_double(v, k); }},
        };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        const auto from = s.find_first_not_of(" \t\r");
        const auto to = s.find_last_not_of(" \t\r");
        return from == std::string::npos ? std::string{} : s.substr(from, to - from + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        it->second(value, key);
    }

    if (!(cfg.fps > 0.0)) throw ConfigError("pipeline.fps must be positive");
    if (cfg.screen.active.w < 1 || cfg.screen.active.h < 1)
        throw ConfigError("screen active region must be non-degenerate");
    if (!(cfg.screen.gain > 0.0)) throw ConfigError("screen.gain must be positive");
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    PipelineConfig cfg = parse_config(ss.str(), path);

    if (cfg.preprocess.background_enabled) {
        if (cfg.background_reference.empty())
            throw ConfigError("background subtraction enabled without a reference image");
        // Referenced files must exist at load.
        cfg.preprocess.background.reference = to_gray(load_netpbm(cfg.background_reference));
    }
    for (const std::string* p : {&cfg.model_path, &cfg.bindings_path, &cfg.classes_path})
        if (!p->empty() && !std::filesystem::exists(*p))
            throw ConfigError("referenced file does not exist: " + *p);
    return cfg;
}

}  // namespace gp
