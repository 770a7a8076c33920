#include "gesturepipe/responder.hpp"

#include <algorithm>
#include <fstream>

namespace gp::respond {

BindingSet::BindingSet(const std::vector<CommandBinding>& bindings,
                       const std::vector<std::string>& class_names)
    : class_names_(class_names), label_to_command_(class_names.size(), -1) {
    for (const CommandBinding& b : bindings) {
        const auto cls = std::find(class_names_.begin(), class_names_.end(), b.gesture);
        if (cls == class_names_.end())
            throw ConfigError("binding references unknown gesture '" + b.gesture + "'");
        const int label = static_cast<int>(cls - class_names_.begin());
        if (label_to_command_[label] != -1)
            throw ConfigError("gesture '" + b.gesture + "' bound more than once");

        int cmd = -1;
        for (std::size_t i = 0; i < commands_.size(); ++i)
            if (commands_[i] == b.command) {
                cmd = static_cast<int>(i);
                break;
            }
        if (cmd < 0) {
            cmd = static_cast<int>(commands_.size());
            commands_.push_back(b.command);
            kinds_.push_back(b.kind);
        } else if (kinds_[cmd] != b.kind) {
            throw ConfigError("command '" + b.command + "' bound with conflicting kinds");
        }
        label_to_command_[label] = cmd;
    }
}

std::vector<CommandBinding> BindingSet::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open bindings file " + path);

    std::vector<CommandBinding> out;
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

        const auto where = "bindings line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'gesture = command (kind)'");
        const std::string gesture = trim(line.substr(0, eq));
        std::string rest = trim(line.substr(eq + 1));

        const auto open = rest.find('(');
        const auto close = rest.find(')', open);
        if (open == std::string::npos || close == std::string::npos)
            throw ConfigError(where + ": missing command kind, expected '(durative)' or '(instant)'");
        const std::string kind_s = trim(rest.substr(open + 1, close - open - 1));
        const std::string command = trim(rest.substr(0, open));
        if (gesture.empty() || command.empty()) throw ConfigError(where + ": empty gesture or command");

        CommandKind kind;
        if (kind_s == "durative") kind = CommandKind::Durative;
        else if (kind_s == "instant") kind = CommandKind::Instant;
        else throw ConfigError(where + ": unknown kind '" + kind_s + "'");
        out.push_back({gesture, command, kind});
    }
    return out;
}

int BindingSet::command_of_label(int label) const {
    if (label < 0 || label >= static_cast<int>(label_to_command_.size())) return -1;
    return label_to_command_[label];
}

double discriminant(const std::deque<int>& window, int command, const BindingSet& bindings) {
    if (window.empty()) throw std::invalid_argument("empty gesture window");
    std::size_t hits = 0;
    for (int label : window)
        if (bindings.command_of_label(label) == command) ++hits;
    return static_cast<double>(hits) / static_cast<double>(window.size());
}

std::vector<Event> Responder::step(int label) {
    window_.push_back(label);
    while (static_cast<int>(window_.size()) > cfg_.window) window_.pop_front();

    const int nc = bindings_.command_count();
    const double n = static_cast<double>(window_.size());
    std::vector<int> votes(nc, 0);
    int idle_votes = 0;
    for (int l : window_) {
        const int c = bindings_.command_of_label(l);
        if (c < 0) ++idle_votes;
        else ++votes[c];
    }

    // argmax over commands; ties keep the currently selected command.
    int best = -1;
    for (int c = 0; c < nc; ++c)
        if (best < 0 || votes[c] > votes[best]) best = c;
    if (decision_.command && best >= 0 && votes[*decision_.command] == votes[best])
        best = *decision_.command;
    const double f_best = best >= 0 ? votes[best] / n : 0.0;
    const double f_idle = idle_votes / n;

    // Rearm edge-triggered commands once the window majority moves elsewhere.
    std::optional<int> majority;
    if (best >= 0 && votes[best] >= idle_votes) majority = best;
    if (fired_instant_ && majority != fired_instant_) fired_instant_.reset();

    std::vector<Event> events;
    auto release_latched = [&] {
        if (!latched_) return;
        events.push_back({EventType::Release, *latched_, votes[*latched_] / n});
        latched_.reset();
    };

    // Confirmation needs a full response period of evidence; a growing
    // startup window would otherwise fire on the very first frame.
    const bool window_full = static_cast<int>(window_.size()) >= cfg_.window;

    if (window_full && best >= 0 && f_best >= cfg_.tau) {
        if (bindings_.command_kind(best) == CommandKind::Durative) {
            if (latched_ != std::optional<int>(best)) {
                release_latched();
                events.push_back({EventType::Activate, best, f_best});
                latched_ = best;
            }
            decision_ = {best, f_best, true};
        } else {
            release_latched();
            if (fired_instant_ != std::optional<int>(best)) {
                events.push_back({EventType::Fire, best, f_best});
                fired_instant_ = best;
            }
            decision_ = {best, f_best, false};
        }
    } else if (window_full && f_idle >= cfg_.tau) {
        // Confirmed absence counts as a new (idle) action and ends held-on
        // commands; mere transients below tau never do.
        release_latched();
        decision_ = {std::nullopt, f_idle, false};
    } else if (latched_) {
        decision_ = {*latched_, votes[*latched_] / n, true};
    } else {
        decision_ = {std::nullopt, f_best, false};
    }
    return events;
}

}  // namespace gp::respond
