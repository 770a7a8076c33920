#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "gesturepipe/image.hpp"

namespace gp::respond {

/// Distinguished no-detection label; counts toward the window size and votes
/// for idle.
inline constexpr int kNoHand = -1;

enum class CommandKind { Instant, Durative };

struct CommandBinding {
    std::string gesture;
    std::string command;
    CommandKind kind = CommandKind::Instant;
};

/// Bindings resolved against a class-name list: label index -> command index.
class BindingSet {
public:
    BindingSet() = default;
    BindingSet(const std::vector<CommandBinding>& bindings,
               const std::vector<std::string>& class_names);

    /// Parses lines like "Palm-Tight = mouse.move (durative)"; '#' comments.
    static std::vector<CommandBinding> parse_file(const std::string& path);

    int command_count() const { return static_cast<int>(commands_.size()); }
    const std::string& command_name(int i) const { return commands_[i]; }
    CommandKind command_kind(int i) const { return kinds_[i]; }
    /// Command a gesture label votes for, or -1 (idle vote).
    int command_of_label(int label) const;
    const std::vector<std::string>& class_names() const { return class_names_; }

private:
    std::vector<std::string> class_names_;
    std::vector<int> label_to_command_;
    std::vector<std::string> commands_;
    std::vector<CommandKind> kinds_;
};

struct ResponderConfig {
    int window = 10;   // response period, frames
    double tau = 0.7;  // confirmation threshold
};

struct Decision {
    std::optional<int> command;  // active command index; nullopt = idle
    double confidence = 0.0;
    bool latched = false;  // durative continuation
};

enum class EventType { Activate, Release, Fire };

struct Event {
    EventType type;
    int command;
    double confidence;
};

/// Fraction of window frames whose gesture maps to the command.
double discriminant(const std::deque<int>& window, int command, const BindingSet& bindings);

/// Sequential per-frame state machine over the sliding gesture window. A
/// command confirms when its discriminant reaches tau; durative commands then
/// latch until some other confirmation (including confirmed idleness)
/// replaces them, and instantaneous commands fire edge-triggered, rearming
/// when the window majority moves elsewhere.
class Responder {
public:
    Responder(const BindingSet& bindings, const ResponderConfig& cfg)
        : bindings_(bindings), cfg_(cfg) {}

    std::vector<Event> step(int label);

    const Decision& decision() const { return decision_; }
    const std::deque<int>& window() const { return window_; }
    const BindingSet& bindings() const { return bindings_; }

private:
    BindingSet bindings_;
    ResponderConfig cfg_;
    std::deque<int> window_;
    Decision decision_;
    std::optional<int> latched_;
    std::optional<int> fired_instant_;  // armed again once the majority moves
};

}  // namespace gp::respond
