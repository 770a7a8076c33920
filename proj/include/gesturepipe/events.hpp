#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "gesturepipe/geometry.hpp"

namespace gp::events {

/// One emitted command transition. Serialized as a single JSON line with
/// fixed field order: frame, type, command, gesture, confidence, cursor.
struct CommandEvent {
    long frame = 0;
    std::string type;  // "activate" | "release" | "fire"
    std::string command;
    std::string gesture;
    double confidence = 0.0;
    geom::Pt cursor;
};

std::string to_json_line(const CommandEvent& event);

class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void publish(const CommandEvent& event) = 0;
    virtual std::size_t dropped() const { return 0; }
};

/// Newline-delimited JSON onto a stream, flushed per event.
class StreamSink : public EventSink {
public:
    explicit StreamSink(std::ostream& out) : out_(out) {}
    void publish(const CommandEvent& event) override;

private:
    std::ostream& out_;
};

class FileSink : public EventSink {
public:
    explicit FileSink(const std::string& path);
    ~FileSink() override;
    void publish(const CommandEvent& event) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Line-protocol publisher over a plain TCP connection. A refused connection
/// at construction is fatal; mid-run failures trigger bounded reconnect
/// attempts and events are dropped (and counted) while disconnected.
class TcpSink : public EventSink {
public:
    TcpSink(const std::string& host, int port, int reconnect_attempts = 3,
            int backoff_ms = 20);
    ~TcpSink() override;

    void publish(const CommandEvent& event) override;
    std::size_t dropped() const override { return dropped_; }

private:
    bool connect_once();
    void close_fd();

    std::string host_;
    int port_;
    int reconnect_attempts_;
    int backoff_ms_;
    int fd_ = -1;
    std::size_t dropped_ = 0;
};

void publish_events(const std::vector<CommandEvent>& batch, EventSink& sink);

}  // namespace gp::events
