#include "gesturepipe/events.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <thread>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "gesturepipe/image.hpp"

namespace gp::events {

std::string to_json_line(const CommandEvent& event) {
    nlohmann::ordered_json j;
    j["frame"] = event.frame;
    j["type"] = event.type;
    j["command"] = event.command;
    j["gesture"] = event.gesture;
    j["confidence"] = event.confidence;
    j["cursor"] = nlohmann::ordered_json{{"x", event.cursor.x}, {"y", event.cursor.y}};
    return j.dump();
}

void StreamSink::publish(const CommandEvent& event) {
    out_ << to_json_line(event) << '\n';
    out_.flush();
}

struct FileSink::Impl {
    std::ofstream out;
};

FileSink::FileSink(const std::string& path) : impl_(std::make_unique<Impl>()) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) throw IoError("cannot write event log " + path);
}

FileSink::~FileSink() = default;

void FileSink::publish(const CommandEvent& event) {
    impl_->out << to_json_line(event) << '\n';
    impl_->out.flush();
}

TcpSink::TcpSink(const std::string& host, int port, int reconnect_attempts, int backoff_ms)
    : host_(host), port_(port), reconnect_attempts_(reconnect_attempts),
      backoff_ms_(backoff_ms) {
    if (!connect_once())
        throw IoError("cannot connect to " + host + ":" + std::to_string(port));
}

TcpSink::~TcpSink() { close_fd(); }

bool TcpSink::connect_once() {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port_s = std::to_string(port_);
    if (getaddrinfo(host_.c_str(), port_s.c_str(), &hints, &res) != 0) return false;

    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) return false;
    fd_ = fd;
    return true;
}

void TcpSink::close_fd() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void TcpSink::publish(const CommandEvent& event) {
    const std::string line = to_json_line(event) + "\n";

    auto try_send = [&]() -> bool {
        if (fd_ < 0) return false;
        std::size_t sent = 0;
        while (sent < line.size()) {
            const ssize_t n =
                ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) return false;
            sent += static_cast<std::size_t>(n);
        }
        return true;
    };

    if (try_send()) return;

    close_fd();
    for (int attempt = 0; attempt < reconnect_attempts_; ++attempt) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms_ * (attempt + 1)));
        if (connect_once()) {
            if (try_send()) return;
            close_fd();
        }
    }
    ++dropped_;
}

void publish_events(const std::vector<CommandEvent>& batch, EventSink& sink) {
    for (const CommandEvent& e : batch) sink.publish(e);
}

}  // namespace gp::events
