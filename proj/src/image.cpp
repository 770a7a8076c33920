#include "gesturepipe/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace gp {

std::size_t BinaryMask::count_foreground() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Frame to_gray(const Frame& frame) {
    if (frame.channels == 1) return frame;
    Frame out = Frame::gray(frame.width, frame.height);
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    for (std::size_t i = 0; i < n; ++i) {
        const int r = frame.data[i * 3 + 0];
        const int g = frame.data[i * 3 + 1];
        const int b = frame.data[i * 3 + 2];
        out.data[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return out;
}

namespace {

// Reads one whitespace-delimited token, skipping '#' comments per the netpbm spec.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int parse_dim(const std::string& tok, const std::string& path) {
    try {
        const int v = std::stoi(tok);
        if (v < 1) throw std::invalid_argument("non-positive");
        return v;
    } catch (const std::exception&) {
        throw IoError("bad netpbm header in " + path);
    }
}

}  // namespace

Frame load_netpbm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    const std::string magic = next_token(in);
    int channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw IoError("unsupported netpbm magic '" + magic + "' in " + path);

    const int w = parse_dim(next_token(in), path);
    const int h = parse_dim(next_token(in), path);
    const int maxval = parse_dim(next_token(in), path);
    if (maxval != 255) throw IoError("unsupported maxval in " + path);

    Frame frame(w, h, channels);
    in.read(reinterpret_cast<char*>(frame.data.data()),
            static_cast<std::streamsize>(frame.data.size()));
    if (static_cast<std::size_t>(in.gcount()) != frame.data.size())
        throw IoError("truncated pixel data in " + path);
    return frame;
}

void save_netpbm(const Frame& frame, const std::string& path) {
    if (frame.channels != 1 && frame.channels != 3)
        throw std::invalid_argument("netpbm supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << (frame.channels == 1 ? "P5" : "P6") << "\n"
        << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data.data()),
              static_cast<std::streamsize>(frame.data.size()));
    if (!out) throw IoError("write failed for " + path);
}

BinaryMask load_mask(const std::string& path) {
    Frame frame = load_netpbm(path);
    if (frame.channels != 1) throw IoError("mask file must be P5: " + path);
    return frame_to_mask(frame);
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    save_netpbm(mask_to_frame(mask), path);
}

Frame mask_to_frame(const BinaryMask& mask) {
    Frame frame = Frame::gray(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        frame.data[i] = mask.bits[i] ? 255 : 0;
    return frame;
}

BinaryMask frame_to_mask(const Frame& frame) {
    const Frame gray = to_gray(frame);
    BinaryMask mask(gray.width, gray.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask.bits[i] = gray.data[i] > 127 ? 1 : 0;
    return mask;
}

}  // namespace gp
