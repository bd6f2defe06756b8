#include "evdet/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "evdet/error.hpp"
#include "evdet/fileio.hpp"

namespace fs = std::filesystem;

namespace evdet {

namespace {

class PnmCursor {
public:
    explicit PnmCursor(std::string_view bytes) : bytes_(bytes) {}

    // Header token reader: skips whitespace and '#' comments.
    unsigned next_uint() {
        skip_space();
        unsigned v = 0;
        const auto res = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), v);
        if (res.ec != std::errc{}) {
            throw Error(ErrorKind::ParseError, "pnm: expected integer at byte " + std::to_string(pos_));
        }
        pos_ = static_cast<std::size_t>(res.ptr - bytes_.data());
        return v;
    }

    // Exactly one whitespace byte separates the header from raster data.
    void end_header() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw Error(ErrorKind::ParseError, "pnm: malformed header terminator");
        }
        ++pos_;
    }

    std::string_view rest() const { return bytes_.substr(pos_); }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::uint8_t rescale(unsigned v, unsigned maxval) {
    if (v > maxval) {
        throw Error(ErrorKind::ParseError, "pnm: sample exceeds maxval");
    }
    if (maxval == 255) {
        return static_cast<std::uint8_t>(v);
    }
    return static_cast<std::uint8_t>(std::floor(255.0 * v / maxval + 0.5));
}

}  // namespace

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::floor(y + 0.5), 0.0, 255.0));
}

GrayImage decode_pnm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw Error(ErrorKind::ParseError, "pnm: missing magic");
    }
    const char kind = bytes[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        throw Error(ErrorKind::ParseError, std::string("pnm: unsupported type P") + kind);
    }
    const bool rgb = kind == '3' || kind == '6';
    const bool raw = kind == '5' || kind == '6';

    PnmCursor cur(bytes.substr(2));
    GrayImage img;
    img.width = cur.next_uint();
    img.height = cur.next_uint();
    const unsigned maxval = cur.next_uint();
    if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 65535) {
        throw Error(ErrorKind::ParseError, "pnm: invalid dimensions or maxval");
    }
    const std::size_t n = std::size_t(img.width) * img.height;
    const std::size_t channels = rgb ? 3 : 1;
    std::vector<unsigned> samples(n * channels);

    if (raw) {
        cur.end_header();
        const std::string_view data = cur.rest();
        const std::size_t width = maxval > 255 ? 2 : 1;
        if (data.size() < samples.size() * width) {
            throw Error(ErrorKind::ParseError, "pnm: truncated raster");
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto* p = reinterpret_cast<const unsigned char*>(data.data()) + i * width;
            samples[i] = width == 2 ? (unsigned(p[0]) << 8) | p[1] : p[0];
        }
    } else {
        for (auto& s : samples) {
            s = cur.next_uint();
        }
    }

    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rgb) {
            img.pixels[i] = luma_bt601(rescale(samples[3 * i], maxval), rescale(samples[3 * i + 1], maxval),
                                       rescale(samples[3 * i + 2], maxval));
        } else {
            img.pixels[i] = rescale(samples[i], maxval);
        }
    }
    return img;
}

GrayImage read_pnm(const fs::path& path) {
    try {
        return decode_pnm(read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) {
            throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
        }
        throw;
    }
}

std::string encode_pgm(const GrayImage& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

void write_pgm(const GrayImage& image, const fs::path& path) { write_file_atomic(path, encode_pgm(image)); }

std::string frame_file_name(std::string_view prefix, std::size_t index) {
    char digits[32];
    std::snprintf(digits, sizeof digits, "%06zu", index);
    return std::string(prefix) + "_" + digits + ".pgm";
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw Error(ErrorKind::Io, "not a directory: " + dir.string());
    }
    std::vector<std::tuple<std::uint64_t, std::string, fs::path>> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (!entry.is_regular_file() || (ext != ".pgm" && ext != ".ppm" && ext != ".pnm")) {
            continue;
        }
        const std::string stem = entry.path().stem().string();
        std::uint64_t number = 0;
        auto end = stem.find_last_of("0123456789");
        if (end != std::string::npos) {
            auto begin = end;
            while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) {
                --begin;
            }
            std::from_chars(stem.data() + begin, stem.data() + end + 1, number);
        }
        found.emplace_back(number, entry.path().filename().string(), entry.path());
    }
    std::sort(found.begin(), found.end());
    std::vector<fs::path> out;
    out.reserve(found.size());
    for (auto& f : found) {
        out.push_back(std::move(std::get<2>(f)));
    }
    return out;
}

}  // namespace evdet
