#include <charconv>
#include <limits>
#include <string>

#include "byte_io.hpp"
#include "evdet/error.hpp"
#include "evdet/event_core.hpp"
#include "evdet/fileio.hpp"

namespace evdet {

namespace {

constexpr std::string_view kTextMagic = "# EVT";
constexpr std::string_view kBinaryMagic = "EVT1";
constexpr std::size_t kBinaryHeaderSize = 4 + 4 + 4 + 8 + 8 + 8;
constexpr std::size_t kRecordSize = 16;

void append_int(std::string& out, std::int64_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + msg);
}

// Splits `line` on single spaces into exactly `n` decimal integers.
template <std::size_t N>
bool parse_fields(std::string_view line, std::int64_t (&out)[N]) {
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t i = 0; i < N; ++i) {
        if (i > 0) {
            if (p == end || *p != ' ') {
                return false;
            }
            ++p;
        }
        const auto res = std::from_chars(p, end, out[i]);
        if (res.ec != std::errc{} || res.ptr == p) {
            return false;
        }
        p = res.ptr;
    }
    return p == end;
}

}  // namespace

EventFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".evb" ? EventFormat::Binary : EventFormat::Text;
}

EventFormat sniff_format(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    return std::string_view(bytes).starts_with(kBinaryMagic) ? EventFormat::Binary : EventFormat::Text;
}

std::string encode_text(const EventStream& s) {
    std::string out;
    out.reserve(48 + s.events.size() * 20);
    out += kTextMagic;
    out += ' ';
    append_int(out, s.geometry.width);
    out += ' ';
    append_int(out, s.geometry.height);
    out += ' ';
    append_int(out, s.t_start);
    out += ' ';
    append_int(out, s.t_end);
    out += '\n';
    for (const auto& e : s.events) {
        append_int(out, e.t);
        out += ' ';
        append_int(out, e.x);
        out += ' ';
        append_int(out, e.y);
        out += ' ';
        append_int(out, e.p);
        out += '\n';
    }
    return out;
}

std::string encode_binary(const EventStream& s) {
    using detail::put_le;
    std::string out;
    out.reserve(kBinaryHeaderSize + s.events.size() * kRecordSize);
    out += kBinaryMagic;
    put_le<std::uint32_t>(out, s.geometry.width);
    put_le<std::uint32_t>(out, s.geometry.height);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.t_start));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.t_end));
    put_le<std::uint64_t>(out, s.events.size());
    for (const auto& e : s.events) {
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(e.t));
        put_le<std::uint16_t>(out, e.x);
        put_le<std::uint16_t>(out, e.y);
        put_le<std::int8_t>(out, e.p);
        out.append(3, '\0');
    }
    return out;
}

EventStream decode_text(std::string_view text) {
    EventStream s;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        if (!have_header) {
            if (!line.starts_with(kTextMagic) || line.size() < kTextMagic.size() + 1 ||
                line[kTextMagic.size()] != ' ') {
                throw Error(ErrorKind::HeaderMismatch, "line 1: expected '# EVT width height t_start t_end'");
            }
            std::int64_t h[4];
            if (!parse_fields(line.substr(kTextMagic.size() + 1), h) || h[0] < 0 || h[1] < 0 ||
                h[0] > std::numeric_limits<std::uint32_t>::max() || h[1] > std::numeric_limits<std::uint32_t>::max() ||
                h[2] < 0 || h[3] < 0) {
                throw Error(ErrorKind::HeaderMismatch, "line 1: malformed header");
            }
            s.geometry = {static_cast<std::uint32_t>(h[0]), static_cast<std::uint32_t>(h[1])};
            s.t_start = h[2];
            s.t_end = h[3];
            have_header = true;
            continue;
        }

        std::int64_t f[4];
        if (!parse_fields(line, f)) {
            parse_fail(line_no, "expected 't x y p'");
        }
        if (f[0] < 0) {
            parse_fail(line_no, "negative timestamp");
        }
        if (f[1] < 0 || f[1] > 0xFFFF || f[2] < 0 || f[2] > 0xFFFF) {
            parse_fail(line_no, "pixel coordinate out of range");
        }
        if (f[3] != 1 && f[3] != -1) {
            parse_fail(line_no, "polarity must be 1 or -1");
        }
        s.events.push_back({f[0], static_cast<std::uint16_t>(f[1]), static_cast<std::uint16_t>(f[2]),
                            static_cast<std::int8_t>(f[3])});
    }
    if (!have_header) {
        throw Error(ErrorKind::HeaderMismatch, "missing '# EVT' header");
    }
    return canonicalize(std::move(s));
}

EventStream decode_binary(std::string_view bytes) {
    using detail::get_le;
    if (bytes.size() < kBinaryHeaderSize || !bytes.starts_with(kBinaryMagic)) {
        throw Error(ErrorKind::HeaderMismatch, "missing EVT1 magic or truncated header");
    }
    EventStream s;
    s.geometry.width = get_le<std::uint32_t>(bytes, 4);
    s.geometry.height = get_le<std::uint32_t>(bytes, 8);
    const auto t_start = get_le<std::uint64_t>(bytes, 12);
    const auto t_end = get_le<std::uint64_t>(bytes, 20);
    const auto count = get_le<std::uint64_t>(bytes, 28);
    constexpr auto kMaxTime = static_cast<std::uint64_t>(std::numeric_limits<Timestamp>::max());
    if (t_start > kMaxTime || t_end > kMaxTime) {
        throw Error(ErrorKind::HeaderMismatch, "time range exceeds int64");
    }
    if (count > (bytes.size() - kBinaryHeaderSize) / kRecordSize ||
        bytes.size() != kBinaryHeaderSize + count * kRecordSize) {
        throw Error(ErrorKind::HeaderMismatch, "header count " + std::to_string(count) + " does not match " +
                                                   std::to_string(bytes.size()) + " byte payload");
    }
    s.t_start = static_cast<Timestamp>(t_start);
    s.t_end = static_cast<Timestamp>(t_end);
    s.events.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = kBinaryHeaderSize + i * kRecordSize;
        const auto t = get_le<std::uint64_t>(bytes, off);
        auto& e = s.events[i];
        e.x = get_le<std::uint16_t>(bytes, off + 8);
        e.y = get_le<std::uint16_t>(bytes, off + 10);
        e.p = get_le<std::int8_t>(bytes, off + 12);
        if (t > kMaxTime || (e.p != 1 && e.p != -1) || bytes[off + 13] != 0 || bytes[off + 14] != 0 ||
            bytes[off + 15] != 0) {
            throw Error(ErrorKind::ParseError, "record " + std::to_string(i) + ": invalid field");
        }
        e.t = static_cast<Timestamp>(t);
    }
    return canonicalize(std::move(s));
}

EventStream read_events(const std::filesystem::path& path, EventFormat format) {
    const std::string bytes = read_file(path);
    return format == EventFormat::Binary ? decode_binary(bytes) : decode_text(bytes);
}

void write_events(const EventStream& stream, const std::filesystem::path& path, EventFormat format) {
    write_file_atomic(path, format == EventFormat::Binary ? encode_binary(stream) : encode_text(stream));
}

EventStream read_events(const std::filesystem::path& path) {
    return read_events(path, sniff_format(path));
}

void write_events(const EventStream& stream, const std::filesystem::path& path) {
    write_events(stream, path, format_for_path(path));
}

}  // namespace evdet
