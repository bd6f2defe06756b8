#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace evdet {

/// Microseconds. Integer everywhere so long streams never drift.
using Timestamp = std::int64_t;

/// One sensor event: polarity, pixel, time.
struct Event {
    Timestamp t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int8_t p = 1;  ///< +1 brighter, -1 darker

    friend bool operator==(const Event&, const Event&) = default;
};

/// Canonical total order: (t, y, x, p) with -1 before +1.
inline bool event_less(const Event& a, const Event& b) {
    return std::tie(a.t, a.y, a.x, a.p) < std::tie(b.t, b.y, b.x, b.p);
}

struct Geometry {
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
    bool contains(std::uint32_t x, std::uint32_t y) const { return x < width && y < height; }

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// An event stream over [t_start, t_end] on a fixed sensor.
///
/// A stream produced by canonicalize(), slice() or read_events() is
/// canonical: events strictly ordered by event_less, inside the sensor and
/// inside the time range. Operations that need a canonical stream check it
/// and raise NotCanonical otherwise.
struct EventStream {
    Geometry geometry;
    Timestamp t_start = 0;
    Timestamp t_end = 0;
    std::vector<Event> events;

    Timestamp duration() const { return t_end - t_start; }
    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }

    friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Sorts by (t, y, x, p), drops exact duplicates and validates bounds.
/// Throws NegativeDuration if t_end < t_start, OutOfBounds for events
/// outside the sensor or outside [t_start, t_end], and OutOfBounds for a
/// polarity other than +1/-1.
EventStream canonicalize(EventStream stream);

bool is_canonical(const EventStream& stream);

/// Throws NotCanonical unless is_canonical(stream).
void require_canonical(const EventStream& stream);

/// Events with t0 <= t < t1. t1 may be t_end + 1 so the closing tick of the
/// stream is reachable by a half-open window. Throws InvalidRange otherwise.
EventStream slice(const EventStream& stream, Timestamp t0, Timestamp t1);

/// Index range [first, last) of events with t0 <= t < t1 in a canonical stream.
std::pair<std::size_t, std::size_t> time_range(std::span<const Event> events, Timestamp t0,
                                                Timestamp t1);

enum class EventFormat { Text, Binary };

/// .evb -> Binary, anything else -> Text.
EventFormat format_for_path(const std::filesystem::path& path);

/// Looks at the first bytes of the file: `EVT1` magic means Binary.
EventFormat sniff_format(const std::filesystem::path& path);

EventStream read_events(const std::filesystem::path& path, EventFormat format);
void write_events(const EventStream& stream, const std::filesystem::path& path, EventFormat format);
// Format sniffed from the file contents / taken from the extension.
EventStream read_events(const std::filesystem::path& path);
void write_events(const EventStream& stream, const std::filesystem::path& path);

// In-memory codecs behind read_events/write_events.
std::string encode_text(const EventStream& stream);
std::string encode_binary(const EventStream& stream);
EventStream decode_text(std::string_view text);
EventStream decode_binary(std::string_view bytes);

}  // namespace evdet
