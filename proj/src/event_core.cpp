#include "evdet/event_core.hpp"

#include <algorithm>
#include <string>

#include "evdet/error.hpp"

namespace evdet {

namespace {

std::string describe(const Event& e) {
    return "event(t=" + std::to_string(e.t) + ", x=" + std::to_string(e.x) +
           ", y=" + std::to_string(e.y) + ", p=" + std::to_string(e.p) + ")";
}

void check_event(const EventStream& s, const Event& e) {
    if (!s.geometry.contains(e.x, e.y)) {
        throw Error(ErrorKind::OutOfBounds, describe(e) + " outside " +
                                                std::to_string(s.geometry.width) + "x" +
                                                std::to_string(s.geometry.height));
    }
    if (e.t < s.t_start || e.t > s.t_end) {
        throw Error(ErrorKind::OutOfBounds, describe(e) + " outside [" + std::to_string(s.t_start) +
                                                ", " + std::to_string(s.t_end) + "]");
    }
    if (e.p != 1 && e.p != -1) {
        throw Error(ErrorKind::OutOfBounds, describe(e) + " has invalid polarity");
    }
}

}  // namespace

EventStream canonicalize(EventStream stream) {
    if (stream.t_end < stream.t_start) {
        throw Error(ErrorKind::NegativeDuration,
                    "t_end " + std::to_string(stream.t_end) + " < t_start " + std::to_string(stream.t_start));
    }
    for (const auto& e : stream.events) {
        check_event(stream, e);
    }
    auto& ev = stream.events;
    if (!std::is_sorted(ev.begin(), ev.end(), event_less)) {
        std::stable_sort(ev.begin(), ev.end(), event_less);
    }
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    return stream;
}

bool is_canonical(const EventStream& s) {
    if (s.t_end < s.t_start) {
        return false;
    }
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        if (!s.geometry.contains(e.x, e.y) || e.t < s.t_start || e.t > s.t_end || (e.p != 1 && e.p != -1)) {
            return false;
        }
        if (i > 0 && !event_less(s.events[i - 1], e)) {
            return false;
        }
    }
    return true;
}

void require_canonical(const EventStream& stream) {
    if (!is_canonical(stream)) {
        throw Error(ErrorKind::NotCanonical, "event stream must be canonicalized first");
    }
}

std::pair<std::size_t, std::size_t> time_range(std::span<const Event> events, Timestamp t0, Timestamp t1) {
    const auto by_time = [](const Event& e, Timestamp t) { return e.t < t; };
    const auto first = std::lower_bound(events.begin(), events.end(), t0, by_time);
    const auto last = std::lower_bound(first, events.end(), t1, by_time);
    return {static_cast<std::size_t>(first - events.begin()), static_cast<std::size_t>(last - events.begin())};
}

EventStream slice(const EventStream& stream, Timestamp t0, Timestamp t1) {
    if (t0 > t1 || t0 < stream.t_start || t1 > stream.t_end + 1) {
        throw Error(ErrorKind::InvalidRange, "slice [" + std::to_string(t0) + ", " + std::to_string(t1) +
                                                 ") outside stream [" + std::to_string(stream.t_start) + ", " +
                                                 std::to_string(stream.t_end) + "]");
    }
    const auto [first, last] = time_range(stream.events, t0, t1);
    EventStream out;
    out.geometry = stream.geometry;
    out.t_start = t0;
    out.t_end = t1;
    out.events.assign(stream.events.begin() + static_cast<std::ptrdiff_t>(first),
                      stream.events.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

}  // namespace evdet
