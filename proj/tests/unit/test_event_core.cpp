#include <doctest.h>

#include <algorithm>
#include <random>

#include "evdet/error.hpp"
#include "evdet/event_core.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace evdet;

namespace {

EventStream make(std::vector<Event> events, std::uint32_t w = 16, std::uint32_t h = 16, Timestamp t0 = 0,
                 Timestamp t1 = 1000) {
    EventStream s;
    s.geometry = {w, h};
    s.t_start = t0;
    s.t_end = t1;
    s.events = std::move(events);
    return s;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an evdet::Error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("canonicalize: empty stream with zero duration is valid") {
    const auto s = canonicalize(make({}, 4, 4, 0, 0));
    CHECK(s.events.empty());
    CHECK(s.duration() == 0);
    CHECK(is_canonical(s));
}

TEST_CASE("canonicalize: two events sort by time") {
    const auto s = canonicalize(make({{5, 1, 1, 1}, {3, 2, 2, -1}}));
    REQUIRE(s.size() == 2);
    CHECK(s.events[0].t == 3);
    CHECK(s.events[1].t == 5);
}

TEST_CASE("canonicalize: simultaneous events order by y, x, then OFF before ON") {
    const auto s = canonicalize(make({{7, 3, 2, 1}, {7, 3, 2, -1}, {7, 1, 2, 1}, {7, 9, 1, 1}}));
    REQUIRE(s.size() == 4);
    CHECK(s.events[0] == Event{7, 9, 1, 1});
    CHECK(s.events[1] == Event{7, 1, 2, 1});
    CHECK(s.events[2] == Event{7, 3, 2, -1});
    CHECK(s.events[3] == Event{7, 3, 2, 1});
}

TEST_CASE("canonicalize: exact duplicates are dropped") {
    const auto s = canonicalize(make({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, -1}}));
    CHECK(s.size() == 2);
}

TEST_CASE("canonicalize: 1000 shuffled events match the insertion-sort oracle") {
    std::mt19937_64 rng(11);
    // Small time range so ties and duplicates actually occur.
    auto s = fixture::random_stream(rng, 1000, 8, 8, 0, 200);
    const auto expected = oracle::naive_sort_unique(s.events);
    std::shuffle(s.events.begin(), s.events.end(), rng);
    const auto c = canonicalize(s);
    CHECK(c.events == expected);
    CHECK(is_canonical(c));
}

TEST_CASE("canonicalize is idempotent") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto once = canonicalize(fixture::random_stream(rng, 500, 5, 7, 10, 90));
        CHECK(canonicalize(once) == once);
    }
}

TEST_CASE("canonicalize: errors") {
    CHECK(kind_of([] { canonicalize(make({{1, 16, 0, 1}})); }) == ErrorKind::OutOfBounds);
    CHECK(kind_of([] { canonicalize(make({{1, 0, 16, 1}})); }) == ErrorKind::OutOfBounds);
    CHECK(kind_of([] { canonicalize(make({{1001, 0, 0, 1}})); }) == ErrorKind::OutOfBounds);
    CHECK(kind_of([] { canonicalize(make({{1, 0, 0, 0}})); }) == ErrorKind::OutOfBounds);
    CHECK(kind_of([] { canonicalize(make({}, 4, 4, 10, 5)); }) == ErrorKind::NegativeDuration);
}

TEST_CASE("slice: half-open windows") {
    const auto s = canonicalize(make({{0, 0, 0, 1}, {10, 0, 0, 1}, {20, 0, 0, -1}, {1000, 1, 1, 1}}));
    CHECK(slice(s, 10, 10).empty());
    const auto mid = slice(s, 10, 20);
    REQUIRE(mid.size() == 1);
    CHECK(mid.events[0].t == 10);
    CHECK(mid.t_start == 10);
    CHECK(mid.t_end == 20);
    CHECK(mid.geometry == s.geometry);
    // One tick past the end reaches the closing event.
    CHECK(slice(s, s.t_start, s.t_end + 1).events == s.events);
}

TEST_CASE("slice: invalid ranges") {
    const auto s = canonicalize(make({}, 4, 4, 100, 200));
    CHECK(kind_of([&] { slice(s, 150, 120); }) == ErrorKind::InvalidRange);
    CHECK(kind_of([&] { slice(s, 99, 120); }) == ErrorKind::InvalidRange);
    CHECK(kind_of([&] { slice(s, 120, 202); }) == ErrorKind::InvalidRange);
}

TEST_CASE("slice: 10k events agree with a linear-scan filter") {
    std::mt19937_64 rng(5);
    const auto s = canonicalize(fixture::random_stream(rng, 10000, 32, 32, 0, 1'000'000));
    std::uniform_int_distribution<Timestamp> t(0, 1'000'001);
    for (int i = 0; i < 50; ++i) {
        Timestamp a = t(rng), b = t(rng);
        if (a > b) std::swap(a, b);
        a = std::min<Timestamp>(a, 1'000'000);
        CHECK(slice(s, a, b).events == oracle::linear_slice(s.events, a, b));
    }
}

TEST_CASE("slice partition: concatenated windows reproduce the stream") {
    std::mt19937_64 rng(8);
    const auto s = canonicalize(fixture::random_stream(rng, 3000, 10, 10, 500, 9500));
    std::uniform_int_distribution<Timestamp> cut(s.t_start, s.t_end);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Timestamp> cuts{s.t_start, s.t_end + 1};
        for (int k = 0; k < 7; ++k) cuts.push_back(cut(rng));
        std::sort(cuts.begin(), cuts.end());
        EventStream joined = make({}, 10, 10, s.t_start, s.t_end);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const auto part = slice(s, cuts[k], cuts[k + 1]);
            joined.events.insert(joined.events.end(), part.events.begin(), part.events.end());
        }
        CHECK(canonicalize(joined) == s);
    }
}

TEST_CASE("text format: header and single line map field by field") {
    const auto s = decode_text("# EVT 20 10 0 5000\n1000 12 7 -1\n");
    CHECK(s.geometry == Geometry{20, 10});
    CHECK(s.t_end == 5000);
    REQUIRE(s.size() == 1);
    CHECK(s.events[0] == Event{1000, 12, 7, -1});
}

TEST_CASE("text format: empty stream round trip") {
    const auto s = canonicalize(make({}, 3, 2, 5, 9));
    const std::string text = encode_text(s);
    CHECK(text == "# EVT 3 2 5 9\n");
    CHECK(decode_text(text) == s);
}

TEST_CASE("text format: errors carry line numbers") {
    try {
        decode_text("# EVT 4 4 0 10\n1 1 1 1\n2 1 1 0\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(kind_of([] { decode_text("1 1 1 1\n"); }) == ErrorKind::HeaderMismatch);
    CHECK(kind_of([] { decode_text(""); }) == ErrorKind::HeaderMismatch);
    CHECK(kind_of([] { decode_text("# EVT 4 4 0 10\n1  1 1 1\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { decode_text("# EVT 4 4 0 10\n1 9 1 1\n"); }) == ErrorKind::OutOfBounds);
}

TEST_CASE("binary format: layout is bit-exact") {
    const auto s = canonicalize(make({{0x0102, 3, 4, -1}}, 0x10, 0x20, 0, 0x0A0B));
    const std::string b = encode_binary(s);
    REQUIRE(b.size() == 36 + 16);
    CHECK(b.substr(0, 4) == "EVT1");
    CHECK(static_cast<unsigned char>(b[4]) == 0x10);
    CHECK(static_cast<unsigned char>(b[8]) == 0x20);
    CHECK(static_cast<unsigned char>(b[20]) == 0x0B);
    CHECK(static_cast<unsigned char>(b[21]) == 0x0A);
    CHECK(static_cast<unsigned char>(b[28]) == 1);  // count
    CHECK(static_cast<unsigned char>(b[36]) == 0x02);
    CHECK(static_cast<unsigned char>(b[37]) == 0x01);
    CHECK(static_cast<unsigned char>(b[44]) == 3);
    CHECK(static_cast<unsigned char>(b[46]) == 4);
    CHECK(static_cast<unsigned char>(b[48]) == 0xFF);
    CHECK(b.substr(49, 3) == std::string(3, '\0'));
}

TEST_CASE("binary format: header mismatches") {
    const auto s = canonicalize(make({{1, 1, 1, 1}}));
    std::string b = encode_binary(s);
    CHECK(kind_of([&] { decode_binary(b.substr(0, b.size() - 1)); }) == ErrorKind::HeaderMismatch);
    std::string bad_magic = b;
    bad_magic[3] = '2';
    CHECK(kind_of([&] { decode_binary(bad_magic); }) == ErrorKind::HeaderMismatch);
    std::string bad_pad = b;
    bad_pad[51] = 1;
    CHECK(kind_of([&] { decode_binary(bad_pad); }) == ErrorKind::ParseError);
}

TEST_CASE("round trip conserves events in both formats") {
    std::mt19937_64 rng(21);
    const auto s = canonicalize(fixture::random_stream(rng, 5000, 640, 480, 0, 10'000'000));
    CHECK(decode_text(encode_text(s)) == s);
    const std::string bin = encode_binary(s);
    const auto back = decode_binary(bin);
    CHECK(back == s);
    CHECK(oracle::fnv1a(encode_binary(back)) == oracle::fnv1a(bin));
}

TEST_CASE("file I/O and format detection") {
    const auto dir = fixture::scratch_dir("event_core_io");
    std::mt19937_64 rng(2);
    const auto s = canonicalize(fixture::random_stream(rng, 100, 16, 16, 0, 1000));
    write_events(s, dir / "a.evb", format_for_path(dir / "a.evb"));
    write_events(s, dir / "a.evt", format_for_path(dir / "a.evt"));
    CHECK(sniff_format(dir / "a.evb") == EventFormat::Binary);
    CHECK(sniff_format(dir / "a.evt") == EventFormat::Text);
    CHECK(read_events(dir / "a.evb", EventFormat::Binary) == s);
    CHECK(read_events(dir / "a.evt", EventFormat::Text) == s);
    CHECK(kind_of([&] { read_events(dir / "missing.evt", EventFormat::Text); }) == ErrorKind::Io);
}
