#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "evdet/error.hpp"
#include "evdet/parallel.hpp"
#include "evdet/representations.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace evdet;

namespace {

EventStream stream_of(std::vector<Event> events, Timestamp t_start, Timestamp t_end, std::uint32_t w = 8,
                      std::uint32_t h = 6) {
    EventStream s;
    s.geometry = {w, h};
    s.t_start = t_start;
    s.t_end = t_end;
    s.events = std::move(events);
    return canonicalize(std::move(s));
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("bin grid: count is ceil(T / w) with a partial last bin") {
    auto g = BinGrid::make(0, 1'000'000, 100'000);
    CHECK(g.count == 10);
    CHECK_FALSE(g.is_partial(9));
    g = BinGrid::make(0, 1'000'001, 100'000);
    CHECK(g.count == 11);
    CHECK(g.is_partial(10));
    CHECK(g.bin_end(10) == 1'000'001);
    g = BinGrid::make(500, 500, 7);
    CHECK(g.count == 1);
    CHECK(g.bin_of(500) == 0);
    CHECK(g.bin_of(499) == g.count);
    CHECK(kind_of([] { BinGrid::make(0, 10, 0); }) == ErrorKind::ZeroWindow);
    CHECK(kind_of([] { BinGrid::make(10, 0, 5); }) == ErrorKind::NegativeDuration);
}

TEST_CASE("bin grid: boundary maps to the later bin, t_end to the last") {
    const auto g = BinGrid::make(0, 300, 100);
    CHECK(g.bin_of(99) == 0);
    CHECK(g.bin_of(100) == 1);
    CHECK(g.bin_of(300) == 2);
    CHECK(g.bin_of(301) == g.count);
}

TEST_CASE("ecm: empty one-second stream with 100 ms bins") {
    const auto s = stream_of({}, 0, 1'000'000);
    const auto seq = build_ecm(s, 100'000);
    REQUIRE(seq.size() == 10);
    for (const auto& b : seq.bins) {
        for (auto v : b.raw) CHECK(v == 0);
        for (auto g : b.gray) CHECK(g == 128);
    }
    const auto count = build_ecm(s, 100'000, EcmMode::Count);
    for (const auto& b : count.bins)
        for (auto g : b.gray) CHECK(g == 0);
}

TEST_CASE("ecm: three events at one pixel") {
    const auto s = stream_of({{10, 2, 3, 1}, {20, 2, 3, 1}, {30, 2, 3, -1}}, 0, 100);
    CHECK(build_ecm(s, 100).bins[0].raw_at(2, 3) == 1);
    CHECK(build_ecm(s, 100, EcmMode::Count).bins[0].raw_at(2, 3) == 3);
    const auto two = build_ecm(s, 100, EcmMode::TwoChannel);
    CHECK(two.bins[0].channels == 2);
    CHECK(two.bins[0].raw_at(2, 3, 0) == 2);
    CHECK(two.bins[0].raw_at(2, 3, 1) == 1);
}

TEST_CASE("ecm: 10k random events match brute-force bin membership") {
    std::mt19937_64 rng(21);
    for (Timestamp window : {Timestamp(97), Timestamp(777), Timestamp(10'000), Timestamp(2'000'000)}) {
        const auto s = canonicalize(fixture::random_stream(rng, 10'000, 16, 12, 0, 123'457));
        for (bool signed_mode : {true, false}) {
            const auto seq = build_ecm(s, window, signed_mode ? EcmMode::Signed : EcmMode::Count);
            const auto oracle = oracle::brute_force_ecm(s, window, signed_mode);
            REQUIRE(seq.size() == oracle.size());
            for (std::size_t b = 0; b < seq.size(); ++b)
                for (std::size_t i = 0; i < oracle[b].size(); ++i) REQUIRE(seq.bins[b].raw[i] == oracle[b][i]);
        }
    }
}

TEST_CASE("ecm: count conservation and polarity balance") {
    std::mt19937_64 rng(8);
    const auto s = canonicalize(fixture::random_stream(rng, 5'000, 20, 20, 100, 99'999));
    const auto count = build_ecm(s, 3'000, EcmMode::Count);
    const auto sig = build_ecm(s, 3'000, EcmMode::Signed);
    std::int64_t total = 0;
    std::uint64_t reported = 0;
    for (std::size_t b = 0; b < count.size(); ++b) {
        std::int64_t abs_sum = 0, sum = 0, expected = 0;
        for (auto v : count.bins[b].raw) total += v;
        for (auto v : sig.bins[b].raw) {
            abs_sum += std::abs(v);
            sum += v;
        }
        for (const auto& e : s.events)
            if (count.grid.bin_of(e.t) == b) expected += e.p;
        CHECK(sum == expected);
        CHECK(abs_sum <= std::int64_t(count.bins[b].event_count));
        reported += count.bins[b].event_count;
    }
    CHECK(total == std::int64_t(s.size()));
    CHECK(reported == s.size());
}

TEST_CASE("ecm: additivity of raw maps over disjoint streams") {
    std::mt19937_64 rng(5);
    auto a = canonicalize(fixture::random_stream(rng, 2'000, 10, 10, 0, 50'000));
    auto b = canonicalize(fixture::random_stream(rng, 2'000, 10, 10, 0, 50'000));
    EventStream both = a;
    both.events.insert(both.events.end(), b.events.begin(), b.events.end());
    both = canonicalize(std::move(both));
    // Skip any coincidences dropped as duplicates.
    REQUIRE(both.size() <= a.size() + b.size());
    if (both.size() == a.size() + b.size()) {
        const auto ea = build_ecm(a, 4'000), eb = build_ecm(b, 4'000), ab = build_ecm(both, 4'000);
        for (std::size_t k = 0; k < ab.size(); ++k)
            for (std::size_t i = 0; i < ab.bins[k].raw.size(); ++i)
                CHECK(ab.bins[k].raw[i] == ea.bins[k].raw[i] + eb.bins[k].raw[i]);
    }
}

TEST_CASE("normalize: closed-form values") {
    const std::vector<std::vector<std::int32_t>> raws{{-4, 0, 4}};
    const auto g = normalize_to_gray(raws, EcmMode::Signed, Normalization::PerBin);
    CHECK(g[0] == std::vector<std::uint8_t>{1, 128, 255});
    const std::vector<std::vector<std::int32_t>> zeros{{0, 0}};
    CHECK(normalize_to_gray(zeros, EcmMode::Signed, Normalization::PerSequence)[0] == std::vector<std::uint8_t>{128, 128});
    CHECK(normalize_to_gray(zeros, EcmMode::Count, Normalization::PerSequence)[0] == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("normalize: per-sequence shares M, per-bin does not") {
    const std::vector<std::vector<std::int32_t>> raws{{2, -1}, {8, 4}};
    const auto seq = normalize_to_gray(raws, EcmMode::Signed, Normalization::PerSequence);
    const auto bin = normalize_to_gray(raws, EcmMode::Signed, Normalization::PerBin);
    auto expect = [](int raw, int m) { return std::uint8_t(std::floor(128.0 + 127.0 * raw / m + 0.5)); };
    CHECK(seq[0][0] == expect(2, 8));
    CHECK(seq[0][1] == expect(-1, 8));
    CHECK(seq[1][0] == 255);
    CHECK(bin[0][0] == 255);
    CHECK(bin[0][1] == expect(-1, 2));
    CHECK(bin[1][1] == expect(4, 8));
    const auto cnt = normalize_to_gray(raws, EcmMode::Count, Normalization::PerSequence);
    CHECK(cnt[1][1] == std::uint8_t(std::floor(255.0 * 4 / 8 + 0.5)));
}

TEST_CASE("normalize: argmax |raw| is argmax |gray - 128|") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> v(-50, 50);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int32_t> raw(64);
        for (auto& r : raw) r = v(rng);
        const std::vector<std::vector<std::int32_t>> raws{raw};
        const auto g = normalize_to_gray(raws, EcmMode::Signed, Normalization::PerBin)[0];
        std::size_t a = 0, b = 0;
        for (std::size_t i = 1; i < raw.size(); ++i) {
            if (std::abs(raw[i]) > std::abs(raw[a])) a = i;
            if (std::abs(int(g[i]) - 128) > std::abs(int(g[b]) - 128)) b = i;
        }
        CHECK(std::abs(raw[a]) == std::abs(raw[b]));
    }
}

TEST_CASE("ecm: thread count does not change output") {
    std::mt19937_64 rng(13);
    const auto s = canonicalize(fixture::random_stream(rng, 20'000, 32, 24, 0, 1'000'000));
    ScopedThreadLimit one(1);
    const auto a = build_ecm(s, 33'333);
    set_max_threads(7);
    const auto b = build_ecm(s, 33'333);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.bins[k].raw == b.bins[k].raw);
        CHECK(a.bins[k].gray == b.bins[k].gray);
    }
}

TEST_CASE("ecm: rejects non-canonical streams and zero windows") {
    EventStream s;
    s.geometry = {4, 4};
    s.t_end = 10;
    s.events = {{5, 0, 0, 1}, {3, 0, 0, 1}};
    CHECK(kind_of([&] { build_ecm(s, 5); }) == ErrorKind::NotCanonical);
    CHECK(kind_of([&] { build_ecm(canonicalize(s), 0); }) == ErrorKind::ZeroWindow);
}

TEST_CASE("ecm raw dump layout") {
    const auto s = stream_of({{1, 1, 0, -1}}, 0, 10, 2, 1);
    const auto seq = build_ecm(s, 10);
    const auto bytes = encode_raw_dump(seq.bins[0]);
    REQUIRE(bytes.size() == 16 + 2 * 4);
    CHECK(bytes.substr(0, 4) == "ECMR");
    std::uint32_t w, h, bin;
    std::int32_t v1;
    std::memcpy(&w, bytes.data() + 4, 4);
    std::memcpy(&h, bytes.data() + 8, 4);
    std::memcpy(&bin, bytes.data() + 12, 4);
    std::memcpy(&v1, bytes.data() + 20, 4);
    CHECK(w == 2);
    CHECK(h == 1);
    CHECK(bin == 0);
    CHECK(v1 == -1);
}

TEST_CASE("voxel grid: boundary and bilinear weights") {
    auto s = stream_of({{0, 1, 1, 1}}, 0, 300);
    auto v = build_voxel_grid(s, 0, 300, 4);
    CHECK(v.at(0, 1, 1) == 1.0);
    CHECK(v.at(1, 1, 1) == 0.0);
    // tau = 150 * 3 / 300 = 1.5
    s = stream_of({{150, 1, 1, 1}}, 0, 300);
    v = build_voxel_grid(s, 0, 300, 4);
    CHECK(v.at(1, 1, 1) == doctest::Approx(0.5));
    CHECK(v.at(2, 1, 1) == doctest::Approx(0.5));
    s = stream_of({{300, 2, 2, -1}}, 0, 300);
    v = build_voxel_grid(s, 0, 300, 4);
    CHECK(v.at(3, 2, 2) == -1.0);
    CHECK(kind_of([&] { build_voxel_grid(s, 0, 300, 0); }) == ErrorKind::InvalidRange);
    CHECK(kind_of([&] { build_voxel_grid(s, 300, 300, 2); }) == ErrorKind::InvalidRange);
}

TEST_CASE("voxel grid: mass conservation and B = 1 equals a signed ECM") {
    std::mt19937_64 rng(31);
    const auto s = canonicalize(fixture::random_stream(rng, 3'000, 9, 7, 0, 10'000));
    for (std::size_t B : {1u, 2u, 5u, 10u}) {
        const auto v = build_voxel_grid(s, 1'000, 9'000, B);
        double total = 0.0;
        for (double x : v.values) total += x;
        std::int64_t expected = 0;
        for (const auto& e : s.events)
            if (e.t >= 1'000 && e.t <= 9'000) expected += e.p;
        CHECK(total == doctest::Approx(double(expected)).epsilon(1e-12));
    }
    const auto v1 = build_voxel_grid(s, 0, 10'000, 1);
    const auto ecm = build_ecm(s, 10'000);
    REQUIRE(ecm.size() == 1);
    for (std::size_t i = 0; i < v1.values.size(); ++i) CHECK(v1.values[i] == double(ecm.bins[0].raw[i]));
}
