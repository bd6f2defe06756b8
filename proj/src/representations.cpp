#include "evdet/representations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "byte_io.hpp"
#include "evdet/error.hpp"
#include "evdet/parallel.hpp"

namespace evdet {

const char* to_string(EcmMode mode) {
    switch (mode) {
    case EcmMode::Signed: return "signed";
    case EcmMode::Count: return "count";
    case EcmMode::TwoChannel: return "two_channel";
    }
    return "?";
}

const char* to_string(Normalization norm) {
    return norm == Normalization::PerSequence ? "per_sequence" : "per_bin";
}

BinGrid BinGrid::make(Timestamp t_start, Timestamp t_end, Timestamp window) {
    if (window <= 0) {
        throw Error(ErrorKind::ZeroWindow, "time window must be > 0 us");
    }
    if (t_end < t_start) {
        throw Error(ErrorKind::NegativeDuration, "t_end < t_start");
    }
    BinGrid g;
    g.t_start = t_start;
    g.t_end = t_end;
    g.window = window;
    const Timestamp duration = t_end - t_start;
    g.count = duration == 0 ? 1 : static_cast<std::size_t>((duration + window - 1) / window);
    return g;
}

Timestamp BinGrid::bin_end(std::size_t i) const {
    return std::min(bin_start(i) + window, t_end);
}

std::size_t BinGrid::bin_of(Timestamp t) const {
    if (t < t_start || t > t_end) {
        return count;
    }
    return std::min(static_cast<std::size_t>((t - t_start) / window), count - 1);
}

GrayImage EcmFrame::gray_image(std::size_t channel) const {
    GrayImage img;
    img.width = geometry.width;
    img.height = geometry.height;
    const auto first = gray.begin() + static_cast<std::ptrdiff_t>(channel * geometry.pixels());
    img.pixels.assign(first, first + static_cast<std::ptrdiff_t>(geometry.pixels()));
    return img;
}

std::uint8_t gray_value(std::int32_t raw, std::int32_t scale, EcmMode mode) {
    const double m = std::max<std::int32_t>(1, scale);
    const double v = mode == EcmMode::Signed ? 128.0 + 127.0 * raw / m : 255.0 * raw / m;
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

namespace {

std::int32_t max_abs(const std::vector<std::int32_t>& raw) {
    std::int32_t m = 0;
    for (auto v : raw) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> normalize_to_gray(std::span<const std::vector<std::int32_t>> raws,
                                                         EcmMode mode, Normalization normalization) {
    std::vector<std::int32_t> scales(raws.size());
    parallel_for(raws.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            scales[i] = max_abs(raws[i]);
        }
    });
    if (normalization == Normalization::PerSequence) {
        const std::int32_t global = scales.empty() ? 0 : *std::max_element(scales.begin(), scales.end());
        std::fill(scales.begin(), scales.end(), global);
    }

    std::vector<std::vector<std::uint8_t>> out(raws.size());
    parallel_for(raws.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out[i].resize(raws[i].size());
            for (std::size_t p = 0; p < raws[i].size(); ++p) {
                out[i][p] = gray_value(raws[i][p], scales[i], mode);
            }
        }
    });
    return out;
}

EcmSequence build_ecm(const EventStream& stream, Timestamp window, EcmMode mode, Normalization normalization) {
    const BinGrid grid = BinGrid::make(stream.t_start, stream.t_end, window);
    require_canonical(stream);

    EcmSequence seq;
    seq.grid = grid;
    seq.mode = mode;
    seq.normalization = normalization;
    seq.bins.resize(grid.count);

    const std::size_t channels = mode == EcmMode::TwoChannel ? 2 : 1;
    const std::size_t pixels = stream.geometry.pixels();
    const std::uint32_t width = stream.geometry.width;
    const std::span<const Event> events(stream.events);

    parallel_for(grid.count, [&](std::size_t bin_begin, std::size_t bin_end) {
        for (std::size_t i = bin_begin; i < bin_end; ++i) {
            auto& frame = seq.bins[i];
            frame.geometry = stream.geometry;
            frame.bin_index = i;
            frame.t0 = grid.bin_start(i);
            frame.t1 = grid.bin_end(i);
            frame.partial = grid.is_partial(i);
            frame.channels = channels;
            frame.raw.assign(channels * pixels, 0);

            const bool last = i + 1 == grid.count;
            const auto [first, end] = time_range(events, frame.t0, last ? grid.t_end + 1 : frame.t1);
            frame.event_count = end - first;
            std::int32_t* raw = frame.raw.data();
            switch (mode) {
            case EcmMode::Signed:
                for (std::size_t k = first; k < end; ++k) {
                    const Event& e = events[k];
                    raw[std::size_t(e.y) * width + e.x] += e.p;
                }
                break;
            case EcmMode::Count:
                for (std::size_t k = first; k < end; ++k) {
                    const Event& e = events[k];
                    raw[std::size_t(e.y) * width + e.x] += 1;
                }
                break;
            case EcmMode::TwoChannel:
                for (std::size_t k = first; k < end; ++k) {
                    const Event& e = events[k];
                    raw[(e.p > 0 ? 0 : pixels) + std::size_t(e.y) * width + e.x] += 1;
                }
                break;
            }
        }
    });

    std::vector<std::vector<std::int32_t>> raws;
    raws.reserve(seq.bins.size());
    for (auto& frame : seq.bins) {
        raws.push_back(std::move(frame.raw));
    }
    auto grays = normalize_to_gray(raws, mode, normalization);
    for (std::size_t i = 0; i < seq.bins.size(); ++i) {
        seq.bins[i].raw = std::move(raws[i]);
        seq.bins[i].gray = std::move(grays[i]);
    }
    return seq;
}

std::string encode_raw_dump(const EcmFrame& frame) {
    using detail::put_le;
    std::string out = "ECMR";
    out.reserve(16 + frame.raw.size() * 4);
    put_le<std::uint32_t>(out, frame.geometry.width);
    put_le<std::uint32_t>(out, frame.geometry.height);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(frame.bin_index));
    for (auto v : frame.raw) {
        put_le<std::int32_t>(out, v);
    }
    return out;
}

VoxelGrid build_voxel_grid(const EventStream& stream, Timestamp t0, Timestamp t1, std::size_t num_bins) {
    if (num_bins == 0) {
        throw Error(ErrorKind::InvalidRange, "voxel grid needs at least one temporal bin");
    }
    if (t0 >= t1) {
        throw Error(ErrorKind::InvalidRange, "voxel grid needs t0 < t1");
    }
    require_canonical(stream);

    VoxelGrid grid;
    grid.geometry = stream.geometry;
    grid.num_bins = num_bins;
    grid.t0 = t0;
    grid.t1 = t1;
    const std::size_t pixels = stream.geometry.pixels();
    grid.values.assign(num_bins * pixels, 0.0);

    const auto [first, end] = time_range(stream.events, t0, t1 + 1);
    const double scale = static_cast<double>(num_bins - 1) / static_cast<double>(t1 - t0);
    for (std::size_t k = first; k < end; ++k) {
        const Event& e = stream.events[k];
        const double tau = static_cast<double>(e.t - t0) * scale;
        const auto lower = std::min(static_cast<std::size_t>(tau), num_bins - 1);
        const double frac = tau - static_cast<double>(lower);
        const std::size_t pixel = std::size_t(e.y) * stream.geometry.width + e.x;
        grid.values[lower * pixels + pixel] += e.p * (1.0 - frac);
        if (frac > 0.0 && lower + 1 < num_bins) {
            grid.values[(lower + 1) * pixels + pixel] += e.p * frac;
        }
    }
    return grid;
}

}  // namespace evdet
