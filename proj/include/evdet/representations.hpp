#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evdet/event_core.hpp"
#include "evdet/pnm.hpp"

namespace evdet {

/// Signed: sum of polarities. Count: number of events. TwoChannel: separate
/// ON and OFF counts (two planes, ON first).
enum class EcmMode { Signed, Count, TwoChannel };
enum class Normalization { PerSequence, PerBin };

const char* to_string(EcmMode mode);
const char* to_string(Normalization norm);

/// Fixed-width tiling of [t_start, t_end] into ceil(T / window) half-open
/// bins. The last bin is closed at t_end and may be shorter than the
/// window; a zero-length stream still gets one (empty-width) bin.
struct BinGrid {
    Timestamp t_start = 0;
    Timestamp t_end = 0;
    Timestamp window = 1;
    std::size_t count = 0;

    /// Throws ZeroWindow for window <= 0, NegativeDuration if t_end < t_start.
    static BinGrid make(Timestamp t_start, Timestamp t_end, Timestamp window);

    Timestamp bin_start(std::size_t i) const { return t_start + static_cast<Timestamp>(i) * window; }
    Timestamp bin_end(std::size_t i) const;
    bool is_partial(std::size_t i) const { return bin_start(i) + window > t_end; }

    /// Bin containing t, or count when t lies outside [t_start, t_end].
    std::size_t bin_of(Timestamp t) const;
};

struct EcmFrame {
    Geometry geometry;
    std::size_t bin_index = 0;
    Timestamp t0 = 0;
    Timestamp t1 = 0;
    bool partial = false;
    std::size_t channels = 1;
    std::uint64_t event_count = 0;
    std::vector<std::int32_t> raw;   ///< channels x height x width
    std::vector<std::uint8_t> gray;  ///< same layout as raw

    std::int32_t raw_at(std::uint32_t x, std::uint32_t y, std::size_t channel = 0) const {
        return raw[channel * geometry.pixels() + std::size_t(y) * geometry.width + x];
    }
    GrayImage gray_image(std::size_t channel = 0) const;
};

struct EcmSequence {
    BinGrid grid;
    EcmMode mode = EcmMode::Signed;
    Normalization normalization = Normalization::PerSequence;
    std::vector<EcmFrame> bins;

    Timestamp window() const { return grid.window; }
    std::size_t size() const { return bins.size(); }
};

/// Bins a canonical stream and fills both raw and gray maps.
/// Throws ZeroWindow if window <= 0 and NotCanonical.
EcmSequence build_ecm(const EventStream& stream, Timestamp window, EcmMode mode = EcmMode::Signed,
                      Normalization normalization = Normalization::PerSequence);

/// Affine map of raw values onto 0..255. Signed mode centres zero at 128:
/// round(128 + 127 * raw / M); the count modes use round(255 * raw / M).
/// M = max(1, max |raw|) over the whole sequence or over each map.
std::vector<std::vector<std::uint8_t>> normalize_to_gray(std::span<const std::vector<std::int32_t>> raws, EcmMode mode,
                                                         Normalization normalization);

std::uint8_t gray_value(std::int32_t raw, std::int32_t scale, EcmMode mode);

/// `ECMR` magic, then LE u32 width, height, bin index and the raw grid as LE
/// i32 (all channels, channel-major).
std::string encode_raw_dump(const EcmFrame& frame);

/// Polarity-signed events spread over num_bins temporal slices with linear
/// (bilinear-in-time) weights.
struct VoxelGrid {
    Geometry geometry;
    std::size_t num_bins = 0;
    Timestamp t0 = 0;
    Timestamp t1 = 0;
    std::vector<double> values;  ///< num_bins x height x width

    double at(std::size_t bin, std::uint32_t x, std::uint32_t y) const {
        return values[bin * geometry.pixels() + std::size_t(y) * geometry.width + x];
    }
};

/// Events with t0 <= t <= t1 contribute; tau = (t - t0) * (B - 1) / (t1 - t0)
/// splits p between floor(tau) and floor(tau) + 1. Throws InvalidRange for
/// B == 0 or t0 >= t1.
VoxelGrid build_voxel_grid(const EventStream& stream, Timestamp t0, Timestamp t1, std::size_t num_bins);

}  // namespace evdet
