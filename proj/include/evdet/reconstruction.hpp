#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evdet/event_core.hpp"
#include "evdet/pnm.hpp"

namespace evdet {

struct ToneMap {
    enum class Kind { Percentile, Fixed };
    Kind kind = Kind::Percentile;
    double lo = 0.01;  ///< quantile (Percentile) or state value (Fixed)
    double hi = 0.99;

    static ToneMap percentile(double lo = 0.01, double hi = 0.99) { return {Kind::Percentile, lo, hi}; }
    static ToneMap fixed(double min, double max) { return {Kind::Fixed, min, max}; }
};

struct ReconConfig {
    double alpha = 2.0;              ///< decay rate, 1/s
    double contrast = 0.2;           ///< log-intensity step per event
    Timestamp sample_period = 33333; ///< us between output frames
    ToneMap tone_map;

    /// Throws InvalidConfig.
    void validate() const;
};

/// One reconstructed frame: filter state at time t and its tone-mapped image.
struct GrayFrame {
    Geometry geometry;
    Timestamp t = 0;
    std::vector<double> state;
    std::vector<std::uint8_t> gray;

    double state_at(std::uint32_t x, std::uint32_t y) const { return state[std::size_t(y) * geometry.width + x]; }
    GrayImage image() const { return {geometry.width, geometry.height, gray}; }
};

/// t_start + k * period for k = 1 .. max(1, ceil(T / period)). The last
/// instant is at or after t_end, so the final frame has seen every event.
std::vector<Timestamp> sample_instants(Timestamp t_start, Timestamp t_end, Timestamp period);

/// Per-pixel leaky integrator: between updates the state decays as
/// exp(-alpha * dt); each event adds p * contrast. A frame sampled at s
/// includes every event with t <= s. Decay is applied lazily, only when a
/// pixel is touched or sampled.
std::vector<GrayFrame> reconstruct(const EventStream& stream, const ReconConfig& cfg);

/// Fills frame.gray from frame.state. Percentile bounds are taken over all
/// states of all frames; values are mapped linearly onto 0..255 and clamped.
void apply_tone_map(std::vector<GrayFrame>& frames, const ToneMap& tone_map);

/// `RECS` magic, LE u32 width, height, u64 t, then the state as LE f32.
std::string encode_state_dump(const GrayFrame& frame);

}  // namespace evdet
