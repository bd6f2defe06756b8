#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "evdet/event_core.hpp"
#include "evdet/pnm.hpp"

namespace evdet {

struct SimulatorConfig {
    double theta_pos = 0.2;    ///< log-intensity step for an ON event
    double theta_neg = 0.2;    ///< log-intensity step for an OFF event
    double linlog_knee = 20.0; ///< linear below this intensity (0..255 scale)
    /// Emit at most this many events per pixel per frame interval. The
    /// reference level still advances by every crossing.
    std::optional<std::uint32_t> max_events_per_pixel_per_interval;

    /// Throws InvalidConfig.
    void validate() const;
};

/// Grayscale video. Intensities are real-valued on the 0..255 scale so that
/// interpolated frames can be represented exactly.
struct FrameSequence {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    double fps = 0.0;
    std::vector<std::vector<double>> frames;

    /// Throws DegenerateFps, GeometryMismatch or InvalidConfig (no frames,
    /// intensity outside [0, 255]).
    void validate() const;

    static FrameSequence from_images(std::span<const GrayImage> images, double fps);
};

/// Loads every PGM/PPM in `dir` in numeric order.
FrameSequence load_frame_directory(const std::filesystem::path& dir, double fps);

/// Linear through the origin below the knee, natural log above; continuous
/// at the knee.
double linlog(double intensity, double knee = 20.0);
double linlog_inverse(double log_intensity, double knee = 20.0);

/// Time of frame `index` in microseconds, rounded half-up.
Timestamp frame_time_us(std::size_t index, double fps);

/// Contrast-threshold event synthesis. Each pixel keeps a reference
/// log-intensity initialised from frame 0; whenever the log-intensity
/// trajectory (linear between frames) crosses reference + k*theta an event
/// of that sign is emitted at the interpolated crossing time. The result is
/// canonical and spans [0, frame_time_us(frames - 1)].
EventStream simulate(const FrameSequence& video, const SimulatorConfig& cfg);

}  // namespace evdet
