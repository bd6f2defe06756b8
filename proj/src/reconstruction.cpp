#include "evdet/reconstruction.hpp"

#include <algorithm>
#include <cmath>

#include "byte_io.hpp"
#include "evdet/error.hpp"
#include "evdet/parallel.hpp"

namespace evdet {

void ReconConfig::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::InvalidConfig, "alpha must be >= 0");
    }
    if (!(contrast > 0.0) || !std::isfinite(contrast)) {
        throw Error(ErrorKind::InvalidConfig, "contrast must be > 0");
    }
    if (sample_period <= 0) {
        throw Error(ErrorKind::InvalidConfig, "sample period must be > 0 us");
    }
    if (tone_map.kind == ToneMap::Kind::Percentile) {
        if (!(tone_map.lo >= 0.0 && tone_map.lo < tone_map.hi && tone_map.hi <= 1.0)) {
            throw Error(ErrorKind::InvalidConfig, "percentiles must satisfy 0 <= lo < hi <= 1");
        }
    } else if (!(tone_map.lo < tone_map.hi)) {
        throw Error(ErrorKind::InvalidConfig, "fixed tone map needs min < max");
    }
}

std::vector<Timestamp> sample_instants(Timestamp t_start, Timestamp t_end, Timestamp period) {
    const Timestamp duration = std::max<Timestamp>(0, t_end - t_start);
    const Timestamp count = std::max<Timestamp>(1, (duration + period - 1) / period);
    std::vector<Timestamp> out(static_cast<std::size_t>(count));
    for (Timestamp k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = t_start + (k + 1) * period;
    }
    return out;
}

namespace {

// Linear interpolation between order statistics (numpy's default).
double quantile(std::vector<double>& values, double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double a = values[lo];
    if (frac == 0.0 || lo + 1 >= values.size()) {
        return a;
    }
    const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    return a + frac * (b - a);
}

}  // namespace

void apply_tone_map(std::vector<GrayFrame>& frames, const ToneMap& tone_map) {
    double lo = tone_map.lo;
    double hi = tone_map.hi;
    if (tone_map.kind == ToneMap::Kind::Percentile) {
        std::vector<double> all;
        for (const auto& f : frames) {
            all.insert(all.end(), f.state.begin(), f.state.end());
        }
        if (all.empty()) {
            return;
        }
        lo = quantile(all, tone_map.lo);
        hi = quantile(all, tone_map.hi);
    }

    parallel_for(frames.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto& f = frames[i];
            f.gray.resize(f.state.size());
            for (std::size_t p = 0; p < f.state.size(); ++p) {
                const double s = f.state[p];
                double v;
                if (hi > lo) {
                    v = std::clamp(std::floor(255.0 * (s - lo) / (hi - lo) + 0.5), 0.0, 255.0);
                } else {
                    // Degenerate range: a step at lo keeps the map monotone.
                    v = s < lo ? 0.0 : (s > lo ? 255.0 : 128.0);
                }
                f.gray[p] = static_cast<std::uint8_t>(v);
            }
        }
    });
}

std::vector<GrayFrame> reconstruct(const EventStream& stream, const ReconConfig& cfg) {
    cfg.validate();
    require_canonical(stream);

    const Geometry geo = stream.geometry;
    const std::vector<Timestamp> instants = sample_instants(stream.t_start, stream.t_end, cfg.sample_period);
    std::vector<GrayFrame> frames(instants.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        frames[k].geometry = geo;
        frames[k].t = instants[k];
        frames[k].state.assign(geo.pixels(), 0.0);
    }

    // Stable bucket by row; each row keeps time order.
    std::vector<std::size_t> row_offsets(std::size_t(geo.height) + 1, 0);
    for (const auto& e : stream.events) {
        ++row_offsets[std::size_t(e.y) + 1];
    }
    for (std::size_t y = 0; y < geo.height; ++y) {
        row_offsets[y + 1] += row_offsets[y];
    }
    std::vector<Event> by_row(stream.events.size());
    {
        std::vector<std::size_t> cursor(row_offsets.begin(), row_offsets.end() - 1);
        for (const auto& e : stream.events) {
            by_row[cursor[e.y]++] = e;
        }
    }

    const double alpha_per_us = cfg.alpha * 1e-6;
    const double c = cfg.contrast;
    parallel_for(geo.height, [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> state(geo.width);
        std::vector<Timestamp> last(geo.width);
        for (std::size_t y = row_begin; y < row_end; ++y) {
            std::fill(state.begin(), state.end(), 0.0);
            std::fill(last.begin(), last.end(), stream.t_start);
            std::size_t next = row_offsets[y];
            const std::size_t row_stop = row_offsets[y + 1];
            for (std::size_t k = 0; k < instants.size(); ++k) {
                const Timestamp s = instants[k];
                for (; next < row_stop && by_row[next].t <= s; ++next) {
                    const Event& e = by_row[next];
                    double& v = state[e.x];
                    if (alpha_per_us > 0.0) {
                        v *= std::exp(-alpha_per_us * static_cast<double>(e.t - last[e.x]));
                    }
                    v += e.p * c;
                    last[e.x] = e.t;
                }
                double* out = frames[k].state.data() + y * geo.width;
                for (std::uint32_t x = 0; x < geo.width; ++x) {
                    out[x] = alpha_per_us > 0.0 && state[x] != 0.0
                                 ? state[x] * std::exp(-alpha_per_us * static_cast<double>(s - last[x]))
                                 : state[x];
                }
            }
        }
    });

    apply_tone_map(frames, cfg.tone_map);
    return frames;
}

std::string encode_state_dump(const GrayFrame& frame) {
    using detail::put_le;
    std::string out = "RECS";
    out.reserve(20 + frame.state.size() * 4);
    put_le<std::uint32_t>(out, frame.geometry.width);
    put_le<std::uint32_t>(out, frame.geometry.height);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(frame.t));
    for (double v : frame.state) {
        detail::put_f32(out, static_cast<float>(v));
    }
    return out;
}

}  // namespace evdet
