#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "evdet/annotations.hpp"
#include "evdet/event_core.hpp"
#include "evdet/pnm.hpp"

namespace fixture {

// Uniform random events; not canonical (shuffled, may contain duplicates).
evdet::EventStream random_stream(std::mt19937_64& rng, std::size_t count, std::uint32_t width, std::uint32_t height,
                                 evdet::Timestamp t_start, evdet::Timestamp t_end);

// A bright square translating right by `velocity` pixels per frame on a
// dark background.
struct MovingSquare {
    std::uint32_t width = 64;
    std::uint32_t height = 48;
    int size = 12;
    int x0 = 4;
    int y0 = 18;
    int velocity = 2;
    std::size_t frames = 20;
    double fps = 10.0;
    std::uint8_t background = 50;
    std::uint8_t foreground = 200;

    evdet::GrayImage frame(std::size_t k) const;
    evdet::Box box(std::size_t k) const;
    // VisDrone-style ground truth, one track, category 1, frames numbered from 0.
    std::string ground_truth_csv() const;
    void write_frames(const std::filesystem::path& dir) const;
};

// Bounding boxes of 4-connected components with gray >= threshold and at
// least min_area pixels. Score is the component's mean gray / 255.
std::vector<evdet::Detection> blob_detector(const evdet::GrayImage& image, evdet::FrameIndex frame,
                                            std::uint8_t threshold = 160, std::size_t min_area = 4);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string slurp(const std::filesystem::path& path);

}  // namespace fixture
