#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evdet {

/// 8-bit single-channel image, row-major.
struct GrayImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t(y) * width + x]; }
    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// ITU-R BT.601 luma, rounded to the nearest integer.
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Decodes P2/P5 (gray) and P3/P6 (RGB, converted with luma_bt601).
/// Samples with maxval != 255 are rescaled to 0..255. Throws ParseError.
GrayImage decode_pnm(std::string_view bytes);
GrayImage read_pnm(const std::filesystem::path& path);

/// Binary P5, maxval 255.
std::string encode_pgm(const GrayImage& image);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Frame files are named `<prefix>_<index zero-padded to 6>.pgm`.
std::string frame_file_name(std::string_view prefix, std::size_t index);

/// .pgm/.ppm/.pnm files in `dir`, ordered by the integer embedded in the
/// file name (the last run of digits), then by name.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

}  // namespace evdet
