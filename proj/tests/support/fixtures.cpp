#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;

namespace fixture {

evdet::EventStream random_stream(std::mt19937_64& rng, std::size_t count, std::uint32_t width, std::uint32_t height,
                                 evdet::Timestamp t_start, evdet::Timestamp t_end) {
    evdet::EventStream s;
    s.geometry = {width, height};
    s.t_start = t_start;
    s.t_end = t_end;
    std::uniform_int_distribution<evdet::Timestamp> t(t_start, t_end);
    std::uniform_int_distribution<std::uint32_t> x(0, width - 1);
    std::uniform_int_distribution<std::uint32_t> y(0, height - 1);
    std::bernoulli_distribution on(0.5);
    s.events.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        s.events.push_back({t(rng), static_cast<std::uint16_t>(x(rng)), static_cast<std::uint16_t>(y(rng)),
                            static_cast<std::int8_t>(on(rng) ? 1 : -1)});
    }
    return s;
}

evdet::GrayImage MovingSquare::frame(std::size_t k) const {
    evdet::GrayImage img{width, height, std::vector<std::uint8_t>(std::size_t(width) * height, background)};
    const evdet::Box b = box(k);
    for (int y = static_cast<int>(b.top); y < static_cast<int>(b.bottom()); ++y) {
        for (int x = static_cast<int>(b.left); x < static_cast<int>(b.right()); ++x) {
            if (x >= 0 && y >= 0 && x < int(width) && y < int(height)) {
                img.pixels[std::size_t(y) * width + std::size_t(x)] = foreground;
            }
        }
    }
    return img;
}

evdet::Box MovingSquare::box(std::size_t k) const {
    return {double(x0 + velocity * static_cast<int>(k)), double(y0), double(size), double(size)};
}

std::string MovingSquare::ground_truth_csv() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < frames; ++k) {
        const auto b = box(k);
        out << k << ",1," << b.left << ',' << b.top << ',' << b.width << ',' << b.height << ",1,1,0,0\n";
    }
    return out.str();
}

void MovingSquare::write_frames(const fs::path& dir) const {
    fs::create_directories(dir);
    for (std::size_t k = 0; k < frames; ++k) {
        evdet::write_pgm(frame(k), dir / evdet::frame_file_name("frame", k));
    }
}

std::vector<evdet::Detection> blob_detector(const evdet::GrayImage& image, evdet::FrameIndex frame,
                                            std::uint8_t threshold, std::size_t min_area) {
    const std::size_t w = image.width;
    const std::size_t h = image.height;
    std::vector<int> label(w * h, -1);
    std::vector<evdet::Detection> out;
    int next = 0;
    for (std::size_t start = 0; start < w * h; ++start) {
        if (label[start] >= 0 || image.pixels[start] < threshold) continue;
        std::vector<std::size_t> stack{start};
        label[start] = next;
        std::size_t area = 0;
        double sum = 0.0;
        std::size_t x_min = w, y_min = h, x_max = 0, y_max = 0;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const std::size_t x = p % w;
            const std::size_t y = p / w;
            ++area;
            sum += image.pixels[p];
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
            const std::size_t nbrs[4] = {x > 0 ? p - 1 : p, x + 1 < w ? p + 1 : p, y > 0 ? p - w : p,
                                         y + 1 < h ? p + w : p};
            for (std::size_t q : nbrs) {
                if (q != p && label[q] < 0 && image.pixels[q] >= threshold) {
                    label[q] = next;
                    stack.push_back(q);
                }
            }
        }
        ++next;
        if (area < min_area) continue;
        evdet::Detection d;
        d.frame_index = frame;
        d.box = {double(x_min), double(y_min), double(x_max - x_min + 1), double(y_max - y_min + 1)};
        d.category = 1;
        d.score = sum / (255.0 * static_cast<double>(area));
        out.push_back(d);
    }
    return out;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("evdet_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace fixture
