#pragma once

namespace evdet {

/// Axis-aligned box in continuous pixel coordinates (no +1 inclusivity).
struct Box {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    double right() const { return left + width; }
    double bottom() const { return top + height; }
    double area() const { return width * height; }

    friend bool operator==(const Box&, const Box&) = default;
    friend auto operator<=>(const Box&, const Box&) = default;
};

}  // namespace evdet
