#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace multifit {

/// 8-bit RGB image, row-major, used for file I/O and synthetic rendering.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  ///< 3 * width * height bytes, RGB

    std::uint8_t* pixel(int x, int y) { return data.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

/// CIELAB image as consumed by the segmenter. Constructed from RGB.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::array<float, 3>> pixels;  ///< row-major (L, a, b)

    const std::array<float, 3>& lab(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }
};

/// sRGB (D65) to CIELAB conversion of a single pixel.
std::array<float, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Converts a whole image.
Image to_lab(const RgbImage& rgb);

}  // namespace multifit
