#include "multifit/image.hpp"

#include <cmath>

namespace multifit {

namespace {

double srgb_linearize(std::uint8_t c) {
    const double v = c / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    constexpr double delta3 = delta * delta * delta;
    return t > delta3 ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

std::array<float, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double rl = srgb_linearize(r);
    const double gl = srgb_linearize(g);
    const double bl = srgb_linearize(b);

    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;

    // D65 reference white
    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y / 1.0);
    const double fz = lab_f(z / 1.08883);

    return {static_cast<float>(116.0 * fy - 16.0),
            static_cast<float>(500.0 * (fx - fy)),
            static_cast<float>(200.0 * (fy - fz))};
}

Image to_lab(const RgbImage& rgb) {
    Image out;
    out.width = rgb.width;
    out.height = rgb.height;
    out.pixels.resize(static_cast<std::size_t>(rgb.width) * rgb.height);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            const std::uint8_t* p = rgb.pixel(x, y);
            out.pixels[static_cast<std::size_t>(y) * rgb.width + x] = rgb_to_lab(p[0], p[1], p[2]);
        }
    }
    return out;
}

}  // namespace multifit
