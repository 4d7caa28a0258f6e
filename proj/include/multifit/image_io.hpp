#pragma once

#include <filesystem>

#include "multifit/image.hpp"

namespace multifit {

/// Reads an 8-bit PGM/PPM image (P2, P3, P5 or P6). Grayscale input is
/// replicated into RGB. Throws ParseError on malformed files.
RgbImage load_image(const std::filesystem::path& path);

/// Writes binary PPM (P6).
void save_image_ppm(const std::filesystem::path& path, const RgbImage& img);

/// Writes binary PGM (P5) from the RGB luma.
void save_image_pgm(const std::filesystem::path& path, const RgbImage& img);

}  // namespace multifit
