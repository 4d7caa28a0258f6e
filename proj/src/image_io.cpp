#include "multifit/image_io.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "multifit/errors.hpp"

namespace multifit {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw ParseError(path.string() + ": " + what);
}

/// Reads the next whitespace/comment-separated token from a PNM header.
std::string next_token(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    return token;
}

int next_int(std::istream& in, const std::filesystem::path& path, const char* what) {
    const std::string token = next_token(in);
    if (token.empty()) fail(path, std::string("unexpected end of header, expected ") + what);
    try {
        return std::stoi(token);
    } catch (...) {
        fail(path, std::string("bad ") + what + " '" + token + "'");
    }
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");

    const std::string magic = next_token(in);
    const bool gray = magic == "P2" || magic == "P5";
    const bool color = magic == "P3" || magic == "P6";
    if (!gray && !color) fail(path, "unsupported format '" + magic + "', expected P2/P3/P5/P6");
    const bool binary = magic == "P5" || magic == "P6";

    RgbImage img;
    img.width = next_int(in, path, "width");
    img.height = next_int(in, path, "height");
    const int maxval = next_int(in, path, "maxval");
    if (img.width < 1 || img.height < 1) fail(path, "image dimensions must be positive");
    if (maxval < 1 || maxval > 255) fail(path, "only 8-bit images are supported");

    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    const std::size_t samples = pixels * (color ? 3 : 1);
    std::vector<std::uint8_t> raw(samples);
    if (binary) {
        // The header ends with exactly one whitespace byte before the raster.
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(samples))) {
            fail(path, "truncated raster data");
        }
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            const int v = next_int(in, path, "sample");
            if (v < 0 || v > maxval) fail(path, "sample out of range");
            raw[i] = static_cast<std::uint8_t>(v);
        }
    }

    const double scale = 255.0 / maxval;
    img.data.resize(pixels * 3);
    for (std::size_t i = 0; i < pixels; ++i) {
        if (color) {
            for (int c = 0; c < 3; ++c) {
                img.data[3 * i + c] = static_cast<std::uint8_t>(raw[3 * i + c] * scale + 0.5);
            }
        } else {
            const auto v = static_cast<std::uint8_t>(raw[i] * scale + 0.5);
            img.data[3 * i] = img.data[3 * i + 1] = img.data[3 * i + 2] = v;
        }
    }
    return img;
}

void save_image_ppm(const std::filesystem::path& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
}

void save_image_pgm(const std::filesystem::path& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(img.width) * img.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double y = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                         0.114 * img.data[3 * i + 2];
        gray[i] = static_cast<std::uint8_t>(y + 0.5);
    }
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
}

}  // namespace multifit
