#include "multifit/match_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "multifit/errors.hpp"

namespace multifit {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<Correspondence> load_matches(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string() + ": cannot open file");
    }
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        fail(path, line_no, "empty file, expected header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMatchFileHeader) {
        fail(path, line_no, "bad header '" + line + "', expected '" + kMatchFileHeader + "'");
    }

    std::vector<Correspondence> matches;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        Correspondence c;
        std::string extra;
        if (!(fields >> c.p1.x >> c.p1.y >> c.p2.x >> c.p2.y >> c.score)) {
            fail(path, line_no, "expected 5 numeric fields 'x1 y1 x2 y2 score'");
        }
        if (fields >> extra) {
            fail(path, line_no, "trailing content '" + extra + "'");
        }
        if (!std::isfinite(c.p1.x) || !std::isfinite(c.p1.y) || !std::isfinite(c.p2.x) ||
            !std::isfinite(c.p2.y)) {
            fail(path, line_no, "coordinates must be finite");
        }
        if (!std::isfinite(c.score) || c.score < 0.0) {
            fail(path, line_no, "score must be finite and non-negative");
        }
        matches.push_back(c);
    }
    if (matches.empty()) {
        fail(path, line_no, "no records");
    }
    return matches;
}

void save_matches(const std::filesystem::path& path, std::span<const Correspondence> matches) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError(path.string() + ": cannot open file for writing");
    }
    out << kMatchFileHeader << "\n";
    for (const Correspondence& c : matches) {
        out << format_double(c.p1.x) << ' ' << format_double(c.p1.y) << ' '
            << format_double(c.p2.x) << ' ' << format_double(c.p2.y) << ' '
            << format_double(c.score) << "\n";
    }
}

std::vector<int> load_labels(const std::filesystem::path& path, std::size_t expected_count) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string() + ": cannot open file");
    }
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        int label = 0;
        if (!(fields >> label)) {
            fail(path, line_no, "expected one integer label");
        }
        labels.push_back(label);
    }
    if (labels.size() != expected_count) {
        throw ParseError(path.string() + ": " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(expected_count) + " matches");
    }
    return labels;
}

void save_labels(const std::filesystem::path& path, std::span<const int> labels) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError(path.string() + ": cannot open file for writing");
    }
    for (const int l : labels) out << l << "\n";
}

std::optional<std::vector<int>> load_labels_for(const std::filesystem::path& matches_path,
                                                const std::optional<std::filesystem::path>& explicit_path,
                                                std::size_t expected_count) {
    if (explicit_path) {
        return load_labels(*explicit_path, expected_count);
    }
    std::filesystem::path sidecar = matches_path;
    sidecar += ".labels";
    if (std::filesystem::exists(sidecar)) {
        return load_labels(sidecar, expected_count);
    }
    return std::nullopt;
}

}  // namespace multifit
