#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "multifit/types.hpp"

namespace multifit {

/// "MULTIFIT-MATCHES v1": header line, then one "x1 y1 x2 y2 score" record
/// per line. A sidecar "<path>.labels" file, when present, carries one
/// integer ground-truth label per record (0 = outlier).
inline constexpr const char* kMatchFileHeader = "MULTIFIT-MATCHES v1";

/// Order-preserving load. Throws ParseError with the path and line number
/// on malformed input, non-finite values, or a header mismatch.
std::vector<Correspondence> load_matches(const std::filesystem::path& path);

/// Writes correspondences with round-trip precision.
void save_matches(const std::filesystem::path& path, std::span<const Correspondence> matches);

/// Loads a label sidecar; the expected count must match the match count.
std::vector<int> load_labels(const std::filesystem::path& path, std::size_t expected_count);

void save_labels(const std::filesystem::path& path, std::span<const int> labels);

/// Returns the labels from `explicit_path` when given, otherwise from the
/// "<matches>.labels" sidecar when that exists, otherwise nothing.
std::optional<std::vector<int>> load_labels_for(const std::filesystem::path& matches_path,
                                                const std::optional<std::filesystem::path>& explicit_path,
                                                std::size_t expected_count);

}  // namespace multifit
