#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "multifit/baselines.hpp"
#include "multifit/pipeline.hpp"
#include "multifit/report.hpp"
#include "multifit/synthetic.hpp"

namespace multifit {

/// Parsed command-line arguments for a single fit.
struct RunArgs {
    std::string method;  ///< sdf | ransac | prosac
    ModelKind kind = ModelKind::Homography;
    std::optional<std::filesystem::path> image1;
    std::optional<std::filesystem::path> image2;
    std::filesystem::path matches;
    std::optional<std::filesystem::path> labels;
    double inlier_scale = 2.0;
    int num_structures = 1;
    int superpixels = 150;
    double compactness = 10.0;
    int m0 = 0;  ///< 0 selects p + 2
    std::string grouping_view = "both";
    std::uint64_t seed = 0;
    double confidence = 0.99;
    int max_iters = 10000;
    std::optional<std::filesystem::path> out;
    std::string format = "json";
};

GroupingView parse_grouping_view(const std::string& name);

/// Validates the arguments, loads inputs, executes the chosen method and
/// returns the report. Throws UsageError for inconsistent arguments and
/// propagates parse/fit errors.
RunReport run_fit(const RunArgs& args);

/// Serializes the report in the requested format to `args.out` or stdout.
void write_report(const RunReport& report, const RunArgs& args);

/// Writes a synthetic scene to disk as "<prefix>.image1.ppm",
/// "<prefix>.image2.ppm", "<prefix>.matches" and "<prefix>.matches.labels".
/// Returns the matches path.
std::filesystem::path write_scene_bundle(const LabeledScene& scene,
                                         const std::filesystem::path& prefix);

struct BenchmarkSpec {
    enum class Suite { OutlierSweep, SuperpixelSweep };
    Suite suite = Suite::OutlierSweep;
    ModelKind kind = ModelKind::Homography;
    std::vector<std::string> methods{"sdf", "ransac"};
    std::uint64_t seed = 7;
    int repeats = 5;  ///< wall time is the median over this many runs
    int image_width = 480;
    int image_height = 360;
    int total_matches = 600;  ///< outlier sweep: fixed size, ratio varies
    double noise_sigma = 1.0;
    double inlier_scale = 3.0;
    int m0 = 0;  ///< sampled subset size for sdf cells; 0 keeps the default
};

struct BenchmarkCell {
    std::string sweep;
    std::string method;
    double param = 0.0;  ///< outlier percentage or superpixel count
    double mean_error = 0.0;
    double median_ms = 0.0;
    std::string status;  ///< "ok" or the error message
};

/// Runs a parameter sweep. Outlier sweep: {0,10,...,70} percent on
/// fixed-size homography scenes. Superpixel sweep: M in {50,100,...,300}.
/// Cell failures are recorded in-status and do not stop the suite.
std::vector<BenchmarkCell> run_benchmark(const BenchmarkSpec& spec);

std::string benchmark_csv(std::span<const BenchmarkCell> cells);

}  // namespace multifit
