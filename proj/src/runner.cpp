#include "multifit/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "multifit/errors.hpp"
#include "multifit/image_io.hpp"
#include "multifit/match_io.hpp"

namespace multifit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

FitConfig sdf_config(const RunArgs& args) {
    FitConfig cfg;
    cfg.kind = args.kind;
    cfg.inlier_scale = args.inlier_scale;
    cfg.num_structures = args.num_structures;
    cfg.num_superpixels = args.superpixels;
    cfg.compactness = args.compactness;
    cfg.m0 = args.m0;
    cfg.grouping_view = parse_grouping_view(args.grouping_view);
    return cfg;
}

BaselineConfig baseline_config(const RunArgs& args) {
    BaselineConfig cfg;
    cfg.kind = args.kind;
    cfg.inlier_scale = args.inlier_scale;
    cfg.confidence = args.confidence;
    cfg.max_iters = args.max_iters;
    cfg.rng_seed = args.seed;
    cfg.num_structures = args.num_structures;
    return cfg;
}

}  // namespace

GroupingView parse_grouping_view(const std::string& name) {
    if (name == "both") return GroupingView::Both;
    if (name == "view1") return GroupingView::View1;
    if (name == "view2") return GroupingView::View2;
    throw UsageError("unknown grouping view '" + name + "', expected both, view1 or view2");
}

RunReport run_fit(const RunArgs& args) {
    if (args.method != "sdf" && args.method != "ransac" && args.method != "prosac") {
        throw UsageError("unknown method '" + args.method + "', expected sdf, ransac or prosac");
    }
    if (args.matches.empty()) {
        throw UsageError("--matches is required");
    }
    if (args.method == "sdf" && (!args.image1 || !args.image2)) {
        throw UsageError("method sdf requires --image1 and --image2");
    }
    if (args.format != "json" && args.format != "csv") {
        throw UsageError("unknown format '" + args.format + "', expected json or csv");
    }

    const auto t0 = Clock::now();
    const std::vector<Correspondence> matches = load_matches(args.matches);
    const auto labels_opt = load_labels_for(args.matches, args.labels, matches.size());
    const std::vector<int> labels = labels_opt.value_or(std::vector<int>{});

    RunReport report;
    report.method = args.method;
    report.model = model_kind_name(args.kind);
    report.dataset = args.matches.string();
    report.inlier_scale = args.inlier_scale;
    report.num_structures = args.num_structures;

    FitResult result;
    if (args.method == "sdf") {
        const FitConfig cfg = sdf_config(args);
        report.superpixels = cfg.num_superpixels;
        report.compactness = cfg.compactness;
        report.m0 = cfg.subset_size();
        report.grouping_view = args.grouping_view;
        const Image image1 = to_lab(load_image(*args.image1));
        const Image image2 = to_lab(load_image(*args.image2));
        result = sdf_fit(image1, image2, matches, cfg);
    } else {
        const BaselineConfig cfg = baseline_config(args);
        report.seed = cfg.rng_seed;
        report.confidence = cfg.confidence;
        report.max_iters = cfg.max_iters;
        result = args.method == "ransac" ? ransac_fit(matches, cfg) : prosac_fit(matches, cfg);
    }

    fill_instances(report, result, matches, labels);
    report.timings = result.timings;
    report.total_ms = ms_since(t0);
    return report;
}

void write_report(const RunReport& report, const RunArgs& args) {
    std::string text;
    if (args.format == "csv") {
        text = report_csv_header() + "\n" + report_csv_row(report) + "\n";
    } else {
        text = report_to_json(report).dump(2) + "\n";
    }
    if (args.out) {
        std::ofstream out(*args.out);
        if (!out) throw Error("cannot open output file " + args.out->string());
        out << text;
    } else {
        std::cout << text;
    }
}

std::filesystem::path write_scene_bundle(const LabeledScene& scene,
                                         const std::filesystem::path& prefix) {
    std::filesystem::path image1 = prefix;
    image1 += ".image1.ppm";
    std::filesystem::path image2 = prefix;
    image2 += ".image2.ppm";
    std::filesystem::path matches = prefix;
    matches += ".matches";
    std::filesystem::path labels = matches;
    labels += ".labels";

    save_image_ppm(image1, scene.rgb1);
    save_image_ppm(image2, scene.rgb2);
    save_matches(matches, scene.correspondences);
    save_labels(labels, scene.labels);
    return matches;
}

namespace {

/// Mild similarity transform that keeps the benchmark region inside the
/// second view.
Mat3 benchmark_homography() {
    const double angle = 2.0 * 3.14159265358979323846 / 180.0;
    const double scale = 0.95;
    Mat3 h;
    h << scale * std::cos(angle), -scale * std::sin(angle), 14.0,
         scale * std::sin(angle), scale * std::cos(angle), 9.0,
         0.0, 0.0, 1.0;
    return h;
}

/// One plane whose span roughly matches the combined-group sampling window
/// (2S), so the local subset fits generalize across the whole structure and
/// the sweep measures parameters, not scene issues. The superpixel sweep
/// conditions the span on its largest M.
SceneSpec benchmark_scene(const BenchmarkSpec& spec, int inliers, int outliers,
                          std::uint64_t seed, int max_superpixels) {
    SceneSpec scene;
    scene.kind = ModelKind::Homography;
    scene.image_width = spec.image_width;
    scene.image_height = spec.image_height;
    scene.noise_sigma = spec.noise_sigma;
    scene.seed = seed;
    StructureSpec structure;
    structure.model = canonicalize(benchmark_homography());
    structure.inlier_count = inliers;
    const double window = 2.0 * std::sqrt(static_cast<double>(spec.image_width) *
                                          spec.image_height / max_superpixels);
    const int half_span = std::min({static_cast<int>(window * 0.6),
                                    spec.image_width / 3, spec.image_height / 3});
    const int cx = spec.image_width / 2, cy = spec.image_height / 2;
    structure.region = Box{cx - half_span, cy - half_span, cx + half_span - 1, cy + half_span - 1};
    scene.structures.push_back(structure);
    scene.outlier_count = outliers;
    return scene;
}

double mean_gt_error(const FitResult& result, const LabeledScene& scene) {
    RunReport scratch;
    fill_instances(scratch, result, scene.correspondences, scene.labels);
    double sum = 0.0;
    int n = 0;
    for (const InstanceReport& inst : scratch.instances) {
        if (inst.mean_sampson_gt) {
            sum += *inst.mean_sampson_gt;
            ++n;
        }
    }
    if (n == 0) throw Error("no instance matched a ground-truth structure");
    return sum / n;
}

BenchmarkCell run_cell(const std::string& sweep, const std::string& method, double param,
                       const LabeledScene& scene, const BenchmarkSpec& spec, int superpixels) {
    BenchmarkCell cell;
    cell.sweep = sweep;
    cell.method = method;
    cell.param = param;
    cell.status = "ok";
    try {
        std::vector<double> times;
        double error_sum = 0.0;
        for (int rep = 0; rep < spec.repeats; ++rep) {
            const auto t0 = Clock::now();
            FitResult result;
            if (method == "sdf") {
                FitConfig cfg;
                cfg.kind = spec.kind;
                cfg.inlier_scale = spec.inlier_scale;
                cfg.num_structures = 1;
                cfg.num_superpixels = superpixels;
                cfg.m0 = spec.m0;
                result = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
            } else {
                BaselineConfig cfg;
                cfg.kind = spec.kind;
                cfg.inlier_scale = spec.inlier_scale;
                cfg.rng_seed = spec.seed + rep;
                cfg.num_structures = 1;
                result = method == "ransac" ? ransac_fit(scene.correspondences, cfg)
                                            : prosac_fit(scene.correspondences, cfg);
            }
            times.push_back(ms_since(t0));
            error_sum += mean_gt_error(result, scene);
        }
        std::sort(times.begin(), times.end());
        cell.median_ms = times[times.size() / 2];
        cell.mean_error = error_sum / spec.repeats;
    } catch (const std::exception& e) {
        cell.status = e.what();
    }
    return cell;
}

}  // namespace

std::vector<BenchmarkCell> run_benchmark(const BenchmarkSpec& spec) {
    std::vector<BenchmarkCell> cells;
    if (spec.suite == BenchmarkSpec::Suite::OutlierSweep) {
        for (int percent = 0; percent <= 70; percent += 10) {
            const int outliers = spec.total_matches * percent / 100;
            const int inliers = spec.total_matches - outliers;
            const LabeledScene scene =
                generate_scene(benchmark_scene(spec, inliers, outliers, spec.seed + percent, 150));
            for (const std::string& method : spec.methods) {
                cells.push_back(
                    run_cell("outlier_percent", method, percent, scene, spec, 150));
            }
        }
    } else {
        const int inliers = spec.total_matches * 55 / 100;
        const int outliers = spec.total_matches - inliers;
        const LabeledScene scene =
            generate_scene(benchmark_scene(spec, inliers, outliers, spec.seed, 300));
        for (int m = 50; m <= 300; m += 50) {
            for (const std::string& method : spec.methods) {
                cells.push_back(run_cell("superpixels", method, m, scene, spec, m));
            }
        }
    }
    return cells;
}

std::string benchmark_csv(std::span<const BenchmarkCell> cells) {
    std::ostringstream os;
    os << "sweep,method,param,mean_error,median_ms,status\n";
    for (const BenchmarkCell& cell : cells) {
        std::string status = cell.status;
        std::replace(status.begin(), status.end(), ',', ';');
        os << cell.sweep << ',' << cell.method << ',' << cell.param << ',' << cell.mean_error
           << ',' << cell.median_ms << ',' << status << "\n";
    }
    return os.str();
}

}  // namespace multifit
