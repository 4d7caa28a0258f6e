#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "multifit/errors.hpp"
#include "multifit/runner.hpp"
#include "multifit/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitNoHypotheses = 4;
constexpr int kExitInternal = 5;

multifit::ModelKind model_from_name(const std::string& name) {
    if (name == "homography") return multifit::ModelKind::Homography;
    if (name == "fundamental") return multifit::ModelKind::FundamentalMatrix;
    throw multifit::UsageError("unknown model '" + name + "'");
}

struct GenOptions {
    std::string model = "homography";
    std::string out_prefix;
    int structures = 1;
    int inliers_per_structure = 120;
    int outliers = 100;
    double noise = 1.0;
    int width = 640;
    int height = 480;
    double score_correlation = 0.8;
    std::uint64_t seed = 0;
};

/// Lays out up to four structure regions side by side and gives each a
/// mild, distinct true model so the scene is recoverable by construction.
multifit::SceneSpec build_gen_spec(const GenOptions& gen) {
    using multifit::Mat3;
    multifit::SceneSpec spec;
    spec.kind = model_from_name(gen.model);
    spec.image_width = gen.width;
    spec.image_height = gen.height;
    spec.outlier_count = gen.outliers;
    spec.noise_sigma = gen.noise;
    spec.score_correlation = gen.score_correlation;
    spec.seed = gen.seed;

    const int n = std::clamp(gen.structures, 1, 4);
    const int margin = gen.width / 12;
    const int slot = (gen.width - margin * (n + 1)) / n;
    // Patches stay close to the default sampling window so the subsets
    // fitted inside one combined group generalize across the structure.
    const int span = std::min({slot, gen.height * 3 / 5, 160});
    for (int k = 0; k < n; ++k) {
        multifit::StructureSpec s;
        const int x0 = margin + k * (slot + margin) + (slot - span) / 2;
        const int y0 = (gen.height - span) / 2;
        s.region = multifit::Box{x0, y0, x0 + span - 1, y0 + span - 1};
        if (spec.kind == multifit::ModelKind::Homography) {
            const double angle = (2.0 + 3.0 * k) * 3.14159265358979323846 / 180.0;
            const double scale = 0.95 - 0.05 * k;
            Mat3 h;
            h << scale * std::cos(angle), -scale * std::sin(angle), 10.0 + 6.0 * k,
                 scale * std::sin(angle), scale * std::cos(angle), 8.0 - 3.0 * k,
                 0.0, 0.0, 1.0;
            s.model = multifit::canonicalize(h);
        } else {
            Mat3 intrinsics;
            const double focal = 0.9 * gen.width;
            intrinsics << focal, 0.0, gen.width / 2.0,
                          0.0, focal, gen.height / 2.0,
                          0.0, 0.0, 1.0;
            const double a = (2.0 + 2.0 * k) * 3.14159265358979323846 / 180.0;
            Mat3 rot;
            rot << std::cos(a), 0.0, std::sin(a),
                   0.0, 1.0, 0.0,
                   -std::sin(a), 0.0, std::cos(a);
            const Eigen::Vector3d baseline(0.3 + 0.1 * k, 0.05, 0.02);
            s.model = multifit::fundamental_from_cameras(intrinsics, rot, baseline, intrinsics);
        }
        s.inlier_count = gen.inliers_per_structure;
        spec.structures.push_back(s);
    }
    return spec;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Two-view multi-structure model fitting: superpixel-guided "
                 "deterministic fitting plus RANSAC/PROSAC baselines"};
    app.require_subcommand(0, 1);

    multifit::RunArgs args;
    std::string model_name = "homography";
    std::string image1, image2, matches, labels, out;

    app.add_option("--method", args.method, "Fitting method: sdf | ransac | prosac");
    app.add_option("--model", model_name, "Model: homography | fundamental");
    app.add_option("--image1", image1, "View-1 image (PGM/PPM), required for sdf");
    app.add_option("--image2", image2, "View-2 image (PGM/PPM), required for sdf");
    app.add_option("--matches", matches, "Correspondence file (MULTIFIT-MATCHES v1)");
    app.add_option("--labels", labels, "Ground-truth label sidecar");
    app.add_option("--inlier-scale", args.inlier_scale, "Sampson inlier threshold in pixels");
    app.add_option("--num-structures", args.num_structures, "Number of model instances T");
    app.add_option("--superpixels", args.superpixels, "Requested superpixel count M");
    app.add_option("--compactness", args.compactness, "SLIC compactness");
    app.add_option("--m0", args.m0, "Sampled subset size (default p+2)");
    app.add_option("--grouping-view", args.grouping_view, "Grouping views: both | view1 | view2");
    app.add_option("--seed", args.seed, "RNG seed for the baselines");
    app.add_option("--confidence", args.confidence, "Baseline stopping confidence");
    app.add_option("--max-iters", args.max_iters, "Baseline iteration cap");
    app.add_option("--out", out, "Output path (default stdout)");
    app.add_option("--format", args.format, "Report format: json | csv");

    auto* bench = app.add_subcommand("benchmark", "Run a built-in parameter sweep");
    std::string suite = "outliers";
    std::string bench_model = "homography";
    std::vector<std::string> bench_methods;
    std::string bench_out;
    std::uint64_t bench_seed = 7;
    int bench_repeats = 5;
    int bench_m0 = 0;
    bench->add_option("--suite", suite, "Sweep: outliers | superpixels");
    bench->add_option("--model", bench_model, "Model: homography | fundamental");
    bench->add_option("--methods", bench_methods,
                      "Methods to run (default: sdf,ransac for outliers; sdf for superpixels)")
        ->delimiter(',');
    bench->add_option("--seed", bench_seed, "Scene seed");
    bench->add_option("--repeats", bench_repeats, "Timing repeats per cell (median is reported)");
    bench->add_option("--m0", bench_m0, "Sampled subset size for sdf cells (default p+2)");
    bench->add_option("--out", bench_out, "CSV output path (default stdout)");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic scene bundle");
    GenOptions gen_opts;
    gen->add_option("--model", gen_opts.model, "Model: homography | fundamental");
    gen->add_option("--out-prefix", gen_opts.out_prefix, "Output path prefix")->required();
    gen->add_option("--structures", gen_opts.structures, "Structure count (1..4)");
    gen->add_option("--inliers", gen_opts.inliers_per_structure, "Inliers per structure");
    gen->add_option("--outliers", gen_opts.outliers, "Outlier count");
    gen->add_option("--noise", gen_opts.noise, "Noise sigma in pixels");
    gen->add_option("--width", gen_opts.width, "Image width");
    gen->add_option("--height", gen_opts.height, "Image height");
    gen->add_option("--score-correlation", gen_opts.score_correlation,
                    "Correlation between score and inlierhood");
    gen->add_option("--seed", gen_opts.seed, "Scene seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (bench->parsed()) {
        multifit::BenchmarkSpec spec;
        if (suite == "outliers") {
            spec.suite = multifit::BenchmarkSpec::Suite::OutlierSweep;
        } else if (suite == "superpixels") {
            spec.suite = multifit::BenchmarkSpec::Suite::SuperpixelSweep;
            spec.methods = {"sdf"};
        } else {
            throw multifit::UsageError("unknown suite '" + suite + "'");
        }
        spec.kind = model_from_name(bench_model);
        if (!bench_methods.empty()) spec.methods = bench_methods;
        spec.seed = bench_seed;
        spec.repeats = bench_repeats;
        spec.m0 = bench_m0;
        const auto cells = multifit::run_benchmark(spec);
        const std::string csv = multifit::benchmark_csv(cells);
        if (bench_out.empty()) {
            std::cout << csv;
        } else {
            std::ofstream f(bench_out);
            if (!f) throw multifit::Error("cannot open " + bench_out);
            f << csv;
        }
        return kExitOk;
    }

    if (gen->parsed()) {
        const multifit::LabeledScene scene = multifit::generate_scene(build_gen_spec(gen_opts));
        const auto matches_path = multifit::write_scene_bundle(scene, gen_opts.out_prefix);
        std::cout << "wrote " << matches_path.string() << " (+ images, labels)\n";
        for (const std::string& w : scene.warnings) std::cerr << "warning: " << w << "\n";
        return kExitOk;
    }

    if (args.method.empty()) {
        throw multifit::UsageError("--method is required (or use a subcommand); see --help");
    }
    args.kind = model_from_name(model_name);
    if (!image1.empty()) args.image1 = image1;
    if (!image2.empty()) args.image2 = image2;
    args.matches = matches;
    if (!labels.empty()) args.labels = labels;
    if (!out.empty()) args.out = out;

    const multifit::RunReport report = multifit::run_fit(args);
    multifit::write_report(report, args);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const multifit::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const multifit::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const multifit::NoHypothesesError& e) {
        std::cerr << "no hypotheses: " << e.what() << "\n";
        return kExitNoHypotheses;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
