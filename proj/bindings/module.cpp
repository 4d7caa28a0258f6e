#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "multifit/baselines.hpp"
#include "multifit/errors.hpp"
#include "multifit/geometry.hpp"
#include "multifit/match_io.hpp"
#include "multifit/pipeline.hpp"
#include "multifit/slic.hpp"
#include "multifit/synthetic.hpp"

namespace py = pybind11;
using namespace multifit;

namespace {

Image image_from_array(const py::array& array) {
    if (array.ndim() == 3 && array.shape(2) == 3) {
        const auto a = array.cast<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>();
        RgbImage rgb;
        rgb.height = static_cast<int>(a.shape(0));
        rgb.width = static_cast<int>(a.shape(1));
        rgb.data.assign(a.data(), a.data() + a.size());
        return to_lab(rgb);
    }
    if (array.ndim() == 2) {
        const auto a = array.cast<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>();
        RgbImage rgb;
        rgb.height = static_cast<int>(a.shape(0));
        rgb.width = static_cast<int>(a.shape(1));
        rgb.data.resize(static_cast<std::size_t>(a.size()) * 3);
        for (py::ssize_t i = 0; i < a.size(); ++i) {
            rgb.data[3 * i] = rgb.data[3 * i + 1] = rgb.data[3 * i + 2] = a.data()[i];
        }
        return to_lab(rgb);
    }
    throw py::value_error("expected an (H, W, 3) or (H, W) uint8 image array");
}

py::array_t<std::uint8_t> rgb_to_array(const RgbImage& img) {
    py::array_t<std::uint8_t> out({img.height, img.width, 3});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

py::array_t<std::int32_t> labels_to_array(const LabelMap& lm) {
    py::array_t<std::int32_t> out({lm.height, lm.width});
    std::copy(lm.labels.begin(), lm.labels.end(), out.mutable_data());
    return out;
}

ModelParams model_from_matrix(const Mat3& m) { return canonicalize(m); }

}  // namespace

PYBIND11_MODULE(_multifit, m) {
    m.doc() = "Two-view multi-structure model fitting (superpixel-guided "
              "deterministic fitting plus RANSAC/PROSAC baselines)";

    py::register_exception<DegeneracyError>(m, "DegeneracyError");
    py::register_exception<InvalidConfigError>(m, "InvalidConfigError");
    py::register_exception<ParseError>(m, "ParseFileError");
    py::register_exception<NoHypothesesError>(m, "NoHypothesesError");

    py::enum_<ModelKind>(m, "ModelKind")
        .value("homography", ModelKind::Homography)
        .value("fundamental", ModelKind::FundamentalMatrix);

    py::enum_<GroupingView>(m, "GroupingViewKind")
        .value("both", GroupingView::Both)
        .value("view1", GroupingView::View1)
        .value("view2", GroupingView::View2);

    py::class_<Correspondence>(m, "Correspondence")
        .def(py::init([](double x1, double y1, double x2, double y2, double score) {
                 return Correspondence{{x1, y1}, {x2, y2}, score};
             }),
             py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"), py::arg("score") = 0.0)
        .def_property("x1", [](const Correspondence& c) { return c.p1.x; },
                      [](Correspondence& c, double v) { c.p1.x = v; })
        .def_property("y1", [](const Correspondence& c) { return c.p1.y; },
                      [](Correspondence& c, double v) { c.p1.y = v; })
        .def_property("x2", [](const Correspondence& c) { return c.p2.x; },
                      [](Correspondence& c, double v) { c.p2.x = v; })
        .def_property("y2", [](const Correspondence& c) { return c.p2.y; },
                      [](Correspondence& c, double v) { c.p2.y = v; })
        .def_readwrite("score", &Correspondence::score)
        .def("__repr__", [](const Correspondence& c) {
            return "Correspondence(" + std::to_string(c.p1.x) + ", " + std::to_string(c.p1.y) +
                   " -> " + std::to_string(c.p2.x) + ", " + std::to_string(c.p2.y) +
                   ", score=" + std::to_string(c.score) + ")";
        });

    py::class_<SlicConfig>(m, "SlicConfig")
        .def(py::init<>())
        .def_readwrite("num_superpixels", &SlicConfig::num_superpixels)
        .def_readwrite("compactness", &SlicConfig::compactness)
        .def_readwrite("max_iters", &SlicConfig::max_iters);

    py::class_<LabelMap>(m, "LabelMap")
        .def_readonly("width", &LabelMap::width)
        .def_readonly("height", &LabelMap::height)
        .def_readonly("num_labels", &LabelMap::num_labels)
        .def_property_readonly("labels", &labels_to_array);

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("kind", &FitConfig::kind)
        .def_readwrite("inlier_scale", &FitConfig::inlier_scale)
        .def_readwrite("num_structures", &FitConfig::num_structures)
        .def_readwrite("num_superpixels", &FitConfig::num_superpixels)
        .def_readwrite("compactness", &FitConfig::compactness)
        .def_readwrite("m0", &FitConfig::m0)
        .def_readwrite("grouping_view", &FitConfig::grouping_view)
        .def_readwrite("polish", &FitConfig::polish);

    py::class_<Hypothesis>(m, "Hypothesis")
        .def_property_readonly("model", [](const Hypothesis& h) { return h.params.m; })
        .def_readonly("kind", &Hypothesis::kind)
        .def_readonly("sampled_subset", &Hypothesis::sampled_subset)
        .def_readonly("inlier_set", &Hypothesis::inlier_set)
        .def_readonly("gen_index", &Hypothesis::gen_index);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("instances", &FitResult::instances)
        .def_readonly("removed_counts", &FitResult::removed_counts)
        .def_readonly("exhausted_early", &FitResult::exhausted_early)
        .def_readonly("hypotheses_generated", &FitResult::hypotheses_generated)
        .def_readonly("degenerate_subsets", &FitResult::degenerate_subsets)
        .def_readonly("iterations_per_structure", &FitResult::iterations_per_structure)
        .def_property_readonly("total_ms",
                               [](const FitResult& r) { return r.timings.total_ms(); });

    py::class_<BaselineConfig>(m, "BaselineConfig")
        .def(py::init<>())
        .def_readwrite("kind", &BaselineConfig::kind)
        .def_readwrite("inlier_scale", &BaselineConfig::inlier_scale)
        .def_readwrite("confidence", &BaselineConfig::confidence)
        .def_readwrite("max_iters", &BaselineConfig::max_iters)
        .def_readwrite("rng_seed", &BaselineConfig::rng_seed)
        .def_readwrite("num_structures", &BaselineConfig::num_structures);

    py::class_<StructureSpec>(m, "StructureSpec")
        .def(py::init([](const Mat3& model, int inlier_count, int x0, int y0, int x1, int y1) {
                 return StructureSpec{model_from_matrix(model), inlier_count, Box{x0, y0, x1, y1}};
             }),
             py::arg("model"), py::arg("inlier_count"), py::arg("x0"), py::arg("y0"),
             py::arg("x1"), py::arg("y1"));

    py::class_<SceneSpec>(m, "SceneSpec")
        .def(py::init<>())
        .def_readwrite("kind", &SceneSpec::kind)
        .def_readwrite("structures", &SceneSpec::structures)
        .def_readwrite("outlier_count", &SceneSpec::outlier_count)
        .def_readwrite("noise_sigma", &SceneSpec::noise_sigma)
        .def_readwrite("image_width", &SceneSpec::image_width)
        .def_readwrite("image_height", &SceneSpec::image_height)
        .def_readwrite("score_correlation", &SceneSpec::score_correlation)
        .def_readwrite("seed", &SceneSpec::seed);

    py::class_<LabeledScene>(m, "LabeledScene")
        .def_readonly("correspondences", &LabeledScene::correspondences)
        .def_readonly("labels", &LabeledScene::labels)
        .def_readonly("warnings", &LabeledScene::warnings)
        .def_property_readonly("true_models",
                               [](const LabeledScene& s) {
                                   std::vector<Mat3> out;
                                   for (const ModelParams& p : s.true_models) out.push_back(p.m);
                                   return out;
                               })
        .def_property_readonly("image1", [](const LabeledScene& s) { return rgb_to_array(s.rgb1); })
        .def_property_readonly("image2", [](const LabeledScene& s) { return rgb_to_array(s.rgb2); });

    m.def("grid_interval", &grid_interval, py::arg("pixel_count"), py::arg("num_superpixels"),
          "Expected superpixel side length sqrt(N / M)");

    m.def(
        "slic_segment",
        [](const py::array& image, const SlicConfig& cfg) {
            return slic_segment(image_from_array(image), cfg);
        },
        py::arg("image"), py::arg("config") = SlicConfig{},
        "Deterministic SLIC segmentation of an (H, W, 3) or (H, W) uint8 array");

    m.def(
        "fit_homography",
        [](const std::vector<Correspondence>& subset) { return fit_homography(subset).m; },
        py::arg("subset"));

    m.def(
        "fit_fundamental",
        [](const std::vector<Correspondence>& subset) { return fit_fundamental(subset).m; },
        py::arg("subset"));

    m.def(
        "sampson_residual",
        [](const Mat3& model, ModelKind kind, const Correspondence& c) {
            return sampson_residual(model_from_matrix(model), kind, c);
        },
        py::arg("model"), py::arg("kind"), py::arg("correspondence"));

    m.def(
        "sdf_fit",
        [](const py::array& image1, const py::array& image2,
           const std::vector<Correspondence>& correspondences, const FitConfig& cfg) {
            return sdf_fit(image_from_array(image1), image_from_array(image2), correspondences,
                           cfg);
        },
        py::arg("image1"), py::arg("image2"), py::arg("correspondences"), py::arg("config"),
        "Superpixel-guided deterministic fit of T model instances");

    m.def("ransac_fit",
          [](const std::vector<Correspondence>& c, const BaselineConfig& cfg) {
              return ransac_fit(c, cfg);
          },
          py::arg("correspondences"), py::arg("config"));

    m.def("prosac_fit",
          [](const std::vector<Correspondence>& c, const BaselineConfig& cfg) {
              return prosac_fit(c, cfg);
          },
          py::arg("correspondences"), py::arg("config"));

    m.def("generate_scene", &generate_scene, py::arg("spec"));

    m.def("fundamental_from_cameras",
          [](const Mat3& k1, const Mat3& r, const Eigen::Vector3d& t, const Mat3& k2) {
              return fundamental_from_cameras(k1, r, t, k2).m;
          },
          py::arg("k1"), py::arg("r"), py::arg("t"), py::arg("k2"));

    m.def("oracle_inlier_count",
          [](const Mat3& model, ModelKind kind, const std::vector<Correspondence>& c,
             double scale) { return oracle_inlier_count(model_from_matrix(model), kind, c, scale); },
          py::arg("model"), py::arg("kind"), py::arg("correspondences"), py::arg("scale"));

    m.def("load_matches", &load_matches, py::arg("path"));
    m.def("save_matches",
          [](const std::filesystem::path& path, const std::vector<Correspondence>& matches) {
              save_matches(path, matches);
          },
          py::arg("path"), py::arg("matches"));

    m.attr("__version__") = "0.1.0";
}
