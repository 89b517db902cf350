#include "statfuse/classifiers.hpp"
#include "statfuse/error.hpp"
#include "statfuse/fusion.hpp"
#include "statfuse/glcm.hpp"
#include "statfuse/image.hpp"
#include "statfuse/indicators.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace statfuse;

namespace {

ImageRgb image_from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3) {
        throw InputError("DimensionMismatch", "image array must have shape (height, width, 3)");
    }
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    std::vector<std::uint8_t> data(arr.data(), arr.data() + arr.size());
    return ImageRgb(w, h, std::move(data));
}

py::array_t<std::uint8_t> image_to_array(const ImageRgb& img) {
    py::array_t<std::uint8_t> arr({img.height, img.width, 3});
    std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
    return arr;
}

GreyGrid grid_from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) {
        throw InputError("DimensionMismatch", "grid array must have shape (height, width)");
    }
    GreyGrid grid;
    grid.height = static_cast<int>(arr.shape(0));
    grid.width = static_cast<int>(arr.shape(1));
    grid.levels.assign(arr.data(), arr.data() + arr.size());
    return grid;
}

std::vector<std::string> default_labels(int num_classes) {
    std::vector<std::string> labels;
    for (int c = 0; c < num_classes; ++c) labels.push_back("class_" + std::to_string(c));
    return labels;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral and GLCM-textural image indicators, probabilistic classifiers "
              "and CNN probability fusion";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("indicator_names", [] { return indicator_names(); },
          "Canonical ordered names of the 54 indicators.");

    m.def(
        "load_image",
        [](const std::string& path) { return image_to_array(load_image(path)); },
        py::arg("path"), "Decode a PNG or JPEG file to an (h, w, 3) uint8 array.");

    m.def(
        "decode_image",
        [](const py::bytes& data) {
            const std::string buf = data;
            return image_to_array(decode_image(
                {reinterpret_cast<const std::uint8_t*>(buf.data()), buf.size()}));
        },
        py::arg("data"), "Decode PNG or JPEG bytes to an (h, w, 3) uint8 array.");

    m.def(
        "resize_bilinear",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image,
           int side) { return image_to_array(resize_bilinear(image_from_array(image), side)); },
        py::arg("image"), py::arg("side"),
        "Square bilinear resize with half-pixel centers and round-to-nearest.");

    m.def(
        "quantize_channel",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image,
           int channel, int levels) {
            const GreyGrid grid = quantize_channel(image_from_array(image), channel, levels);
            py::array_t<std::uint8_t> arr({grid.height, grid.width});
            std::copy(grid.levels.begin(), grid.levels.end(), arr.mutable_data());
            return arr;
        },
        py::arg("image"), py::arg("channel"), py::arg("levels"),
        "Quantize one channel to floor(pixel * levels / 256).");

    m.def(
        "build_glcm",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& grid,
           int levels) {
            const Glcm g = build_glcm(grid_from_array(grid), levels);
            py::array_t<double> arr({levels, levels});
            std::copy(g.p.begin(), g.p.end(), arr.mutable_data());
            return arr;
        },
        py::arg("grid"), py::arg("levels"),
        "Symmetric normalized co-occurrence matrix over horizontal neighbours.");

    m.def(
        "textural_features",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& probs) {
            if (probs.ndim() != 2 || probs.shape(0) != probs.shape(1)) {
                throw InputError("DimensionMismatch", "GLCM must be a square matrix");
            }
            const int levels = static_cast<int>(probs.shape(0));
            std::vector<double> p(probs.data(), probs.data() + probs.size());
            const TexturalFeatures f =
                textural_features(Glcm::from_probabilities(std::move(p), levels));
            py::dict out;
            out["average"] = f.average;
            out["variance"] = f.variance;
            out["homogeneity"] = f.homogeneity;
            out["contrast"] = f.contrast;
            out["dissimilarity"] = f.dissimilarity;
            out["entropy"] = f.entropy;
            out["second_moment"] = f.second_moment;
            out["correlation"] = f.correlation;
            return out;
        },
        py::arg("glcm"), "The eight textural features of a normalized GLCM.");

    m.def(
        "extract_indicators",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image,
           int levels, bool resize, int side) {
            const IndicatorConfig cfg{levels, resize, side};
            const IndicatorVector v = extract_indicators(image_from_array(image), cfg);
            py::array_t<double> arr(kIndicatorCount);
            std::copy(v.values.begin(), v.values.end(), arr.mutable_data());
            return arr;
        },
        py::arg("image"), py::arg("levels") = 32, py::arg("resize") = true,
        py::arg("side") = 224, "All 54 indicators of one image, in canonical order.");

    m.def("fuse_average", &fuse_average, py::arg("p_cnn"), py::arg("p_feat"),
          "Elementwise mean of two probability vectors.");

    m.def("weighted_precision", &weighted_precision, py::arg("y_true"), py::arg("y_pred"),
          py::arg("num_classes"),
          "Support-weighted mean per-class precision (never-predicted classes score 0).");

    py::class_<Classifier>(m, "Classifier")
        .def_property_readonly("kind", &Classifier::kind)
        .def_property_readonly("labels", &Classifier::labels)
        .def("predict_proba", &Classifier::predict_proba, py::arg("X"))
        .def("predict", &Classifier::predict, py::arg("X"))
        .def("save", [](const Classifier& self, const std::string& path) {
            save_classifier(self, path);
        });

    m.def(
        "train_classifier",
        [](const std::string& kind, const Eigen::MatrixXd& X, const std::vector<int>& y,
           std::optional<std::vector<std::string>> label_names, std::uint64_t seed, int knn_k,
           double logreg_penalty, int rf_trees) {
            Hyperparams hp;
            hp.knn_k = knn_k;
            hp.logreg_penalty = logreg_penalty;
            hp.rf_trees = rf_trees;
            int num_classes = 0;
            for (int label : y) num_classes = std::max(num_classes, label + 1);
            return train_classifier(kind, X, y,
                                    label_names ? *label_names : default_labels(num_classes),
                                    hp, seed);
        },
        py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("label_names") = std::nullopt,
        py::arg("seed") = 0, py::arg("knn_k") = 5, py::arg("logreg_penalty") = 1.0,
        py::arg("rf_trees") = 500,
        "Train one of {knn, lda, logreg, rf} on an (n, d) matrix and class indices.");

    m.def("load_classifier", &load_classifier, py::arg("path"));
}
