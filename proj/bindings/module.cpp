#include <cstring>
#include <optional>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lungpipe/dataset.hpp"
#include "lungpipe/errors.hpp"
#include "lungpipe/eval.hpp"
#include "lungpipe/features.hpp"
#include "lungpipe/model.hpp"
#include "lungpipe/phantom.hpp"
#include "lungpipe/prep.hpp"
#include "lungpipe/segment.hpp"

namespace py = pybind11;
using namespace lungpipe;

namespace {

using u16_array = py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>;
using bool_array = py::array_t<bool, py::array::c_style | py::array::forcecast>;

GrayImage image_from_array(const u16_array& arr) {
    if (arr.ndim() != 2)
        throw argument_error("expected a 2-D uint16 image array");
    GrayImage img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    std::memcpy(img.pixels.data(), arr.data(), img.pixels.size() * sizeof(std::uint16_t));
    return img;
}

py::array_t<std::uint16_t> image_to_array(const GrayImage& img) {
    py::array_t<std::uint16_t> arr({img.height, img.width});
    std::memcpy(arr.mutable_data(), img.pixels.data(), img.pixels.size() * sizeof(std::uint16_t));
    return arr;
}

BinaryMask mask_from_array(const bool_array& arr) {
    if (arr.ndim() != 2)
        throw argument_error("expected a 2-D boolean mask array");
    BinaryMask mask(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    const bool* src = arr.data();
    for (std::size_t i = 0; i < mask.pixels.size(); ++i)
        mask.pixels[i] = src[i] ? 1 : 0;
    return mask;
}

py::array_t<bool> mask_to_array(const BinaryMask& mask) {
    py::array_t<bool> arr({mask.height, mask.width});
    bool* dst = arr.mutable_data();
    for (std::size_t i = 0; i < mask.pixels.size(); ++i)
        dst[i] = mask.pixels[i] != 0;
    return arr;
}

py::dict record_to_dict(const FeatureRecord& rec) {
    py::dict d;
    d["id"] = rec.id;
    d["area"] = rec.area;
    d["perimeter"] = rec.perimeter;
    d["stddev"] = rec.stddev;
    d["skewness"] = rec.skewness ? py::object(py::float_(*rec.skewness)) : py::none();
    d["kurtosis"] = rec.kurtosis ? py::object(py::float_(*rec.kurtosis)) : py::none();
    d["entropy"] = rec.entropy;
    if (rec.label)
        d["label"] = *rec.label;
    return d;
}

FeatureRecord record_from_dict(const py::dict& d) {
    FeatureRecord rec;
    rec.id = d.contains("id") ? d["id"].cast<std::string>() : "row";
    rec.area = d["area"].cast<double>();
    rec.perimeter = d["perimeter"].cast<double>();
    rec.stddev = d["stddev"].cast<double>();
    if (d.contains("skewness") && !d["skewness"].is_none())
        rec.skewness = d["skewness"].cast<double>();
    if (d.contains("kurtosis") && !d["kurtosis"].is_none())
        rec.kurtosis = d["kurtosis"].cast<double>();
    rec.entropy = d["entropy"].cast<double>();
    return rec;
}

} // namespace

PYBIND11_MODULE(_lungpipe, m) {
    m.doc() = "lung CT analysis pipeline core";

    py::register_exception<argument_error>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<format_error>(m, "FormatError", PyExc_ValueError);
    py::register_exception<segmentation_error>(m, "SegmentationError", PyExc_RuntimeError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

    m.def(
        "median_filter",
        [](const u16_array& arr, int rows, int cols) {
            return image_to_array(median_filter(image_from_array(arr), {rows, cols}));
        },
        py::arg("image"), py::arg("rows") = 3, py::arg("cols") = 3);

    m.def(
        "equalize_histogram",
        [](const u16_array& arr, int levels) {
            return image_to_array(equalize_histogram(image_from_array(arr), levels));
        },
        py::arg("image"), py::arg("levels") = 256);

    m.def(
        "otsu_threshold", [](const u16_array& arr) { return otsu_threshold(image_from_array(arr)); },
        py::arg("image"));

    m.def(
        "sobel_gradient",
        [](const u16_array& arr) {
            const GradientImage grad = sobel_gradient(image_from_array(arr));
            py::array_t<double> out({grad.height, grad.width});
            std::memcpy(out.mutable_data(), grad.magnitudes.data(),
                        grad.magnitudes.size() * sizeof(double));
            return out;
        },
        py::arg("image"));

    m.def(
        "segment_lungs",
        [](const u16_array& arr, double dilate_radius) {
            SegmentOptions opts;
            opts.dilate_radius = dilate_radius;
            return mask_to_array(segment_lungs(image_from_array(arr), opts));
        },
        py::arg("image"), py::arg("dilate_radius") = 10.0);

    m.def(
        "dice",
        [](const bool_array& a, const bool_array& b) {
            return dice_coefficient(mask_from_array(a), mask_from_array(b));
        },
        py::arg("mask_a"), py::arg("mask_b"));

    m.def(
        "extract_features",
        [](const u16_array& image, const bool_array& mask, const std::string& id, int bins) {
            return record_to_dict(
                extract_features(image_from_array(image), mask_from_array(mask), id, bins));
        },
        py::arg("image"), py::arg("mask"), py::arg("id") = "region", py::arg("bins") = 256);

    m.def(
        "phantom_suite",
        [](int count, std::uint64_t seed) {
            py::list out;
            for (const auto& spec : phantom_suite(count, seed)) {
                const Phantom ph = generate_phantom(spec);
                py::dict d;
                d["image"] = image_to_array(ph.image);
                d["lung_mask"] = mask_to_array(ph.lung_mask);
                d["nodule_mask"] = mask_to_array(ph.nodule_mask);
                d["label"] = spec.nodules.empty() ? 0 : 1;
                out.append(d);
            }
            return out;
        },
        py::arg("count") = 20, py::arg("seed") = 7);

    py::class_<TrainedModel>(m, "Model")
        .def_property_readonly("kind", [](const TrainedModel& m_) { return m_.kind; })
        .def_property_readonly("predictors",
                               [](const TrainedModel& m_) { return m_.predictors; })
        .def(
            "predict",
            [](const TrainedModel& m_, const py::dict& row) {
                return model_predict_record(m_, record_from_dict(row));
            },
            py::arg("features"))
        .def(
            "save", [](const TrainedModel& m_, const std::string& path) { save_model_json(m_, path); },
            py::arg("path"))
        .def_static(
            "load", [](const std::string& path) { return load_model_json(path); }, py::arg("path"));

    m.def(
        "train",
        [](const std::string& features_csv, const std::string& kind, const std::string& predictors,
           std::uint64_t seed) {
            TrainOptions opts;
            opts.seed = seed;
            const auto& preds = predictors == "three" ? three_predictors() : all_predictors();
            if (predictors != "all" && predictors != "three")
                throw argument_error("predictors must be 'all' or 'three'");
            return train_model(kind, load_feature_csv(features_csv), preds, opts);
        },
        py::arg("features_csv"), py::arg("kind"), py::arg("predictors") = "all",
        py::arg("seed") = 17);

    m.def(
        "evaluate",
        [](const TrainedModel& model, const std::string& features_csv) {
            const auto [cm, acc] = evaluate(model, load_feature_csv(features_csv));
            py::dict d;
            d["accuracy"] = acc;
            d["tp"] = cm.tp;
            d["fp"] = cm.fp;
            d["tn"] = cm.tn;
            d["fn"] = cm.fn;
            return d;
        },
        py::arg("model"), py::arg("features_csv"));

    m.attr("MODEL_KINDS") = model_kinds();
    m.attr("ALL_PREDICTORS") = all_predictors();
    m.attr("THREE_PREDICTORS") = three_predictors();
}
