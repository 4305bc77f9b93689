#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "refsynth/config.hpp"
#include "refsynth/evaluation.hpp"
#include "refsynth/integrator.hpp"
#include "refsynth/io.hpp"
#include "refsynth/pipeline.hpp"

namespace py = pybind11;
using namespace refsynth;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) float array -> Image.
Image to_image(const FloatArray &a)
{
    if (a.ndim() != 2 && a.ndim() != 3)
        throw std::invalid_argument("expected an array of shape (H, W) or (H, W, C)");
    const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
    Image img(w, h, c);
    std::copy(a.data(), a.data() + a.size(), img.data().begin());
    return img;
}

FloatArray to_array(const Image &img)
{
    std::vector<py::ssize_t> shape = {img.height(), img.width()};
    if (img.channels() != 1)
        shape.push_back(img.channels());
    FloatArray out(shape);
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

py::object json_to_py(const nlohmann::json &j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object &o)
{
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

template <typename T>
T from_dict(const py::object &o)
{
    return o.is_none() ? T{} : py_to_json(o).get<T>();
}

SceneParams scene_from_dict(const py::object &glass, const py::object &lens, const py::object &scene)
{
    SceneParams p;
    p.glass = from_dict<GlassSpec>(glass);
    p.lens = from_dict<LensSpec>(lens);
    if (!scene.is_none())
        scene_params_from_json(py_to_json(scene), p);
    return p;
}

DepthImage depth_image(const FloatArray &rgb, const FloatArray &depth, double hfov)
{
    DepthImage img{to_image(rgb), to_image(depth), hfov};
    img.validate();
    return img;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Physically based reflection tuple synthesis";

    m.def("fresnel_dielectric", &fresnel_dielectric, py::arg("cos_theta_i"), py::arg("eta"));
    m.def(
        "beer_lambert",
        [](std::array<double, 3> absorption, double distance) {
            const Color c = beer_lambert({absorption[0], absorption[1], absorption[2]}, distance);
            return std::array<double, 3>{c.r, c.g, c.b};
        },
        py::arg("absorption"), py::arg("distance"));

    m.def(
        "interact_slab",
        [](std::array<double, 3> origin, std::array<double, 3> direction, const py::object &glass, int max_orders) {
            Ray ray;
            ray.origin = {origin[0], origin[1], origin[2]};
            ray.direction = normalize(Vec3(direction[0], direction[1], direction[2]));
            py::list out;
            for (const auto &e : interact_slab(ray, from_dict<GlassSpec>(glass), max_orders).exit_rays) {
                py::dict d;
                d["side"] = e.side == SlabSide::Reflect ? "reflect" : "transmit";
                d["order"] = e.order;
                d["origin"] = std::array<double, 3>{e.ray.origin.x, e.ray.origin.y, e.ray.origin.z};
                d["direction"] = std::array<double, 3>{e.ray.direction.x, e.ray.direction.y, e.ray.direction.z};
                d["weight"] = std::array<double, 3>{e.weight.r, e.weight.g, e.weight.b};
                d["path_length"] = e.path_length_in_glass;
                out.append(d);
            }
            return out;
        },
        py::arg("origin"), py::arg("direction"), py::arg("glass") = py::none(), py::arg("max_orders") = kDefaultMaxOrders);

    m.def(
        "build_heightfield",
        [](const FloatArray &rgb, const FloatArray &depth, double hfov_deg, double split_threshold) {
            const HeightfieldMesh mesh = build_heightfield(depth_image(rgb, depth, hfov_deg), split_threshold);
            py::array_t<double> vertices({static_cast<py::ssize_t>(mesh.vertices.size()), py::ssize_t{3}});
            auto v = vertices.mutable_unchecked<2>();
            for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
                for (int k = 0; k < 3; ++k)
                    v(i, k) = mesh.vertices[i][k];
            py::array_t<std::uint32_t> triangles({static_cast<py::ssize_t>(mesh.triangles.size()), py::ssize_t{3}});
            auto t = triangles.mutable_unchecked<2>();
            for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
                for (int k = 0; k < 3; ++k)
                    t(i, k) = mesh.triangles[i][k];
            return py::make_tuple(vertices, triangles);
        },
        py::arg("rgb"), py::arg("depth"), py::arg("hfov_deg"), py::arg("split_threshold") = kDefaultSplitThreshold);

    m.def(
        "render_tuple",
        [](const FloatArray &front_rgb, const FloatArray &front_depth, const FloatArray &back_rgb,
           const FloatArray &back_depth, std::optional<double> front_hfov, std::optional<double> back_hfov,
           const py::object &glass, const py::object &lens, const py::object &scene, const py::object &render_settings,
           bool include_ttilde) {
            const SceneParams params = scene_from_dict(glass, lens, scene);
            const double hfov = params.lens.hfov_deg();
            const DepthImage front = depth_image(front_rgb, front_depth, front_hfov.value_or(hfov));
            const DepthImage back = depth_image(back_rgb, back_depth, back_hfov.value_or(hfov));
            const RenderSettings settings = from_dict<RenderSettings>(render_settings);
            ImageTuple tuple;
            {
                py::gil_scoped_release release;
                tuple = render_tuple(RenderScene(assemble_scene(front, back, params)), settings, include_ttilde);
            }
            py::dict out;
            out["I"] = to_array(tuple.I.radiance);
            out["T"] = to_array(tuple.T.radiance);
            out["Rtilde"] = to_array(tuple.Rtilde.radiance);
            out["R"] = to_array(tuple.R.radiance);
            if (tuple.Ttilde)
                out["Ttilde"] = to_array(tuple.Ttilde->radiance);
            out["metadata"] = json_to_py(tuple.metadata);
            return out;
        },
        py::arg("front_rgb"), py::arg("front_depth"), py::arg("back_rgb"), py::arg("back_depth"),
        py::arg("front_hfov_deg") = py::none(), py::arg("back_hfov_deg") = py::none(), py::arg("glass") = py::none(),
        py::arg("lens") = py::none(), py::arg("scene") = py::none(), py::arg("render") = py::none(),
        py::arg("include_ttilde") = false);

    m.def(
        "psnr", [](const FloatArray &a, const FloatArray &b) { return psnr(to_image(a), to_image(b)); },
        py::arg("a"), py::arg("b"));
    m.def(
        "ssim",
        [](const FloatArray &a, const FloatArray &b, const std::string &window) {
            SsimOptions options;
            if (window == "uniform8")
                options.window = SsimWindow::Uniform8;
            else if (window != "gaussian11")
                throw std::invalid_argument("window must be 'gaussian11' or 'uniform8'");
            return ssim(to_image(a), to_image(b), options);
        },
        py::arg("a"), py::arg("b"), py::arg("window") = "gaussian11");
    m.def(
        "baseline_blend",
        [](const FloatArray &t, const FloatArray &r, double blend_weight, double gaussian_sigma, double reflection_scale) {
            return to_array(baseline_blend(to_image(t), to_image(r), {blend_weight, gaussian_sigma, reflection_scale}));
        },
        py::arg("transmission"), py::arg("reflection"), py::arg("blend_weight") = 1.0, py::arg("gaussian_sigma") = 2.0,
        py::arg("reflection_scale") = 1.0);
    m.def(
        "defocus_variance_profile",
        [](const FloatArray &img, int patch) {
            const DefocusProfile p = defocus_variance_profile(to_image(img), patch);
            py::array_t<double> sharpness({p.patches_y, p.patches_x});
            std::copy(p.sharpness.begin(), p.sharpness.end(), sharpness.mutable_data());
            return py::make_tuple(sharpness, p.dispersion);
        },
        py::arg("image"), py::arg("patch") = 16);

    m.def(
        "read_exr", [](const std::filesystem::path &p) { return to_array(read_exr(p)); }, py::arg("path"));
    m.def(
        "write_exr", [](const std::filesystem::path &p, const FloatArray &a) { write_exr(p, to_image(a)); },
        py::arg("path"), py::arg("image"));
    m.def("sha256_file", &sha256_file, py::arg("path"));

    m.def("sample_pairs", &sample_pairs, py::arg("front_count"), py::arg("back_count"), py::arg("seed"), py::arg("n"));
    m.def(
        "scale_depth",
        [](const std::string &category, const FloatArray &normalized, const DepthCategoryTable &table) {
            return to_array(scale_depth(category, to_image(normalized), table));
        },
        py::arg("category"), py::arg("normalized"), py::arg("table"));

    m.def(
        "run_dataset_job",
        [](const std::filesystem::path &config) {
            const DatasetJob job = load_job_config(config);
            Manifest manifest;
            {
                py::gil_scoped_release release;
                manifest = run_dataset_job(job);
            }
            return json_to_py(manifest.to_json());
        },
        py::arg("config"));
    m.def(
        "validate_manifest", [](const std::filesystem::path &p) { return validate_manifest(p).problems; },
        py::arg("manifest"));

    m.attr("TRAIN_TUPLE_COUNT") = kTrainTupleCount;
    m.attr("TEST_TUPLE_COUNT") = kTestTupleCount;
    m.attr("MANIFEST_FILE_NAME") = kManifestFileName;
}
