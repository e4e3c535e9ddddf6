#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>

#include "subloc/error.hpp"
#include "subloc/evalbench.hpp"
#include "subloc/io.hpp"
#include "subloc/positioning.hpp"
#include "subloc/rfm.hpp"
#include "subloc/simgen.hpp"

namespace py = pybind11;
using namespace subloc;

namespace {

Fingerprint fingerprint_from_dict(const std::map<std::uint64_t, double>& obs) {
    std::vector<FeatureKey> keys;
    std::vector<double> values;
    for (const auto& [k, v] : obs) {
        keys.push_back(FeatureKey{k});
        values.push_back(v);
    }
    return Fingerprint(std::move(keys), std::move(values));
}

std::map<std::uint64_t, double> fingerprint_to_dict(const Fingerprint& fp) {
    std::map<std::uint64_t, double> out;
    for (std::size_t i = 0; i < fp.size(); ++i) out.emplace(fp.keys()[i].id, fp.values()[i]);
    return out;
}

std::vector<std::uint64_t> key_ids(const std::vector<FeatureKey>& keys) {
    std::vector<std::uint64_t> out;
    out.reserve(keys.size());
    for (auto k : keys) out.push_back(k.id);
    return out;
}

py::tuple as_tuple(Point2 p) { return py::make_tuple(p.x, p.y); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sub-region and feature-selected MAP fingerprint positioning";

    auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    m.def("hash_identifier", [](std::string_view s) { return hash_identifier(s).id; });

    py::class_<Fingerprint>(m, "Fingerprint")
        .def(py::init(&fingerprint_from_dict), py::arg("observations"))
        .def("to_dict", &fingerprint_to_dict)
        .def("keys", [](const Fingerprint& f) { return key_ids(f.keys()); })
        .def("values", &Fingerprint::values)
        .def("__len__", &Fingerprint::size)
        .def("__eq__", [](const Fingerprint& a, const Fingerprint& b) { return a == b; })
        .def("__repr__", [](const Fingerprint& f) { return "<Fingerprint with " + std::to_string(f.size()) + " features>"; });

    py::class_<SceneConfig>(m, "SceneConfig")
        .def(py::init(&SceneConfig::desk_default))
        .def_static("desk_default", &SceneConfig::desk_default)
        .def_static("from_toml", &parse_scene_config, py::arg("text"))
        .def_static("load", &load_scene_config, py::arg("path"))
        .def_property(
            "roi",
            [](const SceneConfig& c) {
                std::vector<py::tuple> out;
                for (auto p : c.roi.vertices()) out.push_back(as_tuple(p));
                return out;
            },
            [](SceneConfig& c, const std::vector<std::pair<double, double>>& v) {
                std::vector<Point2> pts;
                for (auto [x, y] : v) pts.push_back({x, y});
                c.roi = Polygon(std::move(pts));
            })
        .def_readwrite("ap_count", &SceneConfig::ap_count)
        .def_readwrite("tx_power", &SceneConfig::tx_power)
        .def_readwrite("path_loss_exponent", &SceneConfig::path_loss_exponent)
        .def_readwrite("reference_distance", &SceneConfig::reference_distance)
        .def_readwrite("shadowing_sigma", &SceneConfig::shadowing_sigma)
        .def_readwrite("visibility_cutoff", &SceneConfig::visibility_cutoff)
        .def_readwrite("ap_margin", &SceneConfig::ap_margin)
        .def_readwrite("seed", &SceneConfig::seed)
        .def_readwrite("walk_spacing", &SceneConfig::walk_spacing)
        .def_readwrite("test_count", &SceneConfig::test_count)
        .def("validate", &SceneConfig::validate);

    py::class_<Scene>(m, "Scene")
        .def_readonly("config", &Scene::config)
        .def_property_readonly("access_points", [](const Scene& s) {
            std::vector<std::pair<std::uint64_t, py::tuple>> out;
            for (const auto& ap : s.access_points) out.emplace_back(ap.key.id, as_tuple(ap.position));
            return out;
        });
    m.def("make_scene", &make_scene, py::arg("config"));

    py::class_<TestPoint>(m, "TestPoint")
        .def_readonly("fingerprint", &TestPoint::fingerprint)
        .def_property_readonly("truth", [](const TestPoint& t) { return as_tuple(t.truth); });

    py::class_<RawRFM>(m, "RawRFM")
        .def_property_readonly("size", [](const RawRFM& r) { return r.records.size(); })
        .def_property_readonly("records", [](const RawRFM& r) {
            std::vector<std::pair<py::tuple, Fingerprint>> out;
            for (const auto& rec : r.records) out.emplace_back(as_tuple(rec.position), rec.fingerprint);
            return out;
        })
        .def("save", [](const RawRFM& r, const std::filesystem::path& p) { write_fingerprint_log(p, r.records); });
    m.def("load_survey", py::overload_cast<const std::filesystem::path&>(&ingest), py::arg("path"));

    m.def("generate_survey", py::overload_cast<const Scene&>(&generate_survey), py::arg("scene"),
          "Survey walk over the scene; the RoI bounds are set from the scene polygon.");
    m.def("generate_testset", &generate_testset, py::arg("scene"), py::arg("count"));

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double cell, double spacing) { return GridSpec{cell, spacing}; }), py::arg("cell_size") = 2.0,
             py::arg("grid_spacing") = 0.2)
        .def_readwrite("cell_size", &GridSpec::cell_size)
        .def_readwrite("grid_spacing", &GridSpec::grid_spacing);

    py::class_<GriddedRFM>(m, "GriddedRFM")
        .def_property_readonly("region_count", [](const GriddedRFM& r) { return r.sub_regions.size(); })
        .def_property_readonly("points_per_region", &GriddedRFM::points_per_region)
        .def_property_readonly("feature_keys", [](const GriddedRFM& r) { return key_ids(r.roi_key_union); })
        .def_readonly("cell_size", &GriddedRFM::cell_size)
        .def_readonly("grid_spacing", &GriddedRFM::grid_spacing)
        .def("save", [](const GriddedRFM& r, const std::filesystem::path& p) { write_rfm(p, r); })
        .def_static("load", [](const std::filesystem::path& p) { return read_rfm(p); })
        .def("__eq__", [](const GriddedRFM& a, const GriddedRFM& b) { return a == b; });

    m.def(
        "grid_interpolate",
        [](const RawRFM& raw, const GridSpec& spec, std::optional<std::vector<std::pair<double, double>>> mask) {
            std::optional<Polygon> poly;
            if (mask) {
                std::vector<Point2> pts;
                for (auto [x, y] : *mask) pts.push_back({x, y});
                poly.emplace(std::move(pts));
            }
            return grid_interpolate(raw, spec, poly);
        },
        py::arg("raw"), py::arg("spec") = GridSpec{}, py::arg("mask") = py::none());

    py::class_<RandomizedLassoConfig>(m, "LassoConfig")
        .def(py::init<>())
        .def_readwrite("sampling_ratio", &RandomizedLassoConfig::sampling_ratio)
        .def_readwrite("randomizations", &RandomizedLassoConfig::randomizations)
        .def_readwrite("relevance_threshold", &RandomizedLassoConfig::relevance_threshold)
        .def_readwrite("seed", &RandomizedLassoConfig::seed)
        .def_readwrite("cv_folds", &RandomizedLassoConfig::cv_folds)
        .def_readwrite("missing_value", &RandomizedLassoConfig::missing_value);

    py::class_<PrecomputeConfig>(m, "PrecomputeConfig")
        .def(py::init<>())
        .def_readwrite("lasso", &PrecomputeConfig::lasso)
        .def_readwrite("full_cache", &PrecomputeConfig::full_cache)
        .def_readwrite("pooling_radius", &PrecomputeConfig::pooling_radius)
        .def_property(
            "bandwidth_floor", [](const PrecomputeConfig& c) { return c.kde.bandwidth_floor; },
            [](PrecomputeConfig& c, double v) { c.kde.bandwidth_floor = v; });

    py::class_<PrecomputedCache>(m, "PrecomputedCache")
        .def_property_readonly("region_count", &PrecomputedCache::region_count)
        .def_property_readonly("candidates_per_region", &PrecomputedCache::candidates_per_region)
        .def_readonly("full", &PrecomputedCache::full)
        .def_readonly("pooling_radius", &PrecomputedCache::pooling_radius)
        .def_property_readonly("feature_keys", [](const PrecomputedCache& c) { return key_ids(c.roi_key_union); })
        .def("relevant_features",
             [](const PrecomputedCache& c, std::size_t region) {
                 std::vector<std::pair<std::uint64_t, double>> out;
                 for (const auto& e : c.regions.at(region).profile.entries) out.emplace_back(e.key.id, e.frequency);
                 return out;
             },
             py::arg("region"))
        .def("save", [](const PrecomputedCache& c, const std::filesystem::path& p) { write_cache(p, c); })
        .def_static("load", [](const std::filesystem::path& p) { return read_cache(p); })
        .def("__eq__", [](const PrecomputedCache& a, const PrecomputedCache& b) { return a == b; });

    m.def("precompute", &precompute, py::arg("rfm"), py::arg("config") = PrecomputeConfig{},
          py::call_guard<py::gil_scoped_release>());

    py::class_<PositionEstimate>(m, "PositionEstimate")
        .def_property_readonly("coordinates", [](const PositionEstimate& e) { return as_tuple(e.coordinates); })
        .def_readonly("log_posterior", &PositionEstimate::log_posterior)
        .def_readonly("subregion_index", &PositionEstimate::subregion_index)
        .def_property_readonly("used_feature_keys", [](const PositionEstimate& e) { return key_ids(e.used_feature_keys); })
        .def_readonly("candidates_scored", &PositionEstimate::candidates_scored)
        .def_readonly("region_feature_counts", &PositionEstimate::region_feature_counts);

    m.def("locate", &locate, py::arg("cache"), py::arg("fingerprint"), py::arg("k") = kDefaultCandidateRegions,
          py::arg("h") = kDefaultFeatureCount, "h=None uses every feature.");
    m.def("locate_full", &locate_full, py::arg("cache"), py::arg("fingerprint"));
    m.def(
        "predicted_ratio",
        [](const PrecomputedCache& c, std::size_t k, FeatureBudget h) { return predicted_cost(c, k, h).ratio(); },
        py::arg("cache"), py::arg("k"), py::arg("h"));

    py::class_<EvalReport>(m, "EvalReport")
        .def_property_readonly("label", [](const EvalReport& r) { return r.config.label; })
        .def_readonly("errors", &EvalReport::errors)
        .def_readonly("mse", &EvalReport::mse)
        .def_readonly("median_error", &EvalReport::median_error)
        .def_readonly("p90_error", &EvalReport::p90_error)
        .def_readonly("cpa", &EvalReport::cpa)
        .def_property_readonly("time_mean", [](const EvalReport& r) { return r.timing.mean; })
        .def_property_readonly("time_std", [](const EvalReport& r) { return r.timing.std; })
        .def_readonly("predicted_ratio", &EvalReport::predicted_ratio)
        .def_readonly("measured_ratio", &EvalReport::measured_ratio);

    m.def(
        "evaluate",
        [](const PrecomputedCache& cache, const std::vector<TestPoint>& tests, std::string_view configs,
           std::size_t repeats, std::size_t timing_points) {
            const auto parsed = parse_configs(configs);
            py::gil_scoped_release release;
            return evaluate(cache, tests, parsed, EvalOptions{repeats, timing_points});
        },
        py::arg("cache"), py::arg("tests"), py::arg("configs") = "full,k10h10,k10h6,k3hall", py::arg("repeats") = 1,
        py::arg("timing_points") = 0);

    m.def("spearman", &spearman, py::arg("x"), py::arg("y"));
}
