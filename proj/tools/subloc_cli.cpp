// Command-line front end: simulate → grid → precompute → locate / evaluate.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subloc/error.hpp"
#include "subloc/evalbench.hpp"
#include "subloc/io.hpp"
#include "subloc/positioning.hpp"
#include "subloc/rfm.hpp"
#include "subloc/simgen.hpp"

namespace {

using namespace subloc;

std::vector<TestPoint> load_testset(const std::string& path) {
    std::vector<TestPoint> out;
    for (auto& r : read_fingerprint_log(std::filesystem::path(path))) {
        out.push_back({std::move(r.fingerprint), r.position});
    }
    return out;
}

FeatureBudget parse_budget(const std::string& text) {
    if (text == "all") return kAllFeatures;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || v == 0) throw Error("--h must be a positive integer or 'all'");
    return static_cast<std::size_t>(v);
}

void write_polygon(const std::string& path, const Polygon& poly) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    for (const auto& v : poly.vertices()) out << v.x << ',' << v.y << '\n';
}

template <typename Fn>
void write_text(const std::string& path, Fn&& fn) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    fn(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sub-region / feature-selected MAP fingerprint positioning"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a seeded synthetic survey and test set");
    std::string sim_config;
    std::string sim_out;
    std::string sim_test;
    std::string sim_mask_out;
    std::optional<std::uint64_t> sim_seed;
    std::optional<std::size_t> sim_count;
    sim->add_option("--config", sim_config, "Scene description (TOML); desk default if omitted");
    sim->add_option("--out", sim_out, "Survey fingerprint log")->required();
    sim->add_option("--test", sim_test, "Test-set fingerprint log (true positions)");
    sim->add_option("--mask-out", sim_mask_out, "Write the RoI polygon for 'grid --mask'");
    sim->add_option("--seed", sim_seed, "Override the scene seed");
    sim->add_option("--count", sim_count, "Override the number of test points");

    // grid
    auto* grid = app.add_subcommand("grid", "Densify a survey log to a gridded RFM");
    std::string grid_in;
    std::string grid_out;
    std::string grid_mask;
    GridSpec spec;
    grid->add_option("--in", grid_in, "Survey fingerprint log")->required();
    grid->add_option("--cell", spec.cell_size, "Sub-region edge (m)")->capture_default_str();
    grid->add_option("--spacing", spec.grid_spacing, "Lattice pitch (m)")->capture_default_str();
    grid->add_option("--mask", grid_mask, "RoI polygon file (one x,y per line)");
    grid->add_option("--out", grid_out, "Gridded RFM container")->required();

    // precompute
    auto* pre = app.add_subcommand("precompute", "Select features and fit density models");
    std::string pre_rfm;
    std::string pre_out;
    PrecomputeConfig pcfg;
    std::optional<double> pre_radius;
    pre->add_option("--rfm", pre_rfm, "Gridded RFM container")->required();
    pre->add_option("--T", pcfg.lasso.randomizations, "Randomized LASSO iterations")->capture_default_str();
    pre->add_option("--epsilon", pcfg.lasso.sampling_ratio, "Bootstrap sampling ratio")->capture_default_str();
    pre->add_option("--threshold", pcfg.lasso.relevance_threshold, "Coefficient relevance threshold")
        ->capture_default_str();
    pre->add_option("--folds", pcfg.lasso.cv_folds, "Cross-validation folds for lambda")->capture_default_str();
    pre->add_option("--seed", pcfg.lasso.seed, "Feature-selection seed")->capture_default_str();
    pre->add_option("--missing", pcfg.lasso.missing_value, "Fill value for unobserved features")
        ->capture_default_str();
    pre->add_option("--bandwidth-floor", pcfg.kde.bandwidth_floor, "Minimum KDE bandwidth")->capture_default_str();
    pre->add_option("--pooling-radius", pre_radius, "KDE training radius (m); default half the cell size");
    pre->add_flag("--full-cache", pcfg.full_cache, "Fit density models for every feature (enables full MAP)");
    pre->add_option("--out", pre_out, "Cache container")->required();

    // locate
    auto* loc = app.add_subcommand("locate", "Estimate positions for fingerprints, printed as JSON lines");
    std::string loc_cache;
    std::string loc_fp;
    std::size_t loc_k = kDefaultCandidateRegions;
    std::string loc_h = std::to_string(kDefaultFeatureCount);
    bool loc_full = false;
    loc->add_option("--cache", loc_cache, "Cache container")->required();
    loc->add_option("--fingerprint", loc_fp, "Fingerprint log (positions are ignored)")->required();
    loc->add_option("--k", loc_k, "Candidate sub-regions")->capture_default_str();
    loc->add_option("--h", loc_h, "Features per sub-region, or 'all'")->capture_default_str();
    loc->add_flag("--full", loc_full, "Full MAP over every sub-region and feature");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Benchmark configurations against a test set");
    std::string ev_cache;
    std::string ev_test;
    std::string ev_configs = "full,k10h10,k10h6,k3hall";
    std::string ev_out;
    std::string ev_errors;
    std::string ev_cpa;
    EvalOptions ev_opts;
    ev->add_option("--cache", ev_cache, "Cache container")->required();
    ev->add_option("--test", ev_test, "Test-set fingerprint log")->required();
    ev->add_option("--configs", ev_configs, "Comma-separated: full, k<n>h<n>, k<n>hall")->capture_default_str();
    ev->add_option("--out", ev_out, "Report CSV (one row per config)")->required();
    ev->add_option("--errors-out", ev_errors, "Per-point error CSV");
    ev->add_option("--cpa-out", ev_cpa, "CPA curve CSV");
    ev->add_option("--repeats", ev_opts.timing_repeats, "Timing repeats per point")->capture_default_str();
    ev->add_option("--timing-points", ev_opts.timing_points, "Timed test points (0 = all)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            SceneConfig cfg = sim_config.empty() ? SceneConfig::desk_default() : load_scene_config(sim_config);
            if (sim_seed) cfg.seed = *sim_seed;
            if (sim_count) cfg.test_count = *sim_count;
            const Scene scene = make_scene(cfg);
            write_fingerprint_log(std::filesystem::path(sim_out), generate_survey(scene).records);
            if (!sim_test.empty()) {
                std::vector<ReferenceRecord> test;
                for (auto& tp : generate_testset(scene, cfg.test_count)) {
                    test.push_back({std::move(tp.fingerprint), tp.truth});
                }
                write_fingerprint_log(std::filesystem::path(sim_test), test);
            }
            if (!sim_mask_out.empty()) write_polygon(sim_mask_out, cfg.roi);
        } else if (*grid) {
            RawRFM raw = ingest(std::filesystem::path(grid_in));
            std::optional<Polygon> mask;
            if (!grid_mask.empty()) {
                mask = read_polygon(grid_mask);
                const Rect b = mask->bounds();
                for (const auto& r : raw.records) {
                    if (!b.contains(r.position)) throw Error("survey record outside the mask bounds");
                }
                raw.roi_bounds = b;
            }
            const GriddedRFM rfm = grid_interpolate(raw, spec, mask);
            write_rfm(std::filesystem::path(grid_out), rfm);
            std::cerr << "gridded " << raw.records.size() << " records into " << rfm.sub_regions.size()
                      << " sub-regions of " << rfm.points_per_region() << " points, "
                      << rfm.roi_key_union.size() << " features\n";
        } else if (*pre) {
            const GriddedRFM rfm = read_rfm(std::filesystem::path(pre_rfm));
            pcfg.pooling_radius = pre_radius;
            const PrecomputedCache cache = precompute(rfm, pcfg);
            write_cache(std::filesystem::path(pre_out), cache);
        } else if (*loc) {
            const PrecomputedCache cache = read_cache(std::filesystem::path(loc_cache));
            const FeatureBudget h = parse_budget(loc_h);
            for (const auto& rec : read_fingerprint_log(std::filesystem::path(loc_fp))) {
                const auto est = loc_full ? locate_full(cache, rec.fingerprint)
                                          : locate(cache, rec.fingerprint, loc_k, h);
                nlohmann::json j;
                j["x"] = est.coordinates.x;
                j["y"] = est.coordinates.y;
                j["log_posterior"] = est.log_posterior;
                j["subregion"] = est.subregion_index;
                j["candidates_scored"] = est.candidates_scored;
                auto& keys = j["features"] = nlohmann::json::array();
                for (auto key : est.used_feature_keys) keys.push_back(key.id);
                auto& counts = j["region_feature_counts"] = nlohmann::json::array();
                for (const auto& [region, n] : est.region_feature_counts) counts.push_back({region, n});
                std::cout << j.dump() << '\n';
            }
        } else if (*ev) {
            const PrecomputedCache cache = read_cache(std::filesystem::path(ev_cache));
            const auto testset = load_testset(ev_test);
            const auto configs = parse_configs(ev_configs);
            const auto reports = evaluate(cache, testset, configs, ev_opts);
            write_text(ev_out, [&](std::ostream& out) { write_report_csv(out, reports); });
            if (!ev_errors.empty()) write_text(ev_errors, [&](std::ostream& out) { write_errors_csv(out, reports); });
            if (!ev_cpa.empty()) write_text(ev_cpa, [&](std::ostream& out) { write_cpa_csv(out, reports); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
