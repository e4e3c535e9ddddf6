#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "subloc/error.hpp"
#include "subloc/simgen.hpp"

namespace subloc {

namespace {

template <typename T>
void read(const toml::table& table, std::string_view key, T& out) {
    if (const auto* node = table.get(key)) {
        if (auto v = node->value<T>()) {
            out = *v;
        } else {
            throw Error("scene config: '" + std::string(key) + "' has the wrong type");
        }
    }
}

void read_count(const toml::table& table, std::string_view key, std::size_t& out) {
    std::int64_t v = static_cast<std::int64_t>(out);
    read(table, key, v);
    if (v < 0) throw Error("scene config: '" + std::string(key) + "' must be non-negative");
    out = static_cast<std::size_t>(v);
}

}  // namespace

SceneConfig parse_scene_config(std::string_view toml_text) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        throw ParseError(e.source().begin.line, std::string(e.description()));
    }

    SceneConfig cfg = SceneConfig::desk_default();
    std::int64_t seed = static_cast<std::int64_t>(cfg.seed);
    read(root, "seed", seed);
    cfg.seed = static_cast<std::uint64_t>(seed);

    if (const auto* roi = root["roi"].as_table()) {
        if (const auto* poly = (*roi)["polygon"].as_array()) {
            std::vector<Point2> vertices;
            for (const auto& vertex : *poly) {
                const auto* pair = vertex.as_array();
                if (!pair || pair->size() != 2) throw Error("scene config: polygon vertices must be [x, y]");
                auto x = (*pair)[0].value<double>();
                auto y = (*pair)[1].value<double>();
                if (!x || !y) throw Error("scene config: polygon coordinates must be numbers");
                vertices.push_back({*x, *y});
            }
            cfg.roi = Polygon(std::move(vertices));
        }
    }
    if (const auto* radio = root["radio"].as_table()) {
        read_count(*radio, "ap_count", cfg.ap_count);
        read(*radio, "tx_power", cfg.tx_power);
        read(*radio, "path_loss_exponent", cfg.path_loss_exponent);
        read(*radio, "reference_distance", cfg.reference_distance);
        read(*radio, "shadowing_sigma", cfg.shadowing_sigma);
        read(*radio, "visibility_cutoff", cfg.visibility_cutoff);
        read(*radio, "ap_margin", cfg.ap_margin);
    }
    if (const auto* survey = root["survey"].as_table()) {
        read(*survey, "walk_spacing", cfg.walk_spacing);
        read_count(*survey, "test_count", cfg.test_count);
    }
    cfg.validate();
    return cfg;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scene_config(text.str());
}

}  // namespace subloc
