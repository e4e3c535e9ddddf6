#include "subloc/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "subloc/error.hpp"

namespace subloc {

void RandomizedLassoConfig::validate() const {
    if (!(sampling_ratio > 0.0 && sampling_ratio < 1.0)) throw Error("sampling ratio must be in (0, 1)");
    if (randomizations < 1) throw Error("need at least one randomization");
    if (!(relevance_threshold > 0.0)) throw Error("relevance threshold must be positive");
    if (cv_folds < 2) throw Error("cross validation needs at least 2 folds");
    if (lambda_grid_size < 1) throw Error("lambda grid must not be empty");
    if (!(lambda_grid_min_ratio > 0.0 && lambda_grid_min_ratio <= 1.0)) {
        throw Error("lambda grid ratio must be in (0, 1]");
    }
}

RelevanceProfile randomized_lasso(const SubRegion& region, const RandomizedLassoConfig& cfg, double lambda) {
    cfg.validate();
    const auto& pts = region.reference_points;
    if (pts.size() < 2) throw Error("sub-region needs at least 2 reference points");
    const std::size_t m = pts.size();
    const auto l = static_cast<Eigen::Index>(region.key_union.size());

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(m), l);
    Eigen::MatrixXd pos(static_cast<Eigen::Index>(m), 2);
    for (std::size_t j = 0; j < m; ++j) {
        const auto f = feature_vector(pts[j], region.key_union, cfg.missing_value);
        for (Eigen::Index c = 0; c < l; ++c) raw(static_cast<Eigen::Index>(j), c) = f[static_cast<std::size_t>(c)];
        pos(static_cast<Eigen::Index>(j), 0) = pts[j].position.x;
        pos(static_cast<Eigen::Index>(j), 1) = pts[j].position.y;
    }

    const auto draws = static_cast<std::size_t>(std::ceil(cfg.sampling_ratio * static_cast<double>(m)));
    std::vector<std::size_t> counts(static_cast<std::size_t>(l), 0);
    std::vector<Eigen::Index> rows(draws);

    for (std::size_t t = 0; t < cfg.randomizations; ++t) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(region.index), static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        for (auto& r : rows) r = static_cast<Eigen::Index>(pick(rng));

        const RegressionProblem sub = make_problem(raw(rows, Eigen::all), pos(rows, Eigen::all));
        const Eigen::MatrixXd P = lasso_fit(sub, lambda, cfg.solver);
        for (Eigen::Index c = 0; c < l; ++c) {
            if (P.row(c).cwiseAbs().maxCoeff() > cfg.relevance_threshold) ++counts[static_cast<std::size_t>(c)];
        }
    }

    RelevanceProfile profile;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) continue;
        profile.entries.push_back(
            {region.key_union[c], static_cast<double>(counts[c]) / static_cast<double>(cfg.randomizations)});
    }
    std::sort(profile.entries.begin(), profile.entries.end(), [](const auto& a, const auto& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.key < b.key;
    });
    return profile;
}

double select_region_lambda(const SubRegion& region, const RandomizedLassoConfig& cfg) {
    cfg.validate();
    const RegressionProblem problem = build_problem(region, cfg.missing_value);
    const auto grid = default_lambda_grid(problem, cfg.lambda_grid_size, cfg.lambda_grid_min_ratio);
    if (grid.empty()) return 0.0;
    const std::size_t folds = std::min<std::size_t>(cfg.cv_folds, static_cast<std::size_t>(problem.rows()));
    return select_lambda_cv(problem, grid, folds, cfg.solver);
}

RelevanceProfile select_features(const SubRegion& region, const RandomizedLassoConfig& cfg) {
    const double lambda = select_region_lambda(region, cfg);
    if (!(lambda > 0.0)) return {};
    return randomized_lasso(region, cfg, lambda);
}

std::vector<FeatureKey> take_relevant(const RelevanceProfile& profile, std::size_t h,
                                      std::span<const FeatureKey> available) {
    if (h == 0) throw Error("h must be at least 1");
    std::vector<FeatureKey> out;
    for (const auto& e : profile.entries) {
        if (out.size() >= h) break;
        if (std::binary_search(available.begin(), available.end(), e.key)) out.push_back(e.key);
    }
    return out;
}

}  // namespace subloc
