#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subloc/positioning.hpp"
#include "subloc/simgen.hpp"

namespace subloc {

/// One positioning configuration to benchmark. No k means full MAP
/// (locate_full); otherwise locate(k, h).
struct EvalConfig {
    std::string label;
    std::optional<std::size_t> k;
    FeatureBudget h = kAllFeatures;

    bool is_full() const noexcept { return !k.has_value(); }

    /// "full", or "k<int>h<int>" / "k<int>hall", e.g. "k10h6", "k3hall".
    static EvalConfig parse(std::string_view text);
};

std::vector<EvalConfig> parse_configs(std::string_view comma_separated);

struct TimingStats {
    double mean = 0.0;  // seconds per query
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;
    std::size_t samples = 0;
};

struct EvalReport {
    EvalConfig config;
    std::vector<double> errors;  // Euclidean error per test point, test-set order
    double mse = 0.0;            // m²
    double median_error = 0.0;   // m
    double p90_error = 0.0;      // m
    std::vector<std::pair<double, double>> cpa;  // (error, cumulative fraction)
    TimingStats timing;
    double predicted_ratio = 0.0;  // predicted ops relative to full MAP
    double measured_ratio = 0.0;   // mean time relative to the full-MAP config, NaN if none was run
};

struct EvalOptions {
    std::size_t timing_repeats = 1;
    /// Timed test points (the first n); 0 times every point.
    std::size_t timing_points = 0;
};

std::vector<EvalReport> evaluate(const PrecomputedCache& cache, std::span<const TestPoint> testset,
                                 std::span<const EvalConfig> configs, const EvalOptions& options = {});

/// Per-query latency statistics of one configuration, timed sequentially.
TimingStats time_queries(const PrecomputedCache& cache, std::span<const TestPoint> testset,
                         const EvalConfig& config, std::size_t repeats);

double mean_squared_error(std::span<const double> errors);

/// Inverse empirical CDF: the smallest error e with CDF(e) ≥ p.
double error_quantile(std::span<const double> errors, double p);

/// Empirical CDF at each distinct sorted error value.
std::vector<std::pair<double, double>> cpa_curve(std::span<const double> errors);

struct MseCurve {
    std::uint64_t seed = 0;
    std::vector<std::size_t> h;
    std::vector<double> mse;
};

MseCurve mse_vs_h(const PrecomputedCache& cache, std::span<const TestPoint> testset,
                  std::span<const std::size_t> h_range, std::size_t k);

/// One curve per feature-selection seed: recomputes the relevance profiles of
/// `rfm` with each seed and swaps them into `cache` (which must be full).
std::vector<MseCurve> mse_vs_h(PrecomputedCache cache, const GriddedRFM& rfm, const RandomizedLassoConfig& lasso,
                               std::span<const std::uint64_t> seeds, std::span<const TestPoint> testset,
                               std::span<const std::size_t> h_range, std::size_t k);

/// Spearman rank correlation, ties given average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct JaccardDistancePairs {
    std::vector<double> jaccard;   // c(g^i, keys of g^j) for every ordered pair i≠j
    std::vector<double> distance;  // centroid distance of the same pair
    double spearman = 0.0;
};

JaccardDistancePairs jaccard_distance_structure(const GriddedRFM& rfm);

/// One row per config: label,k,h,points,mse,median_error,p90_error,
/// time_mean,time_min,time_max,time_std,predicted_ratio,measured_ratio.
void write_report_csv(std::ostream& out, std::span<const EvalReport> reports);

/// One row per test point, one error column per config.
void write_errors_csv(std::ostream& out, std::span<const EvalReport> reports);

/// Long format: config,error,cumulative_fraction.
void write_cpa_csv(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace subloc
