#pragma once

#include <span>
#include <vector>

namespace subloc {

enum class BandwidthRule { Scott };

struct KdeConfig {
    BandwidthRule rule = BandwidthRule::Scott;
    double bandwidth_floor = 1.0;  // same units as the values (dBm for RSS)

    friend bool operator==(const KdeConfig&, const KdeConfig&) = default;
};

/// Univariate Gaussian kernel density estimate.
struct DensityModel {
    std::vector<double> centers;
    double bandwidth = 1.0;

    friend bool operator==(const DensityModel&, const DensityModel&) = default;
};

/// Scott's rule σ̂·n^(-1/5) with σ̂ the sample standard deviation, never below
/// cfg.bandwidth_floor. Throws subloc::Error on empty or non-finite input.
double scott_bandwidth(std::span<const double> values, const KdeConfig& cfg = {});

DensityModel kde_fit(std::vector<double> values, const KdeConfig& cfg = {});

/// log((1/n)·Σ φ((x − c)/h)/h), evaluated with log-sum-exp so that points far
/// from every center stay finite.
double kde_logpdf(const DensityModel& model, double x) noexcept;

}  // namespace subloc
