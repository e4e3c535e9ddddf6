#include "subloc/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subloc/error.hpp"

namespace subloc {

double scott_bandwidth(std::span<const double> values, const KdeConfig& cfg) {
    if (values.empty()) throw Error("kde needs at least one value");
    if (!(cfg.bandwidth_floor > 0.0)) throw Error("bandwidth floor must be positive");
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("non-finite kde sample");
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return std::max(sd * std::pow(n, -0.2), cfg.bandwidth_floor);
}

DensityModel kde_fit(std::vector<double> values, const KdeConfig& cfg) {
    const double bw = scott_bandwidth(values, cfg);
    return DensityModel{std::move(values), bw};
}

double kde_logpdf(const DensityModel& model, double x) noexcept {
    const double inv_h = 1.0 / model.bandwidth;
    double nearest = std::numeric_limits<double>::infinity();
    for (double c : model.centers) nearest = std::min(nearest, std::abs(x - c));
    const double z0 = nearest * inv_h;
    const double peak = -0.5 * z0 * z0;

    double sum = 0.0;
    for (double c : model.centers) {
        const double z = (x - c) * inv_h;
        sum += std::exp(-0.5 * z * z - peak);
    }
    constexpr double log_sqrt_2pi = 0.91893853320467274178;  // 0.5·log(2π)
    return peak + std::log(sum) - std::log(static_cast<double>(model.centers.size())) -
           std::log(model.bandwidth) - log_sqrt_2pi;
}

}  // namespace subloc
