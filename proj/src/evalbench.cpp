#include "subloc/evalbench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "subloc/error.hpp"

namespace subloc {

namespace {

std::size_t parse_count(std::string_view s, std::string_view whole) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
        throw Error("bad config '" + std::string(whole) + "' (expected full, k<n>h<n> or k<n>hall)");
    }
    return v;
}

PositionEstimate run(const PrecomputedCache& cache, const Fingerprint& fp, const EvalConfig& cfg) {
    if (cfg.is_full()) return locate_full(cache, fp);
    return locate(cache, fp, *cfg.k, cfg.h);
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

std::string budget_label(FeatureBudget h) { return h ? std::to_string(*h) : std::string("all"); }

}  // namespace

EvalConfig EvalConfig::parse(std::string_view text) {
    EvalConfig cfg;
    cfg.label = std::string(text);
    if (text == "full") return cfg;
    if (text.size() < 4 || text.front() != 'k') {
        throw Error("bad config '" + std::string(text) + "' (expected full, k<n>h<n> or k<n>hall)");
    }
    const auto hpos = text.find('h');
    if (hpos == std::string_view::npos) {
        throw Error("bad config '" + std::string(text) + "' (expected full, k<n>h<n> or k<n>hall)");
    }
    cfg.k = parse_count(text.substr(1, hpos - 1), text);
    const auto hs = text.substr(hpos + 1);
    if (hs == "all") {
        cfg.h = kAllFeatures;
    } else {
        cfg.h = parse_count(hs, text);
    }
    return cfg;
}

std::vector<EvalConfig> parse_configs(std::string_view comma_separated) {
    std::vector<EvalConfig> out;
    std::size_t pos = 0;
    while (pos <= comma_separated.size()) {
        const auto end = std::min(comma_separated.find(',', pos), comma_separated.size());
        const auto item = comma_separated.substr(pos, end - pos);
        if (!item.empty()) out.push_back(EvalConfig::parse(item));
        pos = end + 1;
    }
    if (out.empty()) throw Error("no evaluation configs given");
    return out;
}

double mean_squared_error(std::span<const double> errors) {
    if (errors.empty()) throw Error("no errors to average");
    double s = 0.0;
    for (double e : errors) s += e * e;
    return s / static_cast<double>(errors.size());
}

double error_quantile(std::span<const double> errors, double p) {
    if (errors.empty()) throw Error("no errors to rank");
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    auto idx = static_cast<std::size_t>(std::ceil(p * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
}

std::vector<std::pair<double, double>> cpa_curve(std::span<const double> errors) {
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> out;
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double frac = static_cast<double>(i + 1) / n;
        if (!out.empty() && out.back().first == sorted[i]) {
            out.back().second = frac;
        } else {
            out.emplace_back(sorted[i], frac);
        }
    }
    if (!out.empty()) out.back().second = 1.0;
    return out;
}

TimingStats time_queries(const PrecomputedCache& cache, std::span<const TestPoint> testset,
                         const EvalConfig& config, std::size_t repeats) {
    using clock = std::chrono::steady_clock;
    std::vector<double> samples;
    samples.reserve(testset.size() * std::max<std::size_t>(repeats, 1));
    double sink = 0.0;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
        for (const auto& tp : testset) {
            const auto t0 = clock::now();
            const auto est = run(cache, tp.fingerprint, config);
            const auto t1 = clock::now();
            sink += est.coordinates.x;
            samples.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
    }
    TimingStats st;
    st.samples = samples.size();
    if (samples.empty()) return st;
    st.min = *std::min_element(samples.begin(), samples.end());
    st.max = *std::max_element(samples.begin(), samples.end());
    st.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    double ss = 0.0;
    for (double s : samples) ss += (s - st.mean) * (s - st.mean);
    st.std = samples.size() > 1 ? std::sqrt(ss / static_cast<double>(samples.size() - 1)) : 0.0;
    // Keeps the estimate observable so the calls cannot be elided.
    if (sink == std::numeric_limits<double>::infinity()) st.samples = 0;
    return st;
}

std::vector<EvalReport> evaluate(const PrecomputedCache& cache, std::span<const TestPoint> testset,
                                 std::span<const EvalConfig> configs, const EvalOptions& options) {
    if (testset.empty()) throw Error("empty test set");
    std::vector<EvalReport> reports;
    reports.reserve(configs.size());
    for (const auto& cfg : configs) {
        EvalReport rep;
        rep.config = cfg;
        rep.errors.reserve(testset.size());
        for (const auto& tp : testset) {
            const auto est = run(cache, tp.fingerprint, cfg);
            rep.errors.push_back(distance(est.coordinates, tp.truth));
        }
        rep.mse = mean_squared_error(rep.errors);
        rep.median_error = error_quantile(rep.errors, 0.5);
        rep.p90_error = error_quantile(rep.errors, 0.9);
        rep.cpa = cpa_curve(rep.errors);

        const std::size_t timed = options.timing_points == 0 ? testset.size()
                                                             : std::min(options.timing_points, testset.size());
        rep.timing = time_queries(cache, testset.first(timed), cfg, options.timing_repeats);
        rep.predicted_ratio = cfg.is_full() ? 1.0 : predicted_cost(cache, *cfg.k, cfg.h).ratio();
        reports.push_back(std::move(rep));
    }

    const auto is_reference = [&](const EvalConfig& c) {
        return c.is_full() || (*c.k == cache.region_count() && !c.h);
    };
    const auto ref = std::find_if(reports.begin(), reports.end(),
                                  [&](const EvalReport& r) { return is_reference(r.config); });
    for (auto& r : reports) {
        r.measured_ratio = ref == reports.end() || ref->timing.mean <= 0.0
                               ? std::numeric_limits<double>::quiet_NaN()
                               : r.timing.mean / ref->timing.mean;
    }
    return reports;
}

MseCurve mse_vs_h(const PrecomputedCache& cache, std::span<const TestPoint> testset,
                  std::span<const std::size_t> h_range, std::size_t k) {
    if (h_range.empty()) throw Error("empty h range");
    if (testset.empty()) throw Error("empty test set");
    MseCurve curve;
    for (std::size_t h : h_range) {
        std::vector<double> errors;
        errors.reserve(testset.size());
        for (const auto& tp : testset) {
            errors.push_back(distance(locate(cache, tp.fingerprint, k, h).coordinates, tp.truth));
        }
        curve.h.push_back(h);
        curve.mse.push_back(mean_squared_error(errors));
    }
    return curve;
}

std::vector<MseCurve> mse_vs_h(PrecomputedCache cache, const GriddedRFM& rfm, const RandomizedLassoConfig& lasso,
                               std::span<const std::uint64_t> seeds, std::span<const TestPoint> testset,
                               std::span<const std::size_t> h_range, std::size_t k) {
    if (!cache.full) throw Error("mse_vs_h over seeds needs a full cache");
    std::vector<MseCurve> out;
    for (auto seed : seeds) {
        auto cfg = lasso;
        cfg.seed = seed;
        cache.set_profiles(compute_profiles(rfm, cfg));
        auto curve = mse_vs_h(cache, testset, h_range, k);
        curve.seed = seed;
        out.push_back(std::move(curve));
    }
    return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equally long samples");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

JaccardDistancePairs jaccard_distance_structure(const GriddedRFM& rfm) {
    JaccardDistancePairs out;
    const auto& regions = rfm.sub_regions;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = 0; j < regions.size(); ++j) {
            if (i == j || regions[j].key_union.empty()) continue;
            out.jaccard.push_back(modified_jaccard(regions[i].key_union, regions[j].key_union));
            out.distance.push_back(distance(regions[i].bounds.center(), regions[j].bounds.center()));
        }
    }
    if (out.jaccard.size() >= 2) out.spearman = spearman(out.jaccard, out.distance);
    return out;
}

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "config,k,h,points,mse,median_error,p90_error,time_mean,time_min,time_max,time_std,"
           "predicted_ratio,measured_ratio\n";
    out.precision(10);
    for (const auto& r : reports) {
        out << r.config.label << ',' << (r.config.k ? std::to_string(*r.config.k) : std::string("all")) << ','
            << budget_label(r.config.h) << ',' << r.errors.size() << ',' << r.mse << ',' << r.median_error << ','
            << r.p90_error << ',' << r.timing.mean << ',' << r.timing.min << ',' << r.timing.max << ','
            << r.timing.std << ',' << r.predicted_ratio << ',' << r.measured_ratio << '\n';
    }
}

void write_errors_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "point";
    for (const auto& r : reports) out << ',' << r.config.label;
    out << '\n';
    out.precision(17);
    const std::size_t n = reports.empty() ? 0 : reports.front().errors.size();
    for (std::size_t i = 0; i < n; ++i) {
        out << i;
        for (const auto& r : reports) out << ',' << r.errors[i];
        out << '\n';
    }
}

void write_cpa_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "config,error,cumulative_fraction\n";
    out.precision(10);
    for (const auto& r : reports) {
        for (const auto& [e, f] : r.cpa) out << r.config.label << ',' << e << ',' << f << '\n';
    }
}

}  // namespace subloc
