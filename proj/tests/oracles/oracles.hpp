#pragma once

// Reference implementations used only by the tests. They are written from the
// definitions, share no code with the library beyond its plain data types,
// and favour obviousness over speed (long double, exhaustive scans).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "subloc/core.hpp"

namespace oracle {

using subloc::FeatureKey;
using subloc::GriddedRFM;
using subloc::Point2;
using subloc::ReferenceRecord;

// Index of the record nearest to p, lowest index on ties.
inline std::size_t nearest_record(const std::vector<ReferenceRecord>& records, Point2 p) {
    std::size_t best = 0;
    long double best_d = std::numeric_limits<long double>::infinity();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const long double dx = static_cast<long double>(records[i].position.x) - p.x;
        const long double dy = static_cast<long double>(records[i].position.y) - p.y;
        const long double d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline double modified_jaccard(const std::vector<FeatureKey>& region, const std::vector<FeatureKey>& user) {
    const std::set<std::uint64_t> a = [&] {
        std::set<std::uint64_t> s;
        for (auto k : region) s.insert(k.id);
        return s;
    }();
    std::set<std::uint64_t> b;
    for (auto k : user) b.insert(k.id);
    std::size_t inter = 0;
    for (auto k : b) inter += a.count(k);
    std::set<std::uint64_t> uni = a;
    uni.insert(b.begin(), b.end());
    return 0.5 * (static_cast<double>(inter) / static_cast<double>(uni.size()) +
                  static_cast<double>(inter) / static_cast<double>(b.size()));
}

// Gaussian KDE density with Scott bandwidth, directly from the definition.
struct Kde {
    std::vector<long double> centers;
    long double h = 1.0L;

    Kde(std::vector<double> values, double floor) {
        std::sort(values.begin(), values.end());
        centers.assign(values.begin(), values.end());
        const long double n = static_cast<long double>(centers.size());
        long double mean = 0.0L;
        for (auto c : centers) mean += c;
        mean /= n;
        long double ss = 0.0L;
        for (auto c : centers) ss += (c - mean) * (c - mean);
        const long double sd = centers.size() > 1 ? std::sqrt(ss / (n - 1.0L)) : 0.0L;
        h = std::max(sd * std::pow(n, -0.2L), static_cast<long double>(floor));
    }

    long double pdf(long double x) const {
        const long double pi = 3.141592653589793238462643383279502884L;
        long double s = 0.0L;
        for (auto c : centers) {
            const long double z = (x - c) / h;
            s += std::exp(-0.5L * z * z);
        }
        return s / (static_cast<long double>(centers.size()) * h * std::sqrt(2.0L * pi));
    }
};

struct MapResult {
    std::size_t region = 0;
    Point2 where;
    long double log_posterior = 0.0L;
};

// Exhaustive naive-Bayes MAP over every lattice point of the RFM: for each
// user key known to the RFM, a KDE trained on the missing-filled values of
// that key at every lattice point within `radius` of the candidate.
inline MapResult brute_force_map(const GriddedRFM& rfm, const subloc::Fingerprint& user, double radius,
                                 double missing, double floor) {
    std::vector<std::pair<FeatureKey, double>> used;
    for (std::size_t i = 0; i < user.size(); ++i) {
        const auto k = user.keys()[i];
        if (std::binary_search(rfm.roi_key_union.begin(), rfm.roi_key_union.end(), k)) {
            used.emplace_back(k, user.values()[i]);
        }
    }
    std::vector<const ReferenceRecord*> lattice;
    for (const auto& r : rfm.sub_regions) {
        for (const auto& p : r.reference_points) lattice.push_back(&p);
    }
    MapResult best;
    bool found = false;
    for (const auto& region : rfm.sub_regions) {
        for (const auto& cand : region.reference_points) {
            long double score = 0.0L;
            for (const auto& [key, value] : used) {
                std::vector<double> vals;
                for (const auto* p : lattice) {
                    if (subloc::distance(p->position, cand.position) <= radius * (1.0 + 1e-12)) {
                        vals.push_back(p->fingerprint.find(key).value_or(missing));
                    }
                }
                score += std::log(Kde(vals, floor).pdf(value));
            }
            bool take = !found || score > best.log_posterior;
            if (found && score == best.log_posterior) {
                take = region.index < best.region || (region.index == best.region && cand.position < best.where);
            }
            if (take) {
                best = {region.index, cand.position, score};
                found = true;
            }
        }
    }
    return best;
}

// Minimizes f over R^L by nested pattern search on a full (2m+1)^L grid around
// the incumbent, halving the half-width whenever the centre stays best. f is
// assumed convex.
inline Eigen::VectorXd grid_search_min(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::Index dims,
                                       double radius, int points_per_side = 5, int rounds = 60) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dims);
    double fx = f(x);
    const int side = 2 * points_per_side + 1;
    std::size_t total = 1;
    for (Eigen::Index d = 0; d < dims; ++d) total *= static_cast<std::size_t>(side);
    Eigen::VectorXd trial(dims);
    for (int round = 0; round < rounds;) {
        const double step = radius / points_per_side;
        Eigen::VectorXd best = x;
        double fbest = fx;
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (Eigen::Index d = 0; d < dims; ++d) {
                const int offset = static_cast<int>(c % static_cast<std::size_t>(side)) - points_per_side;
                c /= static_cast<std::size_t>(side);
                trial[d] = x[d] + offset * step;
            }
            const double ft = f(trial);
            if (ft < fbest) {
                fbest = ft;
                best = trial;
            }
        }
        if (fbest < fx) {
            x = best;
            fx = fbest;
        } else {
            radius /= 2.0;
            ++round;
        }
    }
    return x;
}

// Minimum of (1/M)·‖X·p − y‖² + λ·‖p‖₁ for every column y of Y, summed, by
// grid search. Needs XᵀX positive definite.
inline double lasso_min_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double lambda) {
    const double m = static_cast<double>(X.rows());
    const Eigen::MatrixXd G = X.transpose() * X / m;
    const double eig_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
    double total = 0.0;
    for (Eigen::Index d = 0; d < Y.cols(); ++d) {
        const Eigen::VectorXd c = X.transpose() * Y.col(d) / m;
        const double yy = Y.col(d).squaredNorm() / m;
        auto f = [&](const Eigen::VectorXd& p) {
            return p.dot(G * p) - 2.0 * c.dot(p) + yy + lambda * p.lpNorm<1>();
        };
        // Any minimizer satisfies pᵀGp − 2cᵀp ≤ 0, hence ‖p‖ ≤ 2‖c‖/eig_min.
        double radius = 2.0 * c.norm() / eig_min + 1e-6;
        if (lambda > 0.0) radius = std::min(radius, yy / lambda + 1e-6);
        total += f(grid_search_min(f, X.cols(), radius));
    }
    return total;
}

// Largest violation of the LASSO optimality conditions at P.
inline double lasso_kkt_violation(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& P,
                                  double lambda) {
    const double m = static_cast<double>(X.rows());
    const Eigen::MatrixXd grad = 2.0 / m * X.transpose() * (X * P - Y);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        for (Eigen::Index j = 0; j < P.cols(); ++j) {
            const double g = grad(i, j);
            const double v = P(i, j) != 0.0 ? std::abs(g + lambda * (P(i, j) > 0 ? 1.0 : -1.0))
                                            : std::max(0.0, std::abs(g) - lambda);
            worst = std::max(worst, v);
        }
    }
    return worst;
}

// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Coefficient of determination of the least-squares fit of each position
// coordinate on one feature (with intercept), summed over coordinates.
inline double single_feature_r2(const std::vector<double>& feature, const std::vector<Point2>& positions) {
    const auto n = static_cast<double>(feature.size());
    double mf = 0.0;
    for (double v : feature) mf += v;
    mf /= n;
    double sff = 0.0;
    for (double v : feature) sff += (v - mf) * (v - mf);
    if (sff == 0.0) return 0.0;
    double total = 0.0;
    for (int coord = 0; coord < 2; ++coord) {
        double my = 0.0;
        for (const auto& p : positions) my += coord ? p.y : p.x;
        my /= n;
        double sfy = 0.0;
        double syy = 0.0;
        for (std::size_t i = 0; i < feature.size(); ++i) {
            const double y = (coord ? positions[i].y : positions[i].x) - my;
            sfy += (feature[i] - mf) * y;
            syy += y * y;
        }
        if (syy > 0.0) total += sfy * sfy / (sff * syy);
    }
    return total;
}

}  // namespace oracle
