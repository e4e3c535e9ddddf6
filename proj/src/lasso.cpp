#include "subloc/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subloc/error.hpp"

namespace subloc {

namespace {

constexpr double kConstantColumnStd = 1e-10;

double soft_threshold(double z, double t) noexcept {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Cyclic coordinate descent on 0.5·(βᵀGβ) − cᵀβ + (λ/2)·|β|₁, which has the
// same minimizer as (1/M)‖Xβ − y‖² + λ|β|₁ with G = XᵀX/M and c = Xᵀy/M.
// Alternates full sweeps with sweeps over the nonzero coefficients.
void coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double lambda,
                        Eigen::VectorXd& beta, const LassoOptions& opt) {
    const Eigen::Index n = xty.size();
    Eigen::VectorXd grad = gram * beta - xty;
    const double half = lambda / 2.0;

    auto update = [&](Eigen::Index l) -> double {
        const double g = gram(l, l);
        double next = 0.0;
        if (g > 0.0) next = soft_threshold(g * beta(l) - grad(l), half) / g;
        const double delta = next - beta(l);
        if (delta != 0.0) {
            grad.noalias() += gram.col(l) * delta;
            beta(l) = next;
        }
        return std::abs(delta);
    };

    std::vector<Eigen::Index> active;
    std::size_t sweeps = 0;
    while (sweeps < opt.max_sweeps) {
        double moved = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) moved = std::max(moved, update(l));
        ++sweeps;
        if (moved < opt.tol) break;

        active.clear();
        for (Eigen::Index l = 0; l < n; ++l) {
            if (beta(l) != 0.0) active.push_back(l);
        }
        while (sweeps < opt.max_sweeps) {
            double m = 0.0;
            for (Eigen::Index l : active) m = std::max(m, update(l));
            ++sweeps;
            if (m < opt.tol) break;
        }
    }
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw Error(std::string("non-finite entries in ") + what);
}

}  // namespace

RegressionProblem make_problem(const Eigen::MatrixXd& raw_features, const Eigen::MatrixXd& positions, KeySet keys) {
    if (raw_features.rows() != positions.rows()) throw Error("feature and position row counts differ");
    if (!keys.empty() && static_cast<Eigen::Index>(keys.size()) != raw_features.cols()) {
        throw Error("key count does not match feature columns");
    }
    require_finite(raw_features, "features");
    require_finite(positions, "positions");
    const auto m = static_cast<double>(raw_features.rows());

    RegressionProblem p;
    p.keys = std::move(keys);
    p.column_means = raw_features.colwise().mean().transpose();
    p.X = raw_features.rowwise() - p.column_means.transpose();
    p.column_stds.resize(p.X.cols());
    for (Eigen::Index j = 0; j < p.X.cols(); ++j) {
        const double sd = std::sqrt(p.X.col(j).squaredNorm() / m);
        if (sd < kConstantColumnStd) {
            p.column_stds(j) = 0.0;
            p.X.col(j).setZero();
        } else {
            p.column_stds(j) = sd;
            p.X.col(j) /= sd;
        }
    }
    p.position_means = positions.colwise().mean().transpose();
    p.Y = positions.rowwise() - p.position_means.transpose();
    return p;
}

RegressionProblem build_problem(const SubRegion& region, double missing_value) {
    const auto& pts = region.reference_points;
    if (pts.size() < 2) throw Error("sub-region needs at least 2 reference points");
    const auto m = static_cast<Eigen::Index>(pts.size());
    const auto l = static_cast<Eigen::Index>(region.key_union.size());
    Eigen::MatrixXd raw(m, l);
    Eigen::MatrixXd pos(m, 2);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& rec = pts[static_cast<std::size_t>(j)];
        const auto f = feature_vector(rec, region.key_union, missing_value);
        for (Eigen::Index c = 0; c < l; ++c) raw(j, c) = f[static_cast<std::size_t>(c)];
        pos(j, 0) = rec.position.x;
        pos(j, 1) = rec.position.y;
    }
    return make_problem(raw, pos, region.key_union);
}

double lambda_max(const RegressionProblem& problem) {
    if (problem.rows() == 0 || problem.features() == 0) return 0.0;
    const Eigen::MatrixXd xty = problem.X.transpose() * problem.Y;
    return 2.0 / static_cast<double>(problem.rows()) * xty.cwiseAbs().maxCoeff();
}

double lasso_objective(const RegressionProblem& problem, const Eigen::MatrixXd& P, double lambda) {
    const double fit = (problem.X * P - problem.Y).squaredNorm() / static_cast<double>(problem.rows());
    return fit + lambda * P.cwiseAbs().sum();
}

Eigen::MatrixXd lasso_fit(const RegressionProblem& problem, double lambda, const LassoOptions& options) {
    return lasso_fit(problem, lambda, Eigen::MatrixXd::Zero(problem.features(), problem.outputs()), options);
}

Eigen::MatrixXd lasso_fit(const RegressionProblem& problem, double lambda, const Eigen::MatrixXd& warm_start,
                          const LassoOptions& options) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be finite and non-negative");
    if (problem.rows() == 0) throw Error("empty regression problem");
    require_finite(problem.X, "design matrix");
    require_finite(problem.Y, "positions");
    if (warm_start.rows() != problem.features() || warm_start.cols() != problem.outputs()) {
        throw Error("warm start has wrong shape");
    }
    const double inv_m = 1.0 / static_cast<double>(problem.rows());
    const Eigen::MatrixXd gram = (problem.X.transpose() * problem.X) * inv_m;
    const Eigen::MatrixXd xty = (problem.X.transpose() * problem.Y) * inv_m;

    Eigen::MatrixXd P = warm_start;
    for (Eigen::Index d = 0; d < problem.outputs(); ++d) {
        Eigen::VectorXd beta = P.col(d);
        coordinate_descent(gram, xty.col(d), lambda, beta, options);
        P.col(d) = beta;
    }
    return P;
}

std::vector<double> default_lambda_grid(const RegressionProblem& problem, std::size_t count, double min_ratio) {
    const double top = lambda_max(problem);
    if (!(top > 0.0) || count == 0) return {};
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = top * std::pow(min_ratio, t);
    }
    return grid;
}

double select_lambda_cv(const RegressionProblem& problem, std::span<const double> grid, std::size_t folds,
                        const LassoOptions& options) {
    if (grid.empty()) throw Error("empty lambda grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw Error("lambda grid entries must be positive");
        if (i > 0 && grid[i] > grid[i - 1]) throw Error("lambda grid must be descending");
    }
    if (folds < 2) throw Error("cross validation needs at least 2 folds");
    const auto m = static_cast<std::size_t>(problem.rows());
    if (m < folds) throw Error("fewer rows than cross-validation folds");
    if (grid.size() == 1) return grid.front();

    std::vector<double> error(grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<Eigen::Index> train;
        std::vector<Eigen::Index> test;
        for (std::size_t j = 0; j < m; ++j) {
            (cv_fold_of(j, folds) == f ? test : train).push_back(static_cast<Eigen::Index>(j));
        }
        const Eigen::MatrixXd x_train = problem.X(train, Eigen::all);
        const Eigen::MatrixXd y_train = problem.Y(train, Eigen::all);
        RegressionProblem sub;
        const Eigen::RowVectorXd x_mean = x_train.colwise().mean();
        const Eigen::RowVectorXd y_mean = y_train.colwise().mean();
        sub.X = x_train.rowwise() - x_mean;
        sub.Y = y_train.rowwise() - y_mean;

        const Eigen::MatrixXd x_test = problem.X(test, Eigen::all).rowwise() - x_mean;
        const Eigen::MatrixXd y_test = problem.Y(test, Eigen::all).rowwise() - y_mean;

        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(sub.features(), sub.outputs());
        for (std::size_t g = 0; g < grid.size(); ++g) {
            P = lasso_fit(sub, grid[g], P, options);
            error[g] += (x_test * P - y_test).squaredNorm() / static_cast<double>(test.size());
        }
    }

    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        if (error[g] < error[best]) best = g;
    }
    return grid[best];
}

}  // namespace subloc
