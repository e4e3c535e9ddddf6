#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "subloc/core.hpp"

namespace subloc {

/// Position-on-features regression for one sub-region.
///
/// X holds one row per reference point, each column standardized to zero mean
/// and unit population variance (constant columns are all zero). Y holds the
/// positions centered per coordinate; there is no intercept.
struct RegressionProblem {
    Eigen::MatrixXd X;
    Eigen::MatrixXd Y;
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_stds;  // 0 marks a constant column
    Eigen::VectorXd position_means;
    KeySet keys;                  // column labels, may be empty

    Eigen::Index rows() const noexcept { return X.rows(); }
    Eigen::Index features() const noexcept { return X.cols(); }
    Eigen::Index outputs() const noexcept { return Y.cols(); }
};

struct LassoOptions {
    double tol = 1e-8;               // stop when no coefficient moves more than this in a sweep
    std::size_t max_sweeps = 100000;
};

/// Standardizes raw features and centers positions. Throws on size mismatch or
/// non-finite entries.
RegressionProblem make_problem(const Eigen::MatrixXd& raw_features, const Eigen::MatrixXd& positions,
                               KeySet keys = {});

/// Missing-filled feature vectors over the region's key union against the
/// lattice positions. Needs at least two reference points.
RegressionProblem build_problem(const SubRegion& region, double missing_value);

/// Smallest λ at which every coefficient is zero: (2/M)·max|XᵀY|.
double lambda_max(const RegressionProblem& problem);

/// (1/M)·‖XP − Y‖²_F + λ·Σ|P|.
double lasso_objective(const RegressionProblem& problem, const Eigen::MatrixXd& P, double lambda);

/// Minimizes lasso_objective by cyclic coordinate descent with soft
/// thresholding, column by column (the entrywise penalty separates over
/// outputs). Returns the L×D coefficient matrix.
Eigen::MatrixXd lasso_fit(const RegressionProblem& problem, double lambda, const LassoOptions& options = {});

/// Same, starting from `warm_start` (L×D) instead of zero.
Eigen::MatrixXd lasso_fit(const RegressionProblem& problem, double lambda, const Eigen::MatrixXd& warm_start,
                          const LassoOptions& options = {});

/// Geometric grid from lambda_max down to lambda_max·min_ratio, descending.
/// Empty when lambda_max is zero (nothing to regress on).
std::vector<double> default_lambda_grid(const RegressionProblem& problem, std::size_t count = 20,
                                        double min_ratio = 1e-3);

/// Fold that row `row` is held out in.
inline std::size_t cv_fold_of(std::size_t row, std::size_t folds) noexcept { return row % folds; }

/// Picks the λ from `grid` (positive, descending) with the smallest mean
/// held-out squared position error over `folds` folds. Ties go to the larger λ.
double select_lambda_cv(const RegressionProblem& problem, std::span<const double> grid, std::size_t folds = 5,
                        const LassoOptions& options = {});

}  // namespace subloc
