#pragma once

#include "sparselab/estimators.hpp"

#include <cstdint>
#include <vector>

namespace sparselab {

struct CvPlan {
    Index folds = 5;
    Index test_size = 0;  // 0 => ceil(log n), reduced to floor(n / folds) when needed
    std::vector<Scalar> grid;
    FitMethod method = FitMethod::Dantzig;
    std::uint64_t seed = 0;
};

struct CvPoint {
    Scalar lambda = 0.0;
    Scalar mean_error = 0.0;
    Scalar std_error = 0.0;
    std::vector<Scalar> fold_errors;
};

struct CvResult {
    Scalar chosen_lambda = 0.0;
    std::vector<CvPoint> curve;                 // ascending lambda
    std::vector<std::vector<Index>> test_folds; // observation indices per fold
    Index test_size = 0;
    FitMethod method = FitMethod::Dantzig;
};

/// ceil(log n), or floor(n / folds) when folds * ceil(log n) exceeds n.
Index default_test_size(Index n, Index folds);

/// Lambda grid around lambda_default = sigma_hat * sqrt(2 n log p) (in the
/// method's own units: doubled for the Lasso). Points lambda_default + k * step
/// covering [lambda_default / 10, 10 lambda_default], where
/// step = lambda_default * min(1, c / sqrt(2)); at least ten points.
std::vector<Scalar> default_grid(const RegressionProblem& problem, Scalar sigma_hat, Scalar c,
                                 FitMethod method = FitMethod::Dantzig);

/// Geometric grid of `count` points from lambda_max * min_ratio up to
/// lambda_max, the smallest penalty giving the zero fit.
std::vector<Scalar> lambda_max_grid(const RegressionProblem& problem, FitMethod method, Index count,
                                    Scalar min_ratio);

void validate(const CvPlan& plan, Index n);

/// V disjoint random test sets of test_size observations each; for every
/// fold and grid value, fit on the remaining rows and score the mean squared
/// prediction error on the held-out rows. The chosen lambda minimizes the
/// fold-averaged error; ties go to the smaller lambda.
CvResult cross_validate(const RegressionProblem& problem, const CvPlan& plan);

FitResult fit_with(FitMethod method, const RegressionProblem& problem, Scalar lambda);

}  // namespace sparselab
