#pragma once

// Monte-Carlo experiments: the estimation-error rate study over a grid of
// (n, p, s, sigma, design) cells, and the sup-norm versus Dantzig objective
// comparison on a cosine-dictionary family with spiky residuals.

#include "sparselab/estimators.hpp"
#include "sparselab/simulate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparselab {

struct RateCell {
    Index n = 200;
    Index p = 400;
    Index s = 5;
    Scalar sigma = 1.0;
    DesignKind design = DesignKind::IidGaussian;
    Scalar correlation = 0.0;  // custom-correlation only
};

struct ExperimentConfig {
    std::vector<RateCell> cells;
    Index replications = 50;
    std::uint64_t seed = 0;
    std::vector<FitMethod> estimators{FitMethod::Dantzig, FitMethod::Lasso};
    // Dantzig runs at lambda_scale * lambda_default(n, p, sigma), the Lasso at
    // twice that (the two coincide on orthogonal designs at that ratio).
    Scalar lambda_scale = 1.0;
    std::string output;
};

void validate(const ExperimentConfig& config);

/// n in {base, 2 base, ...} with p = p_factor * n, the shape of the default study.
std::vector<RateCell> doubling_cells(Index n0, Index count, Index p_factor, Index s, Scalar sigma,
                                     DesignKind design = DesignKind::IidGaussian);

struct RateRecord {
    Index cell = 0;
    Index replication = 0;
    FitMethod method = FitMethod::Dantzig;
    std::uint64_t seed = 0;
    Scalar lambda = 0.0;
    std::optional<Scalar> error;  // |beta_hat - beta0|_2, absent on failure
    bool converged = false;
    std::string failure;
};

struct RateCellSummary {
    Index cell = 0;
    FitMethod method = FitMethod::Dantzig;
    RateCell spec;
    Scalar predictor = 0.0;  // sqrt((s / n) log p)
    Scalar lambda = 0.0;
    Index completed = 0;
    Index failures = 0;
    std::optional<Scalar> mean_error;
    std::optional<Scalar> median_error;
};

struct RateSlope {
    FitMethod method = FitMethod::Dantzig;
    std::optional<Scalar> slope;  // OLS of log(mean error) on log(predictor)
    std::optional<Scalar> intercept;
    Index cells_used = 0;
};

struct RateStudyResult {
    ExperimentConfig config;
    std::vector<RateCellSummary> summaries;  // cell-major, estimator order within a cell
    std::vector<RateSlope> slopes;
    std::vector<RateRecord> records;         // cell, replication, estimator order
};

/// Thread count from SPARSELAB_THREADS (default: hardware concurrency).
unsigned worker_threads();

RateStudyResult run_rate_study(const ExperimentConfig& config);

/// OLS slope and intercept of y on x; absent with fewer than two distinct x.
std::optional<std::pair<Scalar, Scalar>> ols_line(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

struct ComparisonConfig {
    Index n = 100;              // training sample size
    Index dictionary_size = 40; // cos(pi j x), j = 0..size-1
    Index terms = 5;
    Scalar sigma = 0.5;
    Scalar spike_probability = 0.01;
    Scalar spike_scale = 25.0;  // spike = +-spike_scale * sigma
    Index test_size = 2000;
    Index replications = 50;
    std::uint64_t seed = 0;
    std::optional<Scalar> lambda;  // default lambda_default(n, size, sigma)
    Scalar outlier = 0.0;          // > 0: also refit with one gross outlier appended
};

void validate(const ComparisonConfig& config);

struct ComparisonRecord {
    Index replication = 0;
    std::uint64_t seed = 0;
    Index spikes = 0;
    Scalar dantzig_mse = 0.0;     // fresh (x, y) draws
    Scalar chebyshev_mse = 0.0;
    Scalar dantzig_f_mse = 0.0;   // against the noise-free f
    Scalar chebyshev_f_mse = 0.0;
    Scalar dantzig_coef_error = 0.0;
    Scalar chebyshev_coef_error = 0.0;
    bool dantzig_wins = false;
    std::optional<Scalar> dantzig_outlier_ratio;   // coefficient error after / before
    std::optional<Scalar> chebyshev_outlier_ratio;
    std::string failure;
};

struct ComparisonTable {
    ComparisonConfig config;
    Scalar lambda = 0.0;
    Index completed = 0;
    Index dantzig_wins = 0;
    Scalar dantzig_win_rate = 0.0;
    Scalar mean_dantzig_mse = 0.0;
    Scalar mean_chebyshev_mse = 0.0;
    Scalar median_dantzig_mse = 0.0;
    Scalar median_chebyshev_mse = 0.0;
    std::vector<ComparisonRecord> records;
};

/// Design matrix cos(pi j x_i), rows = points, columns j = 0..size-1.
Matrix cosine_dictionary(const Vector& x, Index size);

ComparisonTable run_objective_comparison(const ComparisonConfig& config);

Scalar median(std::vector<Scalar> values);

}  // namespace sparselab
