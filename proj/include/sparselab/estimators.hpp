#pragma once

#include "sparselab/lp.hpp"
#include "sparselab/problem.hpp"

#include <cstdint>
#include <string>

namespace sparselab {

enum class FitMethod { Dantzig, Lasso, Chebyshev, SoftThreshold };

std::string to_string(FitMethod method);
FitMethod fit_method_from_string(const std::string& name);

struct FitResult {
    CoefficientVector coefficients;
    Scalar lambda = 0.0;
    FitMethod method = FitMethod::Dantzig;
    Scalar objective_value = 0.0;
    Index iterations = 0;
    bool converged = true;
};

struct LassoOptions {
    Scalar tolerance = 1e-10;  // max coefficient change per sweep
    Index max_sweeps = 10000;
    /// Geometric ratio between consecutive penalties on the warm-start path.
    Scalar path_ratio = 0.8;
    /// Re-solve the stationarity equations on the final active set.
    bool polish = true;
};

struct DantzigOptions {
    Scalar feasibility_tolerance = 1e-9;
    Scalar dual_tolerance = 1e-9;
    Index max_rounds = 200;
    /// Rows/columns added per round at most.
    Index batch = 64;
    LpOptions lp;
};

/// Dantzig selector: argmin |beta|_1 s.t. |X^T (Y - X beta)|_inf <= lambda.
///
/// Solved as the LP in beta = b+ - b- (b+, b- >= 0): min sum(b+ + b-),
/// -lambda <= X^T (Y - X beta) <= lambda. Only a working set of columns and
/// constraint rows enters the LP; the set grows until every omitted row is
/// satisfied and every omitted column prices out (|X_j^T X_C w| <= 1 for the
/// LP's constraint multipliers w), which certifies optimality for the full
/// problem. The working set starts from the Lasso solution at 2 * lambda,
/// which is feasible for the Dantzig constraint.
FitResult dantzig_fit(const RegressionProblem& problem, Scalar lambda, const DantzigOptions& options = {});

/// Lasso: argmin |Y - X beta|^2 + lambda |beta|_1 (no 1/2 or 1/n factor), by
/// cyclic coordinate descent warm-started along a decreasing penalty path.
FitResult lasso_fit(const RegressionProblem& problem, Scalar lambda, const LassoOptions& options = {});

/// argmin |Y - X beta|_inf as an LP in (beta, t).
FitResult chebyshev_fit(const RegressionProblem& problem, const LpOptions& options = {});

/// Closed-form soft threshold beta_j = soft(X_j^T Y / n, lambda / n). Equals
/// the Dantzig selector (and the Lasso at 2 * lambda) when X^T X = n I.
FitResult soft_threshold_fit(const RegressionProblem& problem, Scalar lambda);

/// max(0, |X^T (Y - X beta)|_inf - lambda).
Scalar dantzig_infeasibility(const RegressionProblem& problem, const Vector& beta, Scalar lambda);

/// Largest violation of the Lasso stationarity conditions
///   2 X_j^T r = lambda sign(beta_j)   (beta_j != 0)
///   |2 X_j^T r| <= lambda             (beta_j == 0)
Scalar lasso_kkt_violation(const RegressionProblem& problem, const Vector& beta, Scalar lambda);

Scalar lasso_objective(const RegressionProblem& problem, const Vector& beta, Scalar lambda);

/// Smallest Dantzig lambda giving beta = 0, i.e. |X^T Y|_inf. The Lasso value is twice this.
Scalar dantzig_lambda_max(const RegressionProblem& problem);

/// sigma * sqrt(2 n log p), the universal order for the raw constraint
/// |X^T (Y - X beta)|_inf <= lambda under |X_j|^2 = n.
Scalar default_lambda(Index n, Index p, Scalar sigma);

struct SigmaOptions {
    Index folds = 5;
    Index grid_size = 20;
    Scalar grid_min_ratio = 1e-4;
    std::uint64_t seed = 0;
};

/// Residual scale after a cross-validated Lasso: choose lambda by CV, fit the
/// Lasso on all data, refit least squares on its support S and return
/// sqrt(RSS / (n - |S|)). Throws DegenerateFit when |S| >= n.
Scalar estimate_sigma(const RegressionProblem& problem, const SigmaOptions& options = {});

}  // namespace sparselab
