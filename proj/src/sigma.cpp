#include "sparselab/cv.hpp"
#include "sparselab/estimators.hpp"

#include <cmath>

namespace sparselab {

Scalar estimate_sigma(const RegressionProblem& problem, const SigmaOptions& options)
{
    const Index n = problem.n();
    if (n < 3) {
        throw InvalidArgument("estimate_sigma needs n >= 3");
    }
    CvPlan plan;
    plan.folds = options.folds;
    plan.method = FitMethod::Lasso;
    plan.seed = options.seed;
    plan.grid = lambda_max_grid(problem, FitMethod::Lasso, options.grid_size, options.grid_min_ratio);
    const CvResult cv = cross_validate(problem, plan);

    const FitResult fit = lasso_fit(problem, cv.chosen_lambda);
    const IndexSet support = fit.coefficients.support();
    const auto df = static_cast<Index>(support.size());
    if (df >= n) {
        throw DegenerateFit("estimate_sigma: Lasso support size " + std::to_string(df) + " >= n");
    }
    Scalar rss = 0.0;
    try {
        rss = least_squares(problem, support).rss;
    } catch (const RankDeficient&) {
        rss = (problem.response() - problem.design() * fit.coefficients.values()).squaredNorm();
    }
    return std::sqrt(rss / static_cast<Scalar>(n - df));
}

}  // namespace sparselab
