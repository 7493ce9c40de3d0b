#include "sparselab/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sparselab {

Index default_test_size(Index n, Index folds)
{
    if (folds < 1) {
        throw InvalidArgument("folds must be positive");
    }
    const auto t = static_cast<Index>(std::ceil(std::log(static_cast<Scalar>(n))));
    const Index size = std::max<Index>(t, 1);
    if (size * folds > n) {
        return n / folds;
    }
    return size;
}

std::vector<Scalar> default_grid(const RegressionProblem& problem, Scalar sigma_hat, Scalar c, FitMethod method)
{
    if (!(sigma_hat > 0.0) || !(c > 0.0)) {
        throw InvalidArgument("default_grid: sigma_hat and c must be positive");
    }
    Scalar center = default_lambda(problem.n(), problem.p(), sigma_hat);
    if (method == FitMethod::Lasso) {
        center *= 2.0;
    }
    if (!(center > 0.0)) {
        throw InvalidArgument("default_grid: lambda_default is zero (p = 1?)");
    }
    const Scalar step = center * std::min<Scalar>(1.0, c / std::sqrt(2.0));
    const Scalar lo = center / 10.0;
    const Scalar hi = center * 10.0;
    const auto below = static_cast<Index>(std::floor((center - lo) / step * (1.0 + 1e-12)));
    const auto above = static_cast<Index>(std::floor((hi - center) / step * (1.0 + 1e-12)));
    std::vector<Scalar> grid;
    for (Index k = -below; k <= above; ++k) {
        grid.push_back(center + static_cast<Scalar>(k) * step);
    }
    return grid;
}

std::vector<Scalar> lambda_max_grid(const RegressionProblem& problem, FitMethod method, Index count, Scalar min_ratio)
{
    if (count < 1 || !(min_ratio > 0.0 && min_ratio <= 1.0)) {
        throw InvalidArgument("lambda_max_grid: need count >= 1 and 0 < min_ratio <= 1");
    }
    Scalar top = dantzig_lambda_max(problem);
    if (method == FitMethod::Lasso) {
        top *= 2.0;
    }
    std::vector<Scalar> grid(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) {
        const Scalar t = count == 1 ? 1.0 : static_cast<Scalar>(k) / static_cast<Scalar>(count - 1);
        grid[static_cast<std::size_t>(k)] = top * std::pow(min_ratio, 1.0 - t);
    }
    grid.back() = top;
    return grid;
}

void validate(const CvPlan& plan, Index n)
{
    if (plan.folds < 1) {
        throw InvalidArgument("cv: folds must be positive");
    }
    if (plan.grid.empty()) {
        throw InvalidArgument("cv: empty lambda grid");
    }
    for (std::size_t k = 0; k < plan.grid.size(); ++k) {
        if (!(plan.grid[k] >= 0.0) || !std::isfinite(plan.grid[k])) {
            throw InvalidArgument("cv: grid values must be finite and nonnegative");
        }
        if (k > 0 && !(plan.grid[k] > plan.grid[k - 1])) {
            throw InvalidArgument("cv: grid must be strictly ascending");
        }
    }
    const Index t = plan.test_size > 0 ? plan.test_size : default_test_size(n, plan.folds);
    if (t < 1 || t * plan.folds > n) {
        throw InvalidArgument("cv: folds * test_size exceeds n");
    }
    if (n - t < 2) {
        throw InvalidArgument("cv: training split must keep at least two observations");
    }
    if (plan.method != FitMethod::Dantzig && plan.method != FitMethod::Lasso) {
        throw InvalidArgument("cv: method must be dantzig or lasso");
    }
}

FitResult fit_with(FitMethod method, const RegressionProblem& problem, Scalar lambda)
{
    switch (method) {
    case FitMethod::Dantzig:
        return dantzig_fit(problem, lambda);
    case FitMethod::Lasso:
        return lasso_fit(problem, lambda);
    case FitMethod::Chebyshev:
        return chebyshev_fit(problem);
    case FitMethod::SoftThreshold:
        return soft_threshold_fit(problem, lambda);
    }
    throw InvalidArgument("unknown method");
}

namespace {

std::vector<std::vector<Index>> draw_folds(Index n, Index folds, Index test_size, std::mt19937_64& rng)
{
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
    for (Index f = 0; f < folds; ++f) {
        auto& fold = out[static_cast<std::size_t>(f)];
        fold.assign(order.begin() + f * test_size, order.begin() + (f + 1) * test_size);
        std::sort(fold.begin(), fold.end());
    }
    return out;
}

std::vector<Index> complement(Index n, const std::vector<Index>& taken)
{
    std::vector<char> mask(static_cast<std::size_t>(n), 0);
    for (Index i : taken) {
        mask[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<Index> rest;
    for (Index i = 0; i < n; ++i) {
        if (!mask[static_cast<std::size_t>(i)]) {
            rest.push_back(i);
        }
    }
    return rest;
}

bool has_zero_column(const Matrix& x)
{
    for (Index j = 0; j < x.cols(); ++j) {
        if (x.col(j).squaredNorm() == 0.0) {
            return true;
        }
    }
    return false;
}

}  // namespace

CvResult cross_validate(const RegressionProblem& problem, const CvPlan& plan)
{
    const Index n = problem.n();
    validate(plan, n);
    const Index test_size = plan.test_size > 0 ? plan.test_size : default_test_size(n, plan.folds);
    std::mt19937_64 rng(plan.seed);

    std::vector<std::vector<Index>> folds;
    for (int attempt = 0;; ++attempt) {
        folds = draw_folds(n, plan.folds, test_size, rng);
        bool degenerate = false;
        for (const auto& fold : folds) {
            const auto train = problem.select_rows(complement(n, fold));
            if (has_zero_column(train.design())) {
                degenerate = true;
                break;
            }
        }
        if (!degenerate) {
            break;
        }
        if (attempt >= 1) {
            throw DegenerateFold("cv: a training split has an identically zero column");
        }
    }

    CvResult result;
    result.test_folds = folds;
    result.test_size = test_size;
    result.method = plan.method;
    result.curve.resize(plan.grid.size());
    for (std::size_t k = 0; k < plan.grid.size(); ++k) {
        result.curve[k].lambda = plan.grid[k];
        result.curve[k].fold_errors.resize(folds.size());
    }
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const RegressionProblem train = problem.select_rows(complement(n, folds[f]));
        const RegressionProblem test = problem.select_rows(folds[f]);
        for (std::size_t k = 0; k < plan.grid.size(); ++k) {
            const FitResult fit = fit_with(plan.method, train, plan.grid[k]);
            const Vector err = test.response() - test.design() * fit.coefficients.values();
            result.curve[k].fold_errors[f] = err.squaredNorm() / static_cast<Scalar>(test_size);
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 0; k < result.curve.size(); ++k) {
        auto& point = result.curve[k];
        const auto v = static_cast<Scalar>(point.fold_errors.size());
        point.mean_error = std::accumulate(point.fold_errors.begin(), point.fold_errors.end(), 0.0) / v;
        Scalar ss = 0.0;
        for (Scalar e : point.fold_errors) {
            ss += (e - point.mean_error) * (e - point.mean_error);
        }
        point.std_error = point.fold_errors.size() > 1 ? std::sqrt(ss / (v - 1.0) / v) : 0.0;
        // Strict comparison keeps the smaller lambda on ties.
        if (point.mean_error < result.curve[best].mean_error) {
            best = k;
        }
    }
    result.chosen_lambda = result.curve[best].lambda;
    return result;
}

}  // namespace sparselab
