#include "sparselab/estimators.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparselab {

std::string to_string(FitMethod method)
{
    switch (method) {
    case FitMethod::Dantzig:
        return "dantzig";
    case FitMethod::Lasso:
        return "lasso";
    case FitMethod::Chebyshev:
        return "chebyshev";
    case FitMethod::SoftThreshold:
        return "soft-threshold";
    }
    return "unknown";
}

FitMethod fit_method_from_string(const std::string& name)
{
    if (name == "dantzig") {
        return FitMethod::Dantzig;
    }
    if (name == "lasso") {
        return FitMethod::Lasso;
    }
    if (name == "chebyshev") {
        return FitMethod::Chebyshev;
    }
    if (name == "soft-threshold") {
        return FitMethod::SoftThreshold;
    }
    throw InvalidArgument("unknown fit method '" + name + "'");
}

namespace {

void require_lambda(Scalar lambda)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("lambda must be finite and nonnegative");
    }
}

FitResult zero_fit(const RegressionProblem& problem, Scalar lambda, FitMethod method, Scalar objective)
{
    FitResult fit;
    fit.coefficients = CoefficientVector(Vector::Zero(problem.p()));
    fit.lambda = lambda;
    fit.method = method;
    fit.objective_value = objective;
    fit.iterations = 0;
    fit.converged = true;
    return fit;
}

// Cyclic coordinate descent for one penalty; beta and residual are updated in
// place. Returns (sweeps, converged).
std::pair<Index, bool> coordinate_descent(const Matrix& x, const Vector& col_sq, Scalar lambda,
                                          const LassoOptions& options, Index sweep_budget, Vector& beta,
                                          Vector& residual)
{
    const Index p = x.cols();
    const Scalar half = 0.5 * lambda;
    auto update = [&](Index j) -> Scalar {
        if (col_sq(j) == 0.0) {
            return 0.0;
        }
        const Scalar old = beta(j);
        const Scalar z = x.col(j).dot(residual) + col_sq(j) * old;
        const Scalar fresh = soft_threshold(z, half) / col_sq(j);
        if (fresh != old) {
            residual.noalias() -= (fresh - old) * x.col(j);
            beta(j) = fresh;
        }
        return std::abs(fresh - old);
    };

    Index sweeps = 0;
    while (sweeps < sweep_budget) {
        Scalar change = 0.0;
        for (Index j = 0; j < p; ++j) {
            change = std::max(change, update(j));
        }
        ++sweeps;
        if (change <= options.tolerance) {
            return {sweeps, true};
        }
        // Iterate on the current active set before the next full pass.
        std::vector<Index> active;
        for (Index j = 0; j < p; ++j) {
            if (beta(j) != 0.0) {
                active.push_back(j);
            }
        }
        while (sweeps < sweep_budget) {
            Scalar inner = 0.0;
            for (Index j : active) {
                inner = std::max(inner, update(j));
            }
            ++sweeps;
            if (inner <= options.tolerance) {
                break;
            }
        }
    }
    return {sweeps, false};
}

// Solve the stationarity equations on the active set with fixed signs; keep
// the result when it is consistent.
void polish_lasso(const Matrix& x, const Vector& y, Scalar lambda, Vector& beta, Vector& residual)
{
    std::vector<Index> active;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) {
            active.push_back(j);
        }
    }
    if (active.empty() || static_cast<Index>(active.size()) > x.rows()) {
        return;
    }
    const IndexSet subset(active.begin(), active.end());
    const Matrix xa = select_columns(x, subset);
    const Matrix g = xa.transpose() * xa;
    Eigen::LDLT<Matrix> ldlt(g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        return;
    }
    const Vector d = ldlt.vectorD();
    if (d.minCoeff() <= 1e-10 * d.maxCoeff()) {
        return;
    }
    Vector signs(static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
        signs(static_cast<Index>(k)) = beta(active[k]) > 0.0 ? 1.0 : -1.0;
    }
    const Vector ba = ldlt.solve(xa.transpose() * y - 0.5 * lambda * signs);
    for (Index k = 0; k < ba.size(); ++k) {
        if (ba(k) * signs(k) <= 0.0) {
            return;
        }
    }
    Vector candidate = Vector::Zero(beta.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        candidate(active[k]) = ba(static_cast<Index>(k));
    }
    const Vector r = y - xa * ba;
    const Vector grad = 2.0 * (x.transpose() * r);
    const Scalar slack = 1e-9 * std::max<Scalar>(1.0, lambda);
    for (Index j = 0; j < beta.size(); ++j) {
        if (candidate(j) == 0.0 && std::abs(grad(j)) > lambda + slack) {
            return;
        }
    }
    const Scalar old_obj = residual.squaredNorm() + lambda * beta.lpNorm<1>();
    const Scalar new_obj = r.squaredNorm() + lambda * candidate.lpNorm<1>();
    if (new_obj > old_obj + 1e-12 * std::max<Scalar>(1.0, old_obj)) {
        return;
    }
    beta = std::move(candidate);
    residual = r;
}

}  // namespace

Scalar dantzig_lambda_max(const RegressionProblem& problem)
{
    return (problem.design().transpose() * problem.response()).cwiseAbs().maxCoeff();
}

Scalar default_lambda(Index n, Index p, Scalar sigma)
{
    const Scalar logp = std::log(static_cast<Scalar>(std::max<Index>(p, 1)));
    return sigma * std::sqrt(2.0 * static_cast<Scalar>(n) * logp);
}

Scalar lasso_objective(const RegressionProblem& problem, const Vector& beta, Scalar lambda)
{
    return (problem.response() - problem.design() * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

Scalar dantzig_infeasibility(const RegressionProblem& problem, const Vector& beta, Scalar lambda)
{
    const Vector corr = problem.design().transpose() * (problem.response() - problem.design() * beta);
    return std::max<Scalar>(0.0, corr.cwiseAbs().maxCoeff() - lambda);
}

Scalar lasso_kkt_violation(const RegressionProblem& problem, const Vector& beta, Scalar lambda)
{
    const Vector grad = 2.0 * (problem.design().transpose() * (problem.response() - problem.design() * beta));
    Scalar worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const Scalar v = beta(j) != 0.0 ? std::abs(grad(j) - lambda * (beta(j) > 0.0 ? 1.0 : -1.0))
                                        : std::max<Scalar>(0.0, std::abs(grad(j)) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

FitResult lasso_fit(const RegressionProblem& problem, Scalar lambda, const LassoOptions& options)
{
    require_lambda(lambda);
    const Matrix& x = problem.design();
    const Vector& y = problem.response();
    const Scalar lam_max = 2.0 * dantzig_lambda_max(problem);
    if (lambda >= lam_max) {
        return zero_fit(problem, lambda, FitMethod::Lasso, y.squaredNorm());
    }

    // Decreasing path lam_max * ratio^k down to lambda. Penalties below
    // 1e-8 * lam_max are skipped straight to the target.
    std::vector<Scalar> path;
    const Scalar floor = std::max(lambda, 1e-8 * lam_max);
    for (Scalar l = lam_max * options.path_ratio; l > floor; l *= options.path_ratio) {
        path.push_back(l);
    }
    path.push_back(lambda);

    const Vector col_sq = x.colwise().squaredNorm().transpose();
    Vector beta = Vector::Zero(problem.p());
    Vector residual = y;
    Index sweeps = 0;
    bool converged = false;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const bool last = k + 1 == path.size();
        const Index budget = last ? options.max_sweeps : std::min<Index>(options.max_sweeps, 1000);
        const auto [used, ok] = coordinate_descent(x, col_sq, path[k], options, budget, beta, residual);
        sweeps += used;
        converged = ok;
    }
    if (options.polish) {
        polish_lasso(x, y, lambda, beta, residual);
    }

    FitResult fit;
    fit.lambda = lambda;
    fit.method = FitMethod::Lasso;
    fit.objective_value = residual.squaredNorm() + lambda * beta.lpNorm<1>();
    fit.coefficients = CoefficientVector(std::move(beta));
    fit.iterations = sweeps;
    fit.converged = converged;
    return fit;
}

namespace {

struct RestrictedSolution {
    LpStatus status;
    Vector beta;            // length |W|
    Vector row_multiplier;  // length |C|: mu_plus - mu_minus
    Index pivots;
};

RestrictedSolution solve_restricted(const Matrix& x, const Vector& c, Scalar lambda, const std::vector<Index>& w,
                                    const std::vector<Index>& rows, const LpOptions& lp_options)
{
    const Index kw = static_cast<Index>(w.size());
    const Index kc = static_cast<Index>(rows.size());
    const Matrix xw = select_columns(x, IndexSet(w.begin(), w.end()));
    const Matrix xc = select_columns(x, IndexSet(rows.begin(), rows.end()));
    const Matrix g = xc.transpose() * xw;  // |C| x |W|

    // beta = b_plus - b_minus with both halves nonnegative; min sum(b_plus + b_minus)
    LinearProgram lp;
    lp.objective = Vector::Ones(2 * kw);
    lp.constraints.resize(2 * kc, 2 * kw);
    lp.rhs.resize(2 * kc);
    for (Index i = 0; i < kc; ++i) {
        const Scalar ci = c(rows[static_cast<std::size_t>(i)]);
        lp.constraints.block(2 * i, 0, 1, kw) = g.row(i);
        lp.constraints.block(2 * i, kw, 1, kw) = -g.row(i);
        lp.rhs(2 * i) = ci + lambda;
        lp.constraints.block(2 * i + 1, 0, 1, kw) = -g.row(i);
        lp.constraints.block(2 * i + 1, kw, 1, kw) = g.row(i);
        lp.rhs(2 * i + 1) = lambda - ci;
    }
    lp.lower = Vector::Zero(2 * kw);

    const LpSolution sol = lp_solve(lp, lp_options);
    RestrictedSolution out{sol.status, {}, {}, sol.iterations};
    if (sol.status == LpStatus::Optimal) {
        out.beta = sol.x.head(kw) - sol.x.tail(kw);
        out.row_multiplier.resize(kc);
        for (Index i = 0; i < kc; ++i) {
            out.row_multiplier(i) = sol.duals(2 * i) - sol.duals(2 * i + 1);
        }
    }
    return out;
}

// Indices outside `taken` whose score exceeds `threshold`, largest first, at most `limit`.
std::vector<Index> top_violators(const Vector& score, Scalar threshold, const std::vector<char>& taken,
                                 Index limit)
{
    std::vector<Index> out;
    for (Index j = 0; j < score.size(); ++j) {
        if (!taken[static_cast<std::size_t>(j)] && score(j) > threshold) {
            out.push_back(j);
        }
    }
    std::stable_sort(out.begin(), out.end(), [&](Index a, Index b) { return score(a) > score(b); });
    if (static_cast<Index>(out.size()) > limit) {
        out.resize(static_cast<std::size_t>(limit));
    }
    return out;
}

}  // namespace

FitResult dantzig_fit(const RegressionProblem& problem, Scalar lambda, const DantzigOptions& options)
{
    require_lambda(lambda);
    const Matrix& x = problem.design();
    const Index p = problem.p();
    const Vector c = x.transpose() * problem.response();
    if (lambda >= c.cwiseAbs().maxCoeff()) {
        return zero_fit(problem, lambda, FitMethod::Dantzig, 0.0);
    }

    const FitResult warm = lasso_fit(problem, 2.0 * lambda);
    std::vector<char> in_w(static_cast<std::size_t>(p), 0);
    std::vector<char> in_c(static_cast<std::size_t>(p), 0);
    std::vector<Index> w;
    std::vector<Index> rows;
    auto add_column = [&](Index j) {
        if (!in_w[static_cast<std::size_t>(j)]) {
            in_w[static_cast<std::size_t>(j)] = 1;
            w.push_back(j);
        }
    };
    auto add_row = [&](Index i) {
        if (!in_c[static_cast<std::size_t>(i)]) {
            in_c[static_cast<std::size_t>(i)] = 1;
            rows.push_back(i);
        }
    };
    for (Index j : warm.coefficients.support(0.0)) {
        add_column(j);
        add_row(j);
    }
    if (w.empty()) {
        Index top = 0;
        c.cwiseAbs().maxCoeff(&top);
        add_column(top);
        add_row(top);
    }
    {
        const Vector corr = c - x.transpose() * (x * warm.coefficients.values());
        const Scalar near = lambda - 1e-6 * std::max<Scalar>(1.0, lambda);
        for (Index i = 0; i < p; ++i) {
            if (std::abs(corr(i)) >= near) {
                add_row(i);
            }
        }
    }

    Index pivots = 0;
    for (Index round = 0; round < options.max_rounds; ++round) {
        const RestrictedSolution sol = solve_restricted(x, c, lambda, w, rows, options.lp);
        pivots += sol.pivots;
        if (sol.status != LpStatus::Optimal) {
            if (sol.status == LpStatus::Infeasible && static_cast<Index>(w.size()) < p) {
                for (Index j = 0; j < p; ++j) {
                    add_column(j);
                }
                continue;
            }
            throw NumericalFailure("dantzig_fit: restricted LP is " + to_string(sol.status));
        }

        Vector beta = Vector::Zero(p);
        for (std::size_t k = 0; k < w.size(); ++k) {
            beta(w[k]) = sol.beta(static_cast<Index>(k));
        }
        const Vector corr = c - x.transpose() * (x * beta);
        const Vector excess = corr.cwiseAbs().array() - lambda;
        const auto violated = top_violators(excess, options.feasibility_tolerance, in_c, options.batch);
        if (!violated.empty()) {
            for (Index i : violated) {
                add_row(i);
            }
            continue;
        }

        Vector multiplier = Vector::Zero(x.rows());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            multiplier += sol.row_multiplier(static_cast<Index>(k)) * x.col(rows[k]);
        }
        const Vector price = (x.transpose() * multiplier).cwiseAbs();
        const auto entering = top_violators(price, 1.0 + options.dual_tolerance, in_w, options.batch);
        if (!entering.empty()) {
            for (Index j : entering) {
                add_column(j);
            }
            continue;
        }

        FitResult fit;
        fit.lambda = lambda;
        fit.method = FitMethod::Dantzig;
        fit.objective_value = beta.lpNorm<1>();
        fit.coefficients = CoefficientVector(std::move(beta));
        fit.iterations = pivots;
        fit.converged = true;
        return fit;
    }
    throw NumericalFailure("dantzig_fit: working set did not settle within " +
                           std::to_string(options.max_rounds) + " rounds");
}

FitResult chebyshev_fit(const RegressionProblem& problem, const LpOptions& options)
{
    const Matrix& x = problem.design();
    const Vector& y = problem.response();
    const Index n = problem.n();
    const Index p = problem.p();

    LinearProgram lp;
    lp.objective = Vector::Zero(p + 1);
    lp.objective(p) = 1.0;
    lp.constraints.resize(2 * n, p + 1);
    lp.rhs.resize(2 * n);
    // y_i - x_i beta <= t  and  x_i beta - y_i <= t
    lp.constraints.block(0, 0, n, p) = -x;
    lp.constraints.block(n, 0, n, p) = x;
    lp.constraints.col(p).setConstant(-1.0);
    lp.rhs.head(n) = -y;
    lp.rhs.tail(n) = y;
    lp.lower = Vector::Constant(p + 1, -std::numeric_limits<Scalar>::infinity());
    lp.lower(p) = 0.0;

    const LpSolution sol = lp_solve(lp, options);
    if (sol.status != LpStatus::Optimal) {
        throw NumericalFailure("chebyshev_fit: LP is " + to_string(sol.status));
    }
    Vector beta = sol.x.head(p);
    FitResult fit;
    fit.lambda = 0.0;
    fit.method = FitMethod::Chebyshev;
    fit.objective_value = (y - x * beta).cwiseAbs().maxCoeff();
    fit.coefficients = CoefficientVector(std::move(beta));
    fit.iterations = sol.iterations;
    fit.converged = true;
    return fit;
}

FitResult soft_threshold_fit(const RegressionProblem& problem, Scalar lambda)
{
    require_lambda(lambda);
    const Scalar n = static_cast<Scalar>(problem.n());
    const Vector z = problem.design().transpose() * problem.response() / n;
    Vector beta(problem.p());
    for (Index j = 0; j < beta.size(); ++j) {
        beta(j) = soft_threshold(z(j), lambda / n);
    }
    FitResult fit;
    fit.lambda = lambda;
    fit.method = FitMethod::SoftThreshold;
    fit.objective_value = beta.lpNorm<1>();
    fit.coefficients = CoefficientVector(std::move(beta));
    return fit;
}

}  // namespace sparselab
