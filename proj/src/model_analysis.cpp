#include "sparselab/model_analysis.hpp"

#include "sparselab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparselab {

std::string to_string(CutoffKind kind)
{
    return kind == CutoffKind::Standardized ? "standardized" : "paper-literal";
}

CutoffKind cutoff_kind_from_string(const std::string& name)
{
    if (name == "standardized") {
        return CutoffKind::Standardized;
    }
    if (name == "paper-literal") {
        return CutoffKind::Unscaled;
    }
    throw InvalidArgument("unknown cutoff '" + name + "'");
}

Vector screen_statistics(const RegressionProblem& problem, Scalar sigma_hat)
{
    if (!(sigma_hat > 0.0)) {
        throw InvalidArgument("screen: sigma_hat must be positive");
    }
    const Scalar n = static_cast<Scalar>(problem.n());
    return problem.design().transpose() * problem.response() / std::sqrt(n * sigma_hat * sigma_hat);
}

Scalar screen_cutoff(Index n, Index p, CutoffKind kind)
{
    const Scalar base = 2.0 * std::log(static_cast<Scalar>(p));
    return kind == CutoffKind::Standardized ? std::sqrt(base) : std::sqrt(base / static_cast<Scalar>(n));
}

IndexSet screen(const RegressionProblem& problem, Scalar sigma_hat, CutoffKind kind)
{
    const Vector stats = screen_statistics(problem, sigma_hat);
    const Scalar cutoff = screen_cutoff(problem.n(), problem.p(), kind);
    IndexSet kept;
    for (Index k = 0; k < stats.size(); ++k) {
        if (std::abs(stats(k)) > cutoff) {
            kept.push_back(k);
        }
    }
    return kept;
}

RepresentationFamily representation_family(const RegressionProblem& problem, const Vector& beta0,
                                           Index max_support, std::uint64_t budget)
{
    const Index p = problem.p();
    if (beta0.size() != p) {
        throw InvalidArgument("representation_family: beta0 has the wrong length");
    }
    if (max_support < 1) {
        throw InvalidArgument("representation_family: max_support must be positive");
    }
    max_support = std::min(max_support, p);
    std::uint64_t total = 0;
    for (Index k = 1; k <= max_support; ++k) {
        total += binomial(p, k);
    }
    if (total > budget) {
        throw BudgetExceeded(total, budget);
    }

    RepresentationFamily family;
    family.fitted = problem.design() * beta0;
    const Scalar scale = family.fitted.norm();
    const Scalar tol = 1e-8 * std::max<Scalar>(scale, std::numeric_limits<Scalar>::min());

    for (Index k = 1; k <= max_support; ++k) {
        std::vector<Index> subset(static_cast<std::size_t>(k));
        std::iota(subset.begin(), subset.end(), Index{0});
        for (;;) {
            ++family.evaluated;
            const IndexSet support(subset.begin(), subset.end());
            try {
                const auto fit = least_squares(select_columns(problem.design(), support), family.fitted, support);
                if (fit.residual.norm() <= tol) {
                    Vector full = Vector::Zero(p);
                    for (std::size_t a = 0; a < support.size(); ++a) {
                        full(support[a]) = fit.coefficients(static_cast<Index>(a));
                    }
                    const bool duplicate =
                        std::any_of(family.members.begin(), family.members.end(), [&](const Representation& r) {
                            return (r.coefficients - full).cwiseAbs().maxCoeff() <=
                                   1e-8 * std::max<Scalar>(1.0, full.cwiseAbs().maxCoeff());
                        });
                    if (!duplicate) {
                        family.members.push_back({support, std::move(full)});
                    }
                }
            } catch (const RankDeficient&) {
                // not a valid representation
            }
            // next lexicographic k-subset
            Index i = k - 1;
            while (i >= 0 && subset[static_cast<std::size_t>(i)] == p - k + i) {
                --i;
            }
            if (i < 0) {
                break;
            }
            ++subset[static_cast<std::size_t>(i)];
            for (Index j = i + 1; j < k; ++j) {
                subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
    }
    return family;
}

const Representation& min_l1_member(const RepresentationFamily& family)
{
    if (family.members.empty()) {
        throw InvalidArgument("representation family is empty");
    }
    return *std::min_element(family.members.begin(), family.members.end(),
                             [](const Representation& a, const Representation& b) {
                                 return a.coefficients.lpNorm<1>() < b.coefficients.lpNorm<1>();
                             });
}

Scalar sn2(Scalar alpha, Scalar beta, Conditioning which)
{
    // SN^2(2|1) = (1 + 1/beta)^2 beta^2; the 1/beta requires beta != 0.
    if (which == Conditioning::OnFirst) {
        if (beta == 0.0) {
            throw DegenerateCoefficient("SN^2(2|1) needs beta != 0");
        }
        return (beta + 1.0) * (beta + 1.0);
    }
    if (alpha == 0.0) {
        throw DegenerateCoefficient("SN^2(2|3) needs alpha != 0");
    }
    return (alpha + 1.0) * (alpha + 1.0);
}

Scalar importance_exact(Scalar alpha, Scalar beta, Scalar sigma)
{
    if (!(sigma >= 0.0)) {
        throw InvalidArgument("importance_exact: sigma must be nonnegative");
    }
    const Scalar best = std::max(sn2(alpha, beta, Conditioning::OnFirst), sn2(alpha, beta, Conditioning::OnThird));
    return sigma > 0.0 ? best / (sigma * sigma) : best;
}

namespace {

Scalar t_squared_of_first(const LeastSquaresFit<Scalar>& fit)
{
    const Scalar coef = fit.coefficients(0);
    const Scalar var = fit.residual_mean_square * fit.inverse_gram_diagonal(0);
    if (var == 0.0) {
        return coef == 0.0 ? 0.0 : std::numeric_limits<Scalar>::infinity();
    }
    return coef * coef / var;
}

IndexSet with_front(Index j, const IndexSet& context)
{
    IndexSet cols;
    cols.reserve(context.size() + 1);
    cols.push_back(j);
    cols.insert(cols.end(), context.begin(), context.end());
    return cols;
}

}  // namespace

TstatImportance importance_tstat(const RegressionProblem& problem, Index j, const std::vector<IndexSet>& contexts)
{
    check_subset({j}, problem.p());
    if (contexts.empty()) {
        throw InvalidArgument("importance_tstat: no contexts");
    }
    TstatImportance out;
    out.importance = -std::numeric_limits<Scalar>::infinity();
    for (const IndexSet& context : contexts) {
        check_subset(context, problem.p());
        if (problem.n() <= static_cast<Index>(context.size()) + 1) {
            throw RankDeficient("importance_tstat: need n > |context| + 1", context);
        }
        const IndexSet cols = with_front(j, context);
        if (std::find(context.begin(), context.end(), j) != context.end()) {
            throw RankDeficient("importance_tstat: context contains the tested variable", context);
        }
        LeastSquaresFit<Scalar> fit;
        try {
            fit = least_squares(problem, cols);
        } catch (const RankDeficient&) {
            throw RankDeficient("importance_tstat: rank-deficient context", context);
        }
        const Scalar t2 = t_squared_of_first(fit);
        out.per_context.push_back({context, t2});
        out.importance = std::max(out.importance, t2);
    }
    return out;
}

ImportanceReport candidate_importance_procedure(const RegressionProblem& problem, const FitResult& fit,
                                                const CandidateOptions& options)
{
    const Index p = problem.p();
    if (fit.coefficients.size() != p) {
        throw InvalidArgument("candidate procedure: fit has the wrong length");
    }
    if (options.k < 0) {
        throw InvalidArgument("candidate procedure: K must be nonnegative");
    }

    ImportanceReport report;
    report.sigma_hat = options.sigma_hat;
    report.cutoff_kind = options.cutoff;
    report.cutoff = screen_cutoff(problem.n(), p, options.cutoff);
    report.r2_threshold = options.r2_threshold;
    report.importance_threshold = 2.0 * std::log(static_cast<Scalar>(p));
    report.support = fit.coefficients.support();
    if (report.support.empty()) {
        throw InvalidArgument("candidate procedure: the fit has an empty support");
    }
    const Vector stats = screen_statistics(problem, options.sigma_hat);
    for (Index k = 0; k < p; ++k) {
        if (std::abs(stats(k)) > report.cutoff) {
            report.screened_in.push_back(k);
        }
    }

    // K most correlated with Y among the screened-in variables.
    const Vector corr = (problem.design().transpose() * problem.response()).cwiseAbs();
    IndexSet ranked = report.screened_in;
    std::stable_sort(ranked.begin(), ranked.end(), [&](Index a, Index b) { return corr(a) > corr(b); });
    if (static_cast<Index>(ranked.size()) > options.k) {
        ranked.resize(static_cast<std::size_t>(options.k));
    }
    std::sort(ranked.begin(), ranked.end());
    report.candidates = ranked;

    const Vector fitted = problem.design() * fit.coefficients.values();
    const Scalar fitted_ss = fitted.squaredNorm();
    const RegressionProblem on_fitted = problem.with_response(fitted);

    IndexSet listed = report.support;
    listed.insert(listed.end(), report.candidates.begin(), report.candidates.end());
    std::sort(listed.begin(), listed.end());
    listed.erase(std::unique(listed.begin(), listed.end()), listed.end());

    for (Index v : listed) {
        VariableImportance entry;
        entry.index = v;
        entry.screen_statistic = stats(v);
        entry.in_support = std::binary_search(report.support.begin(), report.support.end(), v);
        entry.candidate = std::binary_search(report.candidates.begin(), report.candidates.end(), v);
        if (entry.candidate) {
            for (Index dropped : report.support) {
                ContextEvaluation ctx;
                ctx.dropped = dropped;
                for (Index j : report.support) {
                    if (j != dropped) {
                        ctx.context.push_back(j);
                    }
                }
                if (std::find(ctx.context.begin(), ctx.context.end(), v) != ctx.context.end()) {
                    ctx.skipped = "candidate already in context";
                    entry.contexts.push_back(std::move(ctx));
                    continue;
                }
                try {
                    const IndexSet cols = with_front(v, ctx.context);
                    const auto on_fit = least_squares(on_fitted, cols);
                    ctx.r2 = fitted_ss > 0.0 ? 1.0 - on_fit.rss / fitted_ss : 0.0;
                    ctx.t_squared = importance_tstat(problem, v, {ctx.context}).importance;
                } catch (const RankDeficient& e) {
                    ctx.r2.reset();
                    ctx.t_squared.reset();
                    ctx.skipped = e.what();
                }
                if (ctx.t_squared && (!entry.importance || *ctx.t_squared > *entry.importance)) {
                    entry.importance = *ctx.t_squared;
                    entry.best_partner_set = ctx.context;
                }
                if (ctx.r2 && ctx.t_squared && *ctx.r2 >= options.r2_threshold &&
                    *ctx.t_squared >= report.importance_threshold) {
                    entry.retained = true;
                }
                entry.contexts.push_back(std::move(ctx));
            }
        }
        if (entry.retained) {
            report.retained.push_back(v);
        }
        report.variables.push_back(std::move(entry));
    }
    return report;
}

}  // namespace sparselab
