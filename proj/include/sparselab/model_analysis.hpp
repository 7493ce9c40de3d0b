#pragma once

// Variable screening and importance under collinearity: alternative sparse
// representations of the same fitted vector, signal-to-noise importance in
// the three-variable collinear example, its t-statistic estimate, and the
// candidate-variable procedure built on a sparse fit.

#include "sparselab/estimators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparselab {

enum class CutoffKind {
    Standardized,  // sqrt(2 log p) on the N(0,1)-scaled statistic
    Unscaled,  // sqrt(2 log p / n)
};

std::string to_string(CutoffKind kind);
CutoffKind cutoff_kind_from_string(const std::string& name);

/// X_k^T Y / sqrt(n sigma_hat^2) for every column.
Vector screen_statistics(const RegressionProblem& problem, Scalar sigma_hat);
Scalar screen_cutoff(Index n, Index p, CutoffKind kind);
/// { k : |statistic_k| > cutoff }
IndexSet screen(const RegressionProblem& problem, Scalar sigma_hat, CutoffKind kind = CutoffKind::Standardized);

struct Representation {
    IndexSet support;
    Vector coefficients;  // length p, zero off the support
};

struct RepresentationFamily {
    Vector fitted;  // X beta0
    std::vector<Representation> members;
    std::uint64_t evaluated = 0;
};

/// Every support of size <= max_support with full column rank whose span
/// contains X beta0 (least-squares residual <= 1e-8 |X beta0|), in order of
/// size then lexicographic. Members with the same coefficient vector are
/// reported once, under the smallest support.
RepresentationFamily representation_family(const RegressionProblem& problem, const Vector& beta0,
                                           Index max_support, std::uint64_t budget = 2'000'000);

const Representation& min_l1_member(const RepresentationFamily& family);

enum class Conditioning { OnFirst, OnThird };

/// SN^2(2|1) = (beta + 1)^2 and SN^2(2|3) = (alpha + 1)^2.
Scalar sn2(Scalar alpha, Scalar beta, Conditioning which);

/// max of the two SN^2 values, divided by sigma^2 when sigma > 0.
Scalar importance_exact(Scalar alpha, Scalar beta, Scalar sigma);

struct ContextStatistic {
    IndexSet context;
    Scalar t_squared = 0.0;
};

struct TstatImportance {
    Scalar importance = 0.0;
    std::vector<ContextStatistic> per_context;
};

/// Squared t statistic of column j in the least-squares fit of Y on
/// {j} and each context; the importance is their maximum. Throws
/// RankDeficient naming the offending context.
TstatImportance importance_tstat(const RegressionProblem& problem, Index j, const std::vector<IndexSet>& contexts);

struct CandidateOptions {
    Index k = 10;
    Scalar r2_threshold = 0.99;
    Scalar sigma_hat = 1.0;
    CutoffKind cutoff = CutoffKind::Standardized;
};

struct ContextEvaluation {
    Index dropped = -1;  // support variable left out
    IndexSet context;    // support without `dropped`
    std::optional<Scalar> r2;
    std::optional<Scalar> t_squared;
    std::string skipped;  // reason when the regression was not possible
};

struct VariableImportance {
    Index index = 0;
    Scalar screen_statistic = 0.0;
    bool in_support = false;
    bool candidate = false;
    bool retained = false;
    std::optional<Scalar> importance;
    std::optional<IndexSet> best_partner_set;
    std::vector<ContextEvaluation> contexts;
};

struct ImportanceReport {
    Scalar sigma_hat = 0.0;
    Scalar cutoff = 0.0;
    CutoffKind cutoff_kind = CutoffKind::Standardized;
    Scalar r2_threshold = 0.0;
    Scalar importance_threshold = 0.0;  // 2 log p
    IndexSet screened_in;
    IndexSet support;
    IndexSet candidates;
    IndexSet retained;
    std::vector<VariableImportance> variables;  // support and candidates, by index
};

/// Candidates are the k screened-in variables with largest |X_c^T Y|. For each
/// candidate c and each j in the fit's support, the fitted vector X beta_hat
/// is regressed on {c} and support \ {j} (uncentered R^2), and the squared
/// t statistic of c is taken from the regression of Y on the same columns.
/// A candidate is retained when some context has R^2 >= r2_threshold and
/// t^2 >= 2 log p. Rank-deficient contexts are recorded and skipped.
ImportanceReport candidate_importance_procedure(const RegressionProblem& problem, const FitResult& fit,
                                                const CandidateOptions& options);

}  // namespace sparselab
