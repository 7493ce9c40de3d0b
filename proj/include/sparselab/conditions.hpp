#pragma once

// Restricted eigenvalues, restricted orthogonality and coherence of a design,
// computed by exhaustive subset enumeration on the unit-diagonal Gram matrix
// X^T X / n.
//
// Extremes over |L| <= m are attained at |L| = m (Cauchy interlacing for the
// eigenvalues; the spectral norm of a block only grows when rows or columns
// are added), so only subsets of exactly that size are enumerated. Subsets
// are visited in lexicographic order and the first one reaching the extreme
// is reported.

#include "sparselab/problem.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sparselab {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 2'000'000;

struct SubsetExtremum {
    Scalar value = 0.0;
    IndexSet subset;
    std::uint64_t evaluated = 0;
};

struct PairExtremum {
    Scalar value = 0.0;
    IndexSet left;   // |left| <= m'
    IndexSet right;  // |right| <= m
    std::uint64_t evaluated = 0;
};

/// Number of k-subsets of p items, saturating at UINT64_MAX.
std::uint64_t binomial(Index p, Index k);

/// Gram matrix on the unit-diagonal scale: the problem's own X^T X / n when
/// it is normalized, otherwise that of normalize_columns(problem).
Matrix unit_gram(const RegressionProblem& problem);

// Matrix overloads take the unit-diagonal Gram directly.
SubsetExtremum phi_min(const Matrix& unit_gram, Index m, std::uint64_t budget = kDefaultEnumerationBudget);
SubsetExtremum phi_max(const Matrix& unit_gram, Index m, std::uint64_t budget = kDefaultEnumerationBudget);
PairExtremum theta(const Matrix& unit_gram, Index m, Index m_prime,
                   std::uint64_t budget = kDefaultEnumerationBudget);
PairExtremum rho(const Matrix& unit_gram, Index s);

SubsetExtremum phi_min(const RegressionProblem& problem, Index m,
                       std::uint64_t budget = kDefaultEnumerationBudget);
/// With m absent: largest eigenvalue of the full unit-diagonal Gram.
SubsetExtremum phi_max(const RegressionProblem& problem, std::optional<Index> m = std::nullopt,
                       std::uint64_t budget = kDefaultEnumerationBudget);
/// max over disjoint L, L' with |L| <= m_prime, |L'| <= m of the spectral
/// norm of X_L^T X_L' / n.
PairExtremum theta(const RegressionProblem& problem, Index m, Index m_prime,
                   std::uint64_t budget = kDefaultEnumerationBudget);
/// On the unit-diagonal scale every ordered pair i != j occurs with i in some
/// L of size <= s and j outside it, so rho_s is the largest off-diagonal
/// |G_ij| for every 1 <= s < p.
PairExtremum rho(const RegressionProblem& problem, Index s);

struct ConditionParams {
    std::optional<Scalar> k_bar;  // defaults to p
    Scalar k_underline = 1e-6;
    Scalar m_constant = 1.0 / 32.0;
    Scalar epsilon = 1e-3;
};

struct ConditionReport {
    Index s = 0;
    Index n = 0;
    Index p = 0;
    ConditionParams params;  // with k_bar resolved
    Index m_two_s = 0;       // min(2s, p)
    Index m_my = 0;          // min(ceil(s log n), p)

    std::map<Index, SubsetExtremum> phi_min;
    std::map<Index, SubsetExtremum> phi_max;
    std::optional<SubsetExtremum> phi_max_full;
    std::map<std::pair<Index, Index>, PairExtremum> theta;
    std::optional<PairExtremum> rho_s;

    std::optional<bool> a1;
    std::optional<bool> a2;
    std::optional<bool> a3_btw;
    std::optional<bool> a3_my;
    std::optional<bool> a3_ct;

    bool phi_min_two_s_is_one = false;
    bool enumeration_exact = true;  // false when some entry was dropped for budget
    std::vector<std::string> notes;
};

/// Evaluates A1 (phi_max <= k_bar), A2 (phi_min(2s) >= k_underline),
/// A3(BTW) (rho_s <= M / s), A3(MY) (phi_min(s log n) >= epsilon) and
/// A3(CT) (theta_{s,2s} < phi_min(2s) < 1 and phi_max(2s) + theta_{s,2s} < 2).
/// Entries that exceed the budget or are undefined for this p are left empty
/// together with every verdict that needs them.
ConditionReport evaluate_conditions(const RegressionProblem& problem, Index s, const ConditionParams& params = {},
                                    std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace sparselab
