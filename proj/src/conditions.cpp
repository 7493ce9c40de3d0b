#include "sparselab/conditions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparselab {

std::uint64_t binomial(Index p, Index k)
{
    if (k < 0 || k > p) {
        return 0;
    }
    k = std::min(k, p - k);
    std::uint64_t result = 1;
    for (Index i = 1; i <= k; ++i) {
        const auto num = static_cast<std::uint64_t>(p - k + i);
        // result * num / i is exact at every step.
        if (result > std::numeric_limits<std::uint64_t>::max() / num) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result = result * num / static_cast<std::uint64_t>(i);
    }
    return result;
}

Matrix unit_gram(const RegressionProblem& problem)
{
    if (problem.normalized()) {
        return gram(problem);
    }
    return gram(normalize_columns(problem));
}

namespace {

// Lexicographic k-subsets of {0..p-1}.
bool next_combination(std::vector<Index>& c, Index p)
{
    const auto k = static_cast<Index>(c.size());
    for (Index i = k - 1; i >= 0; --i) {
        auto& ci = c[static_cast<std::size_t>(i)];
        if (ci < p - k + i) {
            ++ci;
            for (Index j = i + 1; j < k; ++j) {
                c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
            }
            return true;
        }
    }
    return false;
}

std::vector<Index> first_combination(Index k)
{
    std::vector<Index> c(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
        c[static_cast<std::size_t>(i)] = i;
    }
    return c;
}

void check_budget(std::uint64_t count, std::uint64_t budget)
{
    if (count > budget) {
        throw BudgetExceeded(count, budget);
    }
}

void check_gram(const Matrix& g)
{
    if (g.rows() != g.cols() || g.rows() < 1) {
        throw InvalidArgument("Gram matrix must be square and nonempty");
    }
}

template <bool Smallest>
SubsetExtremum extreme_eigen(const Matrix& g, Index m, std::uint64_t budget)
{
    check_gram(g);
    const Index p = g.rows();
    if (m < 1 || m > p) {
        throw InvalidArgument("restricted eigenvalue: need 1 <= m <= p (m = " + std::to_string(m) + ")");
    }
    const std::uint64_t count = binomial(p, m);
    check_budget(count, budget);

    SubsetExtremum best;
    best.value = Smallest ? std::numeric_limits<Scalar>::infinity() : -std::numeric_limits<Scalar>::infinity();
    Matrix sub(m, m);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    auto subset = first_combination(m);
    do {
        Scalar value = 0.0;
        if (m == 1) {
            value = g(subset[0], subset[0]);
        } else {
            for (Index a = 0; a < m; ++a) {
                for (Index b = 0; b < m; ++b) {
                    sub(a, b) = g(subset[static_cast<std::size_t>(a)], subset[static_cast<std::size_t>(b)]);
                }
            }
            solver.compute(sub, Eigen::EigenvaluesOnly);
            value = Smallest ? solver.eigenvalues()(0) : solver.eigenvalues()(m - 1);
        }
        if (Smallest ? value < best.value : value > best.value) {
            best.value = value;
            best.subset.assign(subset.begin(), subset.end());
        }
        ++best.evaluated;
    } while (next_combination(subset, p));
    return best;
}

}  // namespace

SubsetExtremum phi_min(const Matrix& g, Index m, std::uint64_t budget)
{
    return extreme_eigen<true>(g, m, budget);
}

SubsetExtremum phi_max(const Matrix& g, Index m, std::uint64_t budget)
{
    return extreme_eigen<false>(g, m, budget);
}

PairExtremum theta(const Matrix& g, Index m, Index m_prime, std::uint64_t budget)
{
    check_gram(g);
    const Index p = g.rows();
    if (m < 1 || m_prime < 1 || m + m_prime > p) {
        throw InvalidArgument("theta: need m, m' >= 1 and m + m' <= p");
    }
    const std::uint64_t outer = binomial(p, m_prime);
    const std::uint64_t inner = binomial(p - m_prime, m);
    const std::uint64_t count =
        inner != 0 && outer > std::numeric_limits<std::uint64_t>::max() / inner ? std::numeric_limits<std::uint64_t>::max()
                                                                                : outer * inner;
    check_budget(count, budget);

    PairExtremum best;
    best.value = -1.0;
    Matrix block(m_prime, m);
    auto left = first_combination(m_prime);
    std::vector<Index> rest;
    do {
        rest.clear();
        std::size_t cursor = 0;
        for (Index i = 0; i < p; ++i) {
            if (cursor < left.size() && left[cursor] == i) {
                ++cursor;
            } else {
                rest.push_back(i);
            }
        }
        auto pick = first_combination(m);
        do {
            for (Index a = 0; a < m_prime; ++a) {
                for (Index b = 0; b < m; ++b) {
                    block(a, b) = g(left[static_cast<std::size_t>(a)], rest[static_cast<std::size_t>(pick[static_cast<std::size_t>(b)])]);
                }
            }
            const Scalar value = max_singular_value(block);
            if (value > best.value) {
                best.value = value;
                best.left.assign(left.begin(), left.end());
                best.right.clear();
                for (Index b : pick) {
                    best.right.push_back(rest[static_cast<std::size_t>(b)]);
                }
            }
            ++best.evaluated;
        } while (next_combination(pick, p - m_prime));
    } while (next_combination(left, p));
    return best;
}

PairExtremum rho(const Matrix& g, Index s)
{
    check_gram(g);
    const Index p = g.rows();
    if (s < 1 || s >= p) {
        throw InvalidArgument("rho: need 1 <= s < p");
    }
    PairExtremum best;
    best.value = -1.0;
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            if (i == j) {
                continue;
            }
            ++best.evaluated;
            if (std::abs(g(i, j)) > best.value) {
                best.value = std::abs(g(i, j));
                best.left = {i};
                best.right = {j};
            }
        }
    }
    return best;
}

SubsetExtremum phi_min(const RegressionProblem& problem, Index m, std::uint64_t budget)
{
    return phi_min(unit_gram(problem), m, budget);
}

SubsetExtremum phi_max(const RegressionProblem& problem, std::optional<Index> m, std::uint64_t budget)
{
    const Matrix g = unit_gram(problem);
    if (m) {
        return phi_max(g, *m, budget);
    }
    SubsetExtremum full;
    const Vector eig = sym_eigs(g);
    full.value = eig(eig.size() - 1);
    full.subset = all_indices(problem.p());
    full.evaluated = 1;
    return full;
}

PairExtremum theta(const RegressionProblem& problem, Index m, Index m_prime, std::uint64_t budget)
{
    return theta(unit_gram(problem), m, m_prime, budget);
}

PairExtremum rho(const RegressionProblem& problem, Index s)
{
    return rho(unit_gram(problem), s);
}

ConditionReport evaluate_conditions(const RegressionProblem& problem, Index s, const ConditionParams& params,
                                    std::uint64_t budget)
{
    const Index p = problem.p();
    const Index n = problem.n();
    if (s < 1 || s > p) {
        throw InvalidArgument("evaluate_conditions: need 1 <= s <= p");
    }
    const Matrix g = unit_gram(problem);

    ConditionReport report;
    report.s = s;
    report.n = n;
    report.p = p;
    report.params = params;
    if (!report.params.k_bar) {
        report.params.k_bar = static_cast<Scalar>(p);
    }
    report.m_two_s = std::min<Index>(2 * s, p);
    const auto my = static_cast<Index>(std::ceil(static_cast<Scalar>(s) * std::log(static_cast<Scalar>(n))));
    report.m_my = std::clamp<Index>(my, 1, p);

    auto attempt = [&](const std::string& label, auto&& compute) {
        try {
            compute();
        } catch (const BudgetExceeded& e) {
            report.enumeration_exact = false;
            report.notes.push_back(label + ": " + e.what());
        } catch (const InvalidArgument& e) {
            report.notes.push_back(label + ": " + e.what());
        }
    };

    attempt("phi_max", [&] {
        SubsetExtremum full;
        const Vector eig = sym_eigs(g);
        full.value = eig(eig.size() - 1);
        full.subset = all_indices(p);
        full.evaluated = 1;
        report.phi_max_full = full;
    });
    attempt("phi_min(2s)", [&] { report.phi_min[report.m_two_s] = phi_min(g, report.m_two_s, budget); });
    attempt("phi_max(2s)", [&] { report.phi_max[report.m_two_s] = phi_max(g, report.m_two_s, budget); });
    if (report.m_my != report.m_two_s) {
        attempt("phi_min(s log n)", [&] { report.phi_min[report.m_my] = phi_min(g, report.m_my, budget); });
    }
    attempt("theta(s,2s)", [&] { report.theta[{s, 2 * s}] = theta(g, s, 2 * s, budget); });
    if (s < p) {
        attempt("rho_s", [&] { report.rho_s = rho(g, s); });
    } else {
        report.notes.push_back("rho_s: undefined for s = p");
    }

    const auto find = [](const auto& map, const auto& key) -> std::optional<Scalar> {
        const auto it = map.find(key);
        if (it == map.end()) {
            return std::nullopt;
        }
        return it->second.value;
    };
    const auto pmin2s = find(report.phi_min, report.m_two_s);
    const auto pmax2s = find(report.phi_max, report.m_two_s);
    const auto pminmy = find(report.phi_min, report.m_my);
    const auto th = find(report.theta, std::pair<Index, Index>{s, 2 * s});

    if (report.phi_max_full) {
        report.a1 = report.phi_max_full->value <= *report.params.k_bar;
    }
    if (pmin2s) {
        report.a2 = *pmin2s >= params.k_underline;
        report.phi_min_two_s_is_one = std::abs(*pmin2s - 1.0) <= 1e-12;
        if (report.phi_min_two_s_is_one) {
            report.notes.push_back("phi_min(2s) equals 1: the strict inequality phi_min(2s) < 1 of A3(CT) fails");
        }
    }
    if (report.rho_s) {
        report.a3_btw = report.rho_s->value <= params.m_constant / static_cast<Scalar>(s);
    }
    if (pminmy) {
        report.a3_my = *pminmy >= params.epsilon;
    }
    if (th && pmin2s && pmax2s) {
        // a phi_min(2s) within rounding of 1 counts as 1, matching the flag above
        report.a3_ct = *th < *pmin2s && *pmin2s < 1.0 && !report.phi_min_two_s_is_one && *pmax2s + *th < 2.0;
    }
    return report;
}

}  // namespace sparselab
