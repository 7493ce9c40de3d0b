#include "helpers.hpp"
#include "oracles.hpp"

#include "sparselab/conditions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace sparselab;
using namespace testing_helpers;

namespace {

RegressionProblem orthogonal(Index n, Index p, std::uint64_t seed)
{
    return orthogonal_problem(n, p, Vector::Zero(p), 0.0, seed);
}

// Raw (unnormalized) gaussian design, so unit_gram has to do the scaling.
RegressionProblem raw_gaussian(Index n, Index p, std::uint64_t seed)
{
    Matrix x = random_matrix(n, p, seed);
    for (Index j = 0; j < p; ++j) {
        x.col(j) *= 0.3 + static_cast<Scalar>(j);
    }
    return RegressionProblem(x, random_vector(n, seed + 1));
}

// |u^T B v| maximized over a grid of unit vectors (1- or 2-dimensional blocks).
double grid_cross_norm(const Matrix& b, int steps)
{
    auto unit = [](Index dim, double angle) {
        Vector v(dim);
        if (dim == 1) {
            v(0) = 1.0;
        } else {
            v << std::cos(angle), std::sin(angle);
        }
        return v;
    };
    const int su = b.rows() == 1 ? 1 : steps;
    const int sv = b.cols() == 1 ? 1 : steps;
    double best = 0.0;
    for (int i = 0; i < su; ++i) {
        const Vector u = unit(b.rows(), M_PI * i / su);
        const Vector bu = b.transpose() * u;
        for (int j = 0; j < sv; ++j) {
            best = std::max(best, std::abs(bu.dot(unit(b.cols(), M_PI * j / sv))));
        }
    }
    return best;
}

}  // namespace

TEST(Conditions, Binomial)
{
    EXPECT_EQ(binomial(5, 2), 10u);
    EXPECT_EQ(binomial(10, 0), 1u);
    EXPECT_EQ(binomial(3, 4), 0u);
    EXPECT_EQ(binomial(60, 30), 118264581564861424u);
    EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(Conditions, UnitGramNormalizesRawDesign)
{
    const auto raw = raw_gaussian(40, 4, 3);
    const Matrix g = unit_gram(raw);
    EXPECT_LT((g.diagonal() - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-12);
    const auto normed = normalize_columns(raw);
    EXPECT_LT((g - gram(normed)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Conditions, OrthogonalDesign)
{
    const auto prob = orthogonal(32, 6, 1);
    for (Index m = 1; m <= 6; ++m) {
        EXPECT_NEAR(phi_min(prob, m).value, 1.0, 1e-12);
        EXPECT_NEAR(phi_max(prob, m).value, 1.0, 1e-12);
    }
    EXPECT_NEAR(phi_max(prob).value, 1.0, 1e-12);
    EXPECT_NEAR(theta(prob, 2, 3).value, 0.0, 1e-12);
    EXPECT_NEAR(rho(prob, 2).value, 0.0, 1e-12);
    // ties resolve to the lexicographically first subset
    EXPECT_EQ(phi_min(prob, 2).subset, (IndexSet{0, 1}));
    EXPECT_EQ(phi_min(prob, 3).evaluated, 20u);
}

TEST(Conditions, CorrelatedPair)
{
    for (const Scalar r : {0.9, -0.4, 0.0, 0.25}) {
        const auto prob = correlated_pair(24, r, 7);
        EXPECT_NEAR(phi_min(prob, 2).value, 1.0 - std::abs(r), 1e-12) << r;
        EXPECT_NEAR(phi_max(prob, 2).value, 1.0 + std::abs(r), 1e-12) << r;
        EXPECT_NEAR(phi_max(prob, 1).value, 1.0, 1e-12);
        EXPECT_NEAR(theta(prob, 1, 1).value, std::abs(r), 1e-12) << r;
        EXPECT_NEAR(rho(prob, 1).value, std::abs(r), 1e-12) << r;
    }
}

TEST(Conditions, CollinearPopulationIsSingular)
{
    const auto data = population_collinear(1.0, 1.0);
    const auto pm = phi_min(data.problem, 3);
    EXPECT_NEAR(pm.value, 0.0, 1e-12);
    EXPECT_EQ(pm.subset, (IndexSet{0, 1, 2}));
    EXPECT_NEAR(phi_min(data.problem, 1).value, 1.0, 1e-12);
}

TEST(Conditions, ThetaMatchesUnitSphereGrid)
{
    const auto prob = raw_gaussian(12, 6, 21);
    const Matrix g = unit_gram(prob);
    // every disjoint pair with |L| <= 2, |L'| <= 2
    double best = 0.0;
    for (long a = 1; a < 3; ++a) {
        oracle::for_each_subset(6, a, [&](const std::vector<long>& l) {
            for (long b = 1; b < 3; ++b) {
                oracle::for_each_subset(6, b, [&](const std::vector<long>& r) {
                    for (long i : l)
                        for (long j : r)
                            if (i == j) return;
                    best = std::max(best, grid_cross_norm(oracle::block(g, l, r), 720));
                });
            }
        });
    }
    EXPECT_NEAR(theta(prob, 2, 2).value, best, 1e-3);
    EXPECT_GE(theta(prob, 2, 2).value + 1e-12, best);
}

TEST(Conditions, RhoIsMaxOffDiagonal)
{
    const auto prob = raw_gaussian(15, 5, 8);
    const Matrix g = unit_gram(prob);
    double expected = 0.0;
    for (Index i = 0; i < 5; ++i) {
        for (Index j = 0; j < 5; ++j) {
            if (i != j) {
                expected = std::max(expected, std::abs(g(i, j)));
            }
        }
    }
    for (Index s = 1; s <= 3; ++s) {
        EXPECT_NEAR(rho(prob, s).value, expected, 1e-14) << s;
        EXPECT_NEAR(oracle::naive_rho(g, s), expected, 1e-14) << s;
    }
}

TEST(Conditions, MatchesNaiveEnumeration)
{
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Index p = 3 + static_cast<Index>(seed % 6);
        const Index n = seed % 3 == 0 ? p - 1 : 2 * p;  // some rank-deficient designs too
        const auto prob = raw_gaussian(n, p, 100 + seed);
        const Matrix g = unit_gram(prob);
        for (Index m = 1; m <= p; ++m) {
            EXPECT_NEAR(phi_min(g, m).value, oracle::naive_phi(g, m, true), 1e-10);
            EXPECT_NEAR(phi_max(g, m).value, oracle::naive_phi(g, m, false), 1e-10);
        }
        for (Index m = 1; m < p; ++m) {
            for (Index mp = 1; m + mp <= p; ++mp) {
                EXPECT_NEAR(theta(g, m, mp).value, oracle::naive_theta(g, m, mp), 1e-10)
                    << "p " << p << " m " << m << " m' " << mp;
            }
            EXPECT_NEAR(rho(g, m).value, oracle::naive_rho(g, m), 1e-12);
        }
    }
}

TEST(Conditions, MonotonicityAndBoundChain)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Index p = 6;
        const auto prob = raw_gaussian(10, p, 300 + seed);
        const Matrix g = unit_gram(prob);
        EXPECT_NEAR(phi_min(g, 1).value, 1.0, 1e-12);
        EXPECT_NEAR(phi_max(g, 1).value, 1.0, 1e-12);
        for (Index m = 1; m < p; ++m) {
            EXPECT_LE(phi_min(g, m + 1).value, phi_min(g, m).value + 1e-12);
            EXPECT_GE(phi_max(g, m + 1).value, phi_max(g, m).value - 1e-12);
        }
        for (Index m = 1; m < p; ++m) {
            for (Index mp = 1; m + mp <= p; ++mp) {
                const Scalar t = theta(g, m, mp).value;
                EXPECT_LE(t, std::sqrt(phi_max(g, m).value * phi_max(g, mp).value) + 1e-12);
                if (m + mp + 1 <= p) {
                    EXPECT_GE(theta(g, m + 1, mp).value, t - 1e-12);
                    EXPECT_GE(theta(g, m, mp + 1).value, t - 1e-12);
                }
            }
        }
        const Scalar r = rho(g, 2).value;
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0 + 1e-12);
    }
}

TEST(Conditions, ThetaIndexConvention)
{
    // |left| <= m', |right| <= m
    const auto prob = raw_gaussian(12, 6, 5);
    const auto t = theta(prob, 1, 3);
    EXPECT_LE(static_cast<Index>(t.left.size()), 3);
    EXPECT_LE(static_cast<Index>(t.right.size()), 1);
}

TEST(Conditions, ArgumentErrors)
{
    const auto prob = orthogonal(16, 4, 2);
    EXPECT_THROW(phi_min(prob, 0), InvalidArgument);
    EXPECT_THROW(phi_min(prob, 5), InvalidArgument);
    EXPECT_THROW(theta(prob, 2, 3), InvalidArgument);
    EXPECT_THROW(rho(prob, 4), InvalidArgument);
    EXPECT_THROW(rho(prob, 0), InvalidArgument);
    EXPECT_THROW(evaluate_conditions(prob, 0), InvalidArgument);
}

TEST(Conditions, BudgetIsExplicit)
{
    const auto prob = raw_gaussian(30, 12, 4);
    EXPECT_THROW(phi_min(prob, 6, 100), BudgetExceeded);
    EXPECT_NO_THROW(phi_min(prob, 2, 100));
    EXPECT_THROW(theta(prob, 3, 3, 1000), BudgetExceeded);
}

TEST(Conditions, EvaluateOrthogonal)
{
    const auto prob = orthogonal(64, 8, 9);
    const auto rep = evaluate_conditions(prob, 2);
    EXPECT_EQ(rep.m_two_s, 4);
    EXPECT_EQ(rep.m_my, 8);  // ceil(2 ln 64) = 9, capped at p
    ASSERT_TRUE(rep.params.k_bar);
    EXPECT_EQ(*rep.params.k_bar, 8.0);
    ASSERT_TRUE(rep.a1 && rep.a2 && rep.a3_btw && rep.a3_my && rep.a3_ct);
    EXPECT_TRUE(*rep.a1);
    EXPECT_TRUE(*rep.a2);
    EXPECT_TRUE(*rep.a3_btw);
    EXPECT_TRUE(*rep.a3_my);
    // strict "phi_min(2s) < 1" fails at exactly one
    EXPECT_FALSE(*rep.a3_ct);
    EXPECT_TRUE(rep.phi_min_two_s_is_one);
    EXPECT_TRUE(rep.enumeration_exact);
    EXPECT_FALSE(rep.notes.empty());
}

TEST(Conditions, EvaluateCollinear)
{
    const auto data = population_collinear(1.0, 1.0);
    const auto rep = evaluate_conditions(data.problem, 2);
    EXPECT_EQ(rep.m_two_s, 3);
    ASSERT_TRUE(rep.a2);
    EXPECT_FALSE(*rep.a2);
    EXPECT_NEAR(rep.phi_min.at(3).value, 0.0, 1e-12);
    EXPECT_FALSE(rep.a3_ct);  // 3s > p
}

TEST(Conditions, EvaluateCorrelatedPair)
{
    const auto rep = evaluate_conditions(correlated_pair(20, 0.9, 3), 1);
    ASSERT_TRUE(rep.a3_btw);
    EXPECT_FALSE(*rep.a3_btw);
    ASSERT_TRUE(rep.rho_s);
    EXPECT_NEAR(rep.rho_s->value, 0.9, 1e-12);
}

TEST(Conditions, ParamsAreHonoured)
{
    const auto prob = correlated_pair(20, 0.5, 3);
    ConditionParams params;
    params.k_bar = 1.2;
    params.m_constant = 0.6;
    params.k_underline = 0.6;
    const auto rep = evaluate_conditions(prob, 1, params);
    EXPECT_FALSE(*rep.a1);      // phi_max = 1.5
    EXPECT_FALSE(*rep.a2);      // phi_min(2) = 0.5
    EXPECT_TRUE(*rep.a3_btw);   // 0.5 <= 0.6
}

TEST(Conditions, BudgetGivesPartialReport)
{
    const auto prob = raw_gaussian(60, 14, 6);
    const auto rep = evaluate_conditions(prob, 3, {}, 1000);
    EXPECT_FALSE(rep.enumeration_exact);
    EXPECT_FALSE(rep.a2);  // C(14, 6) = 3003 > 1000
    EXPECT_FALSE(rep.a3_ct);
    EXPECT_TRUE(rep.a3_btw);  // rho needs no enumeration
    EXPECT_TRUE(rep.a1);      // full phi_max is a single eigenproblem
    EXPECT_FALSE(rep.notes.empty());
}
