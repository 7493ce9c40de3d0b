#include "helpers.hpp"
#include "oracles.hpp"

#include "sparselab/estimators.hpp"
#include "sparselab/model_analysis.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace sparselab;
using namespace testing_helpers;

TEST(SoftThreshold, Examples)
{
    EXPECT_EQ(soft_threshold(0.0, 1.0), 0.0);
    EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
    EXPECT_EQ(soft_threshold(-0.5, 1.0), 0.0);
    EXPECT_EQ(soft_threshold(-2.5, 1.0), -1.5);
    EXPECT_THROW(soft_threshold(1.0, -0.1), InvalidArgument);
}

TEST(Dantzig, ZeroAboveLambdaMax)
{
    const auto prob = random_problem(40, 15, 3);
    const Scalar top = dantzig_lambda_max(prob);
    EXPECT_NEAR(top, (prob.design().transpose() * prob.response()).cwiseAbs().maxCoeff(), 1e-12);
    for (Scalar lam : {top, 1.5 * top}) {
        const auto fit = dantzig_fit(prob, lam);
        EXPECT_EQ(fit.coefficients.sparsity(), 0);
        EXPECT_EQ(fit.objective_value, 0.0);
    }
    EXPECT_GT(dantzig_fit(prob, 0.9 * top).coefficients.sparsity(), 0);
}

TEST(Dantzig, RejectsNegativeLambda)
{
    const auto prob = random_problem(20, 5, 3);
    EXPECT_THROW(dantzig_fit(prob, -1.0), InvalidArgument);
    EXPECT_THROW(lasso_fit(prob, -1.0), InvalidArgument);
}

TEST(Dantzig, OrthogonalIsSoftThreshold)
{
    Vector beta = Vector::Zero(20);
    beta.head(4) << 1.5, -0.7, 0.3, 2.0;
    const auto prob = orthogonal_problem(50, 20, beta, 0.4, 8);
    const Scalar n = 50;
    const Vector z = prob.design().transpose() * prob.response() / n;
    for (Scalar lam : {0.0, 2.0, 8.0, 20.0}) {
        const auto fit = dantzig_fit(prob, lam);
        for (Index j = 0; j < 20; ++j) {
            EXPECT_NEAR(fit.coefficients(j), soft_threshold(z(j), lam / n), 1e-6) << "lambda " << lam;
        }
        EXPECT_TRUE(fit.converged);
    }
}

TEST(Dantzig, CollinearMinimumL1)
{
    const auto data = population_collinear(1.0, 1.0);
    const auto fit = dantzig_fit(data.problem, 0.0);
    const Vector raw = data.problem.to_original_scale(fit.coefficients.values());
    EXPECT_NEAR(raw(0), 0.0, 1e-8);
    EXPECT_NEAR(raw(1), 2.0, 1e-8);
    EXPECT_NEAR(raw(2), 0.0, 1e-8);
    // and it is the smallest-l1 member of the representation family
    const auto family = representation_family(data.problem, data.beta0.values(), 3);
    EXPECT_NEAR(min_l1_member(family).coefficients.lpNorm<1>(), fit.coefficients.l1_norm(), 1e-8);
}

TEST(Dantzig, FeasibleAndL1MinimalAgainstVertexEnumeration)
{
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Index p = 3 + static_cast<Index>(seed % 4);  // 3..6
        const Index n = seed % 3 == 0 ? p - 1 : 2 * p;      // some p > n
        const auto prob = random_problem(n, p, 500 + seed, 2, 0.7);
        const Scalar top = dantzig_lambda_max(prob);
        for (Scalar frac : {0.05, 0.3, 0.7}) {
            const Scalar lam = frac * top;
            const auto fit = dantzig_fit(prob, lam);
            EXPECT_LE(dantzig_infeasibility(prob, fit.coefficients.values(), lam), 1e-6);
            const auto ref = oracle::dantzig_min_l1(prob.design(), prob.response(), lam);
            ASSERT_TRUE(ref.has_value());
            EXPECT_NEAR(fit.coefficients.l1_norm(), *ref, 1e-6 * std::max(1.0, *ref))
                << "seed " << seed << " frac " << frac;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 90);
}

TEST(Dantzig, EightVariableVertexCheck)
{
    const auto prob = random_problem(12, 8, 4242, 3, 0.5);
    const Scalar lam = 0.2 * dantzig_lambda_max(prob);
    const auto fit = dantzig_fit(prob, lam);
    const auto ref = oracle::dantzig_min_l1(prob.design(), prob.response(), lam);
    ASSERT_TRUE(ref.has_value());
    EXPECT_NEAR(fit.coefficients.l1_norm(), *ref, 1e-6);
}

TEST(Dantzig, ObjectiveNonincreasingInLambda)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto prob = random_problem(30, 60, 900 + seed, 4, 0.5);
        const Scalar top = dantzig_lambda_max(prob);
        Scalar previous = std::numeric_limits<Scalar>::infinity();
        for (int k = 1; k <= 12; ++k) {
            const auto fit = dantzig_fit(prob, top * k / 12.0);
            EXPECT_LE(fit.objective_value, previous + 1e-9);
            previous = fit.objective_value;
        }
    }
}

TEST(Dantzig, WideProblemsAreFeasible)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto prob = random_problem(50, 300, 70 + seed, 5, 1.0);
        const Scalar lam = default_lambda(50, 300, 1.0);
        const auto fit = dantzig_fit(prob, lam);
        EXPECT_LE(dantzig_infeasibility(prob, fit.coefficients.values(), lam), 1e-6);
        EXPECT_TRUE(fit.converged);
        EXPECT_NEAR(fit.objective_value, fit.coefficients.l1_norm(), 1e-12);
    }
}

TEST(Lasso, ZeroLambdaIsLeastSquares)
{
    const Matrix x = random_matrix(6, 6, 19);
    const Vector y = random_vector(6, 20);
    const RegressionProblem prob(x, y);
    const auto fit = lasso_fit(prob, 0.0);
    const Vector ls = x.colPivHouseholderQr().solve(y);
    EXPECT_LE((fit.coefficients.values() - ls).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Lasso, ZeroAboveTwiceLambdaMax)
{
    const auto prob = random_problem(40, 15, 31);
    const Scalar top = 2.0 * (prob.design().transpose() * prob.response()).cwiseAbs().maxCoeff();
    EXPECT_EQ(lasso_fit(prob, top).coefficients.sparsity(), 0);
    EXPECT_EQ(lasso_fit(prob, 1.01 * top).coefficients.sparsity(), 0);
    EXPECT_GT(lasso_fit(prob, 0.95 * top).coefficients.sparsity(), 0);
}

TEST(Lasso, OrthogonalClosedForm)
{
    Vector beta = Vector::Zero(16);
    beta.head(3) << 1.0, -2.0, 0.5;
    const auto prob = orthogonal_problem(40, 16, beta, 0.5, 12);
    const Scalar n = 40;
    const Vector z = prob.design().transpose() * prob.response() / n;
    for (Scalar lam : {0.5, 5.0, 30.0}) {
        const auto fit = lasso_fit(prob, lam);
        for (Index j = 0; j < 16; ++j) {
            EXPECT_NEAR(fit.coefficients(j), soft_threshold(z(j), lam / (2 * n)), 1e-8);
        }
    }
}

TEST(Lasso, KktOnRandomProblems)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index p = 10 + static_cast<Index>(seed) * 7;
        const auto prob = random_problem(40, p, 300 + seed, 4, 0.8);
        const Scalar top = 2.0 * dantzig_lambda_max(prob);
        for (Scalar frac : {0.01, 0.2, 0.6}) {
            const auto fit = lasso_fit(prob, frac * top);
            EXPECT_TRUE(fit.converged);
            EXPECT_LE(lasso_kkt_violation(prob, fit.coefficients.values(), frac * top), 1e-6)
                << "seed " << seed << " frac " << frac;
            EXPECT_NEAR(fit.objective_value, lasso_objective(prob, fit.coefficients.values(), frac * top), 1e-9);
        }
    }
}

TEST(Lasso, OptimalAgainstPerturbations)
{
    const auto prob = random_problem(25, 12, 55, 3, 0.5);
    const Scalar lam = 10.0;
    const auto fit = lasso_fit(prob, lam);
    const Scalar best = lasso_objective(prob, fit.coefficients.values(), lam);
    std::mt19937_64 rng(1);
    std::normal_distribution<Scalar> normal;
    for (int k = 0; k < 200; ++k) {
        Vector b = fit.coefficients.values();
        for (Index j = 0; j < b.size(); ++j) {
            b(j) += 1e-3 * normal(rng);
        }
        EXPECT_GE(lasso_objective(prob, b, lam), best - 1e-9);
    }
}

TEST(Lasso, CollinearLimitIsMinimumL1)
{
    const auto data = population_collinear(1.0, 1.0);
    const auto fit = lasso_fit(data.problem, 1e-6);
    const Vector raw = data.problem.to_original_scale(fit.coefficients.values());
    EXPECT_NEAR(raw(0), 0.0, 1e-4);
    EXPECT_NEAR(raw(1), 2.0, 1e-4);
    EXPECT_NEAR(raw(2), 0.0, 1e-4);
}

TEST(Chebyshev, ExactSpanHasZeroObjective)
{
    const auto prob = random_problem(20, 5, 8);
    const Vector y = prob.design() * Vector::LinSpaced(5, -1.0, 1.0);
    const auto fit = chebyshev_fit(prob.with_response(y));
    EXPECT_LE(fit.objective_value, 1e-9);
}

TEST(Chebyshev, MidpointOfTwoObservations)
{
    Matrix x(2, 1);
    x << 1, 1;
    Vector y(2);
    y << 0, 2;
    const auto fit = chebyshev_fit(RegressionProblem(x, y));
    EXPECT_NEAR(fit.coefficients(0), 1.0, 1e-12);
    EXPECT_NEAR(fit.objective_value, 1.0, 1e-12);
    EXPECT_EQ(fit.method, FitMethod::Chebyshev);
}

TEST(Chebyshev, NoWorseThanLeastSquaresInSupNorm)
{
    const auto prob = random_problem(30, 4, 81, 2, 1.0);
    const auto fit = chebyshev_fit(prob);
    const auto ls = least_squares(prob, all_indices(4));
    EXPECT_LE(fit.objective_value, ls.residual.cwiseAbs().maxCoeff() + 1e-9);
}

TEST(FitMethodNames, RoundTrip)
{
    for (auto m : {FitMethod::Dantzig, FitMethod::Lasso, FitMethod::Chebyshev, FitMethod::SoftThreshold}) {
        EXPECT_EQ(fit_method_from_string(to_string(m)), m);
    }
    EXPECT_EQ(to_string(FitMethod::SoftThreshold), "soft-threshold");
    EXPECT_THROW(fit_method_from_string("ridge"), InvalidArgument);
}

TEST(DefaultLambda, Formula)
{
    EXPECT_NEAR(default_lambda(100, 50, 2.0), 2.0 * std::sqrt(200.0 * std::log(50.0)), 1e-12);
}

TEST(Sigma, NoiselessIsNearZero)
{
    SyntheticSpec spec;
    spec.n = 100;
    spec.p = 30;
    spec.s = 3;
    spec.sigma = 0.0;
    spec.seed = 4;
    const auto data = simulate(spec);
    const Scalar bound = 1e-6 * data.problem.response().norm() / std::sqrt(100.0);
    EXPECT_LE(estimate_sigma(data.problem), bound);
}

TEST(Sigma, PureNoiseIsCalibrated)
{
    std::vector<Scalar> est;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SyntheticSpec spec;
        spec.n = 200;
        spec.p = 50;
        spec.s = 0;
        spec.sigma = 1.0;
        spec.seed = 1000 + seed;
        SigmaOptions opts;
        opts.seed = seed;
        const Scalar s = estimate_sigma(simulate(spec).problem, opts);
        EXPECT_GE(s, 0.8);
        EXPECT_LE(s, 1.2);
        est.push_back(s);
    }
    const Scalar mean = std::accumulate(est.begin(), est.end(), 0.0) / est.size();
    EXPECT_NEAR(mean, 1.0, 0.05);
}

TEST(Sigma, ScalesWithNoiseLevel)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SyntheticSpec spec;
        spec.n = 200;
        spec.p = 50;
        spec.s = 3;
        spec.sigma = 1.0;
        spec.seed = 50 + seed;
        const Scalar one = estimate_sigma(simulate(spec).problem);
        spec.sigma = 2.0;
        const Scalar two = estimate_sigma(simulate(spec).problem);
        EXPECT_NEAR(two / one, 2.0, 0.2) << "seed " << seed;
    }
}

TEST(Sigma, NeedsThreeObservations)
{
    const RegressionProblem prob(Matrix::Ones(2, 1), Vector::Ones(2));
    EXPECT_THROW(estimate_sigma(prob), InvalidArgument);
}
