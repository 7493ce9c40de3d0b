#pragma once

#include "sparselab/problem.hpp"
#include "sparselab/simulate.hpp"

#include <random>

namespace testing_helpers {

using namespace sparselab;

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return gaussian_matrix(rows, cols, rng);
}

inline Vector random_vector(Index n, std::uint64_t seed)
{
    return random_matrix(n, 1, seed).col(0);
}

inline Matrix random_symmetric(Index n, std::uint64_t seed)
{
    const Matrix a = random_matrix(n, n, seed);
    return 0.5 * (a + a.transpose());
}

/// Normalized problem with Gaussian design, given response generator.
inline RegressionProblem random_problem(Index n, Index p, std::uint64_t seed, Index s = 2, Scalar sigma = 0.5)
{
    SyntheticSpec spec;
    spec.n = n;
    spec.p = p;
    spec.s = s;
    spec.sigma = sigma;
    spec.seed = seed;
    return simulate(spec).problem;
}

/// Normalized orthogonal design (X^T X = n I) with the given response.
inline RegressionProblem orthogonal_problem(Index n, Index p, const Vector& beta, Scalar sigma, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const Matrix x = orthogonal_design(n, p, rng);
    std::normal_distribution<Scalar> normal;
    Vector y = x * beta;
    for (Index i = 0; i < n; ++i) {
        y(i) += sigma * normal(rng);
    }
    return normalize_columns(RegressionProblem(x, y));
}

/// 2-column design with sample correlation exactly r (normalized).
inline RegressionProblem correlated_pair(Index n, Scalar r, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const Matrix q = orthogonal_design(n, 2, rng);  // q^T q = n I
    Matrix x(n, 2);
    x.col(0) = q.col(0);
    x.col(1) = r * q.col(0) + std::sqrt(1.0 - r * r) * q.col(1);
    return normalize_columns(RegressionProblem(x, Vector::Zero(n)));
}

}  // namespace testing_helpers
