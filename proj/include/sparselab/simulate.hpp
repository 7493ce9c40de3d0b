#pragma once

#include "sparselab/problem.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace sparselab {

enum class DesignKind {
    IidGaussian,
    Orthogonal,    // X^T X = n I exactly; needs n >= p
    Collinear,     // X2 = alpha X1 + beta X3 before normalization, p = s = 3
    Correlated,    // equicorrelated Gaussian rows, corr(X_i, X_j) = r
};

std::string to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string& name);

struct SyntheticSpec {
    Index n = 100;
    Index p = 10;
    Index s = 3;
    Scalar sigma = 1.0;
    DesignKind design = DesignKind::IidGaussian;
    Scalar alpha = 1.0;        // collinear only
    Scalar beta = 1.0;         // collinear only
    Scalar correlation = 0.0;  // correlated only
    std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

struct SimulatedData {
    RegressionProblem problem;  // column-normalized
    CoefficientVector beta0;    // on the normalized columns: Y = X beta0 + eps
};

/// Draws a design per spec.design, normalizes its columns and forms
/// Y = X beta0 + sigma * z. Deterministic in spec.seed. For iid, orthogonal
/// and correlated designs beta0 has s entries of +-1 on a uniformly random
/// support; for the collinear design Y = X1 + X2 + X3 on the raw columns.
SimulatedData simulate(const SyntheticSpec& spec);

/// Noiseless collinear design whose Gram matrix equals the population
/// covariance of (X1, alpha X1 + beta X3, X3) exactly:
///   X^T X / n = [[1, a, 0], [a, a^2 + b^2, b], [0, b, 1]]
/// with Y = X1 + X2 + X3. With normalized = true the columns are rescaled
/// to |X_j|^2 = n and the factors recorded on the problem.
SimulatedData population_collinear(Scalar alpha, Scalar beta, Index n = 8, bool normalized = true);

/// Design with X^T X = n I built from a seeded Gaussian matrix. Needs n >= p.
Matrix orthogonal_design(Index n, Index p, std::mt19937_64& rng);

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng);

}  // namespace sparselab
