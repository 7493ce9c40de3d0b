#include "sparselab/simulate.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparselab {

std::string to_string(DesignKind kind)
{
    switch (kind) {
    case DesignKind::IidGaussian:
        return "iid-gaussian";
    case DesignKind::Orthogonal:
        return "orthogonal";
    case DesignKind::Collinear:
        return "collinear-example";
    case DesignKind::Correlated:
        return "custom-correlation";
    }
    return "unknown";
}

DesignKind design_kind_from_string(const std::string& name)
{
    if (name == "iid-gaussian" || name == "gaussian") {
        return DesignKind::IidGaussian;
    }
    if (name == "orthogonal") {
        return DesignKind::Orthogonal;
    }
    if (name == "collinear-example" || name == "collinear") {
        return DesignKind::Collinear;
    }
    if (name == "custom-correlation" || name == "correlated") {
        return DesignKind::Correlated;
    }
    throw InvalidSpec("unknown design kind '" + name + "'");
}

void validate(const SyntheticSpec& spec)
{
    if (spec.n < 1 || spec.p < 1) {
        throw InvalidSpec("n and p must be positive");
    }
    if (spec.s < 0 || spec.s > spec.p) {
        throw InvalidSpec("need 0 <= s <= p");
    }
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
        throw InvalidSpec("sigma must be finite and nonnegative");
    }
    switch (spec.design) {
    case DesignKind::Orthogonal:
        if (spec.n < spec.p) {
            throw InvalidSpec("orthogonal design needs n >= p");
        }
        break;
    case DesignKind::Collinear:
        if (spec.p != 3 || spec.s != 3) {
            throw InvalidSpec("collinear example has p = s = 3");
        }
        if (spec.alpha == 0.0 && spec.beta == 0.0) {
            throw InvalidSpec("collinear example needs alpha or beta nonzero");
        }
        if (spec.n < 2) {
            throw InvalidSpec("collinear example needs n >= 2");
        }
        break;
    case DesignKind::Correlated:
        if (!(spec.correlation >= 0.0 && spec.correlation < 1.0)) {
            throw InvalidSpec("correlation must lie in [0, 1)");
        }
        break;
    case DesignKind::IidGaussian:
        break;
    }
}

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<Scalar> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = normal(rng);
        }
    }
    return m;
}

Matrix orthogonal_design(Index n, Index p, std::mt19937_64& rng)
{
    if (n < p) {
        throw InvalidSpec("orthogonal design needs n >= p");
    }
    const Matrix g = gaussian_matrix(n, p, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, p);
    return q * std::sqrt(static_cast<Scalar>(n));
}

namespace {

Vector sparse_signs(Index p, Index s, std::mt19937_64& rng)
{
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(0.5);
    Vector beta = Vector::Zero(p);
    for (Index k = 0; k < s; ++k) {
        beta(order[static_cast<std::size_t>(k)]) = coin(rng) ? 1.0 : -1.0;
    }
    return beta;
}

}  // namespace

SimulatedData simulate(const SyntheticSpec& spec)
{
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    const Index n = spec.n;
    const Index p = spec.p;

    Matrix raw;
    Vector beta_raw;
    switch (spec.design) {
    case DesignKind::IidGaussian:
        raw = gaussian_matrix(n, p, rng);
        beta_raw = sparse_signs(p, spec.s, rng);
        break;
    case DesignKind::Orthogonal:
        raw = orthogonal_design(n, p, rng);
        beta_raw = sparse_signs(p, spec.s, rng);
        break;
    case DesignKind::Correlated: {
        const Matrix z = gaussian_matrix(n, p, rng);
        const Matrix w = gaussian_matrix(n, 1, rng);
        raw = std::sqrt(1.0 - spec.correlation) * z +
              std::sqrt(spec.correlation) * w.col(0).replicate(1, p);
        beta_raw = sparse_signs(p, spec.s, rng);
        break;
    }
    case DesignKind::Collinear: {
        const Matrix z = gaussian_matrix(n, 2, rng);
        raw.resize(n, 3);
        raw.col(0) = z.col(0);
        raw.col(2) = z.col(1);
        raw.col(1) = spec.alpha * raw.col(0) + spec.beta * raw.col(2);
        beta_raw = Vector::Ones(3);
        break;
    }
    }

    std::normal_distribution<Scalar> normal(0.0, 1.0);
    Vector noise(n);
    for (Index i = 0; i < n; ++i) {
        noise(i) = normal(rng);
    }
    Vector y = raw * beta_raw + spec.sigma * noise;

    RegressionProblem normalized = normalize_columns(RegressionProblem(raw, std::move(y), spec.sigma));
    // X_raw_j = X_norm_j / scale_j, so beta on normalized columns is beta_raw / scale.
    Vector beta0 = beta_raw.cwiseQuotient(normalized.column_scales());
    return {std::move(normalized), CoefficientVector(std::move(beta0))};
}

SimulatedData population_collinear(Scalar alpha, Scalar beta, Index n, bool normalized)
{
    if (n < 3) {
        throw InvalidSpec("population collinear design needs n >= 3");
    }
    Matrix cov(3, 3);
    cov << 1.0, alpha, 0.0, alpha, alpha * alpha + beta * beta, beta, 0.0, beta, 1.0;

    // cov = V D V^T; X = sqrt(n) U D^{1/2} V^T with U having orthonormal columns.
    const auto eig = sym_eigen_decomposition(cov);
    const Vector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    const Matrix factor = root.asDiagonal() * eig.vectors.transpose();

    Matrix seed_matrix(n, 3);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < 3; ++j) {
            seed_matrix(i, j) = std::cos(0.7 * static_cast<Scalar>((i + 1) * (j + 2)));
        }
    }
    Eigen::HouseholderQR<Matrix> qr(seed_matrix);
    const Matrix u = qr.householderQ() * Matrix::Identity(n, 3);
    Matrix x = std::sqrt(static_cast<Scalar>(n)) * u * factor;

    // Enforce the linear identity to the last bit; the factorization is exact
    // only up to rounding.
    x.col(1) = alpha * x.col(0) + beta * x.col(2);
    Vector y = x.rowwise().sum();

    RegressionProblem problem(std::move(x), std::move(y), 0.0);
    if (!normalized) {
        return {std::move(problem), CoefficientVector(Vector::Ones(3))};
    }
    RegressionProblem scaled = normalize_columns(problem);
    Vector beta0 = Vector::Ones(3).cwiseQuotient(scaled.column_scales());
    return {std::move(scaled), CoefficientVector(std::move(beta0))};
}

}  // namespace sparselab
