#pragma once

#include "sparselab/linalg.hpp"
#include "sparselab/types.hpp"

#include <optional>

namespace sparselab {

/// Regression data Y = X beta + eps.
///
/// Columns of the design are predictors. A problem produced by
/// normalize_columns() carries the per-column factors that were applied, so
/// coefficients on the normalized columns map back to the original columns
/// via to_original_scale().
class RegressionProblem {
public:
    RegressionProblem(Matrix design, Vector response, std::optional<Scalar> noise_sigma = std::nullopt);

    const Matrix& design() const noexcept { return design_; }
    const Vector& response() const noexcept { return response_; }
    const std::optional<Scalar>& noise_sigma() const noexcept { return noise_sigma_; }

    Index n() const noexcept { return design_.rows(); }
    Index p() const noexcept { return design_.cols(); }

    bool normalized() const noexcept { return normalized_; }
    /// Factor applied to each original column (all ones unless normalized).
    const Vector& column_scales() const noexcept { return column_scales_; }

    /// Same design and scales with a different response.
    RegressionProblem with_response(Vector response) const;
    /// Subset of observations; scale metadata carried along.
    RegressionProblem select_rows(const std::vector<Index>& rows) const;

    Vector to_original_scale(const Vector& coefficients) const;

private:
    friend RegressionProblem normalize_columns(const RegressionProblem& problem);

    Matrix design_;
    Vector response_;
    std::optional<Scalar> noise_sigma_;
    Vector column_scales_;
    bool normalized_ = false;
};

/// Length-p coefficient vector with support helpers.
class CoefficientVector {
public:
    CoefficientVector() = default;
    explicit CoefficientVector(Vector values) : values_(std::move(values)) {}

    const Vector& values() const noexcept { return values_; }
    Vector& values() noexcept { return values_; }
    Index size() const noexcept { return values_.size(); }
    Scalar operator()(Index j) const { return values_(j); }

    IndexSet support(Scalar tol = kSupportTolerance) const;
    Index sparsity(Scalar tol = kSupportTolerance) const;
    Scalar l1_norm() const { return values_.lpNorm<1>(); }

private:
    Vector values_;
};

/// Rescales each column to squared norm n. Throws ZeroColumn.
RegressionProblem normalize_columns(const RegressionProblem& problem);

/// max_j | |X_j|^2 - n | / n
Scalar normalization_defect(const Matrix& design);

void check_subset(const IndexSet& subset, Index p);

/// X_L^T X_L / n.
Matrix gram(const Matrix& design, const IndexSet& subset);
Matrix gram(const RegressionProblem& problem, const IndexSet& subset);
/// Full X^T X / n.
Matrix gram(const RegressionProblem& problem);

Matrix select_columns(const Matrix& design, const IndexSet& subset);

LeastSquaresFit<Scalar> least_squares(const RegressionProblem& problem, const IndexSet& subset);

IndexSet all_indices(Index p);

}  // namespace sparselab
