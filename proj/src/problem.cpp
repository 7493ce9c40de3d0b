#include "sparselab/problem.hpp"

#include <numeric>

namespace sparselab {

RegressionProblem::RegressionProblem(Matrix design, Vector response, std::optional<Scalar> noise_sigma)
    : design_(std::move(design)),
      response_(std::move(response)),
      noise_sigma_(noise_sigma),
      column_scales_(Vector::Ones(design_.cols()))
{
    if (design_.rows() < 1 || design_.cols() < 1) {
        throw InvalidArgument("design must have at least one row and one column");
    }
    if (response_.size() != design_.rows()) {
        throw InvalidArgument("response length " + std::to_string(response_.size()) +
                              " does not match design rows " + std::to_string(design_.rows()));
    }
    if (noise_sigma_ && !(*noise_sigma_ >= 0.0)) {
        throw InvalidArgument("noise sigma must be nonnegative");
    }
    if (!design_.allFinite() || !response_.allFinite()) {
        throw InvalidArgument("design and response must be finite");
    }
}

RegressionProblem RegressionProblem::with_response(Vector response) const
{
    RegressionProblem out(design_, std::move(response), noise_sigma_);
    out.column_scales_ = column_scales_;
    out.normalized_ = normalized_;
    return out;
}

RegressionProblem RegressionProblem::select_rows(const std::vector<Index>& rows) const
{
    Matrix x(static_cast<Index>(rows.size()), p());
    Vector y(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= n()) {
            throw IndexOutOfRange("row index out of range");
        }
        x.row(static_cast<Index>(i)) = design_.row(rows[i]);
        y(static_cast<Index>(i)) = response_(rows[i]);
    }
    RegressionProblem out(std::move(x), std::move(y), noise_sigma_);
    out.column_scales_ = column_scales_;
    // A row subset is no longer exactly normalized.
    out.normalized_ = false;
    return out;
}

Vector RegressionProblem::to_original_scale(const Vector& coefficients) const
{
    if (coefficients.size() != p()) {
        throw InvalidArgument("coefficient length mismatch");
    }
    return coefficients.cwiseProduct(column_scales_);
}

IndexSet CoefficientVector::support(Scalar tol) const
{
    IndexSet s;
    for (Index j = 0; j < values_.size(); ++j) {
        if (std::abs(values_(j)) > tol) {
            s.push_back(j);
        }
    }
    return s;
}

Index CoefficientVector::sparsity(Scalar tol) const
{
    return static_cast<Index>(support(tol).size());
}

RegressionProblem normalize_columns(const RegressionProblem& problem)
{
    const Scalar target = std::sqrt(static_cast<Scalar>(problem.n()));
    Matrix x = problem.design();
    Vector factors(problem.p());
    for (Index j = 0; j < x.cols(); ++j) {
        const Scalar norm = x.col(j).norm();
        if (norm == 0.0) {
            throw ZeroColumn(j);
        }
        factors(j) = target / norm;
        x.col(j) *= factors(j);
    }
    RegressionProblem out(std::move(x), problem.response(), problem.noise_sigma());
    out.column_scales_ = problem.column_scales().cwiseProduct(factors);
    out.normalized_ = true;
    return out;
}

Scalar normalization_defect(const Matrix& design)
{
    const Scalar n = static_cast<Scalar>(design.rows());
    return ((design.colwise().squaredNorm().array() - n).abs() / n).maxCoeff();
}

void check_subset(const IndexSet& subset, Index p)
{
    for (Index j : subset) {
        if (j < 0 || j >= p) {
            throw IndexOutOfRange("column index " + std::to_string(j) + " out of range [0, " +
                                  std::to_string(p) + ")");
        }
    }
}

Matrix select_columns(const Matrix& design, const IndexSet& subset)
{
    check_subset(subset, design.cols());
    Matrix out(design.rows(), static_cast<Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k) {
        out.col(static_cast<Index>(k)) = design.col(subset[k]);
    }
    return out;
}

Matrix gram(const Matrix& design, const IndexSet& subset)
{
    if (subset.empty()) {
        throw InvalidArgument("gram: empty subset");
    }
    const Matrix xl = select_columns(design, subset);
    Matrix g = xl.transpose() * xl / static_cast<Scalar>(design.rows());
    return (g + g.transpose()) * 0.5;
}

Matrix gram(const RegressionProblem& problem, const IndexSet& subset)
{
    return gram(problem.design(), subset);
}

Matrix gram(const RegressionProblem& problem)
{
    const Matrix& x = problem.design();
    Matrix g = x.transpose() * x / static_cast<Scalar>(problem.n());
    return (g + g.transpose()) * 0.5;
}

LeastSquaresFit<Scalar> least_squares(const RegressionProblem& problem, const IndexSet& subset)
{
    return least_squares(select_columns(problem.design(), subset), problem.response(), subset);
}

IndexSet all_indices(Index p)
{
    IndexSet s(static_cast<std::size_t>(p));
    std::iota(s.begin(), s.end(), Index{0});
    return s;
}

}  // namespace sparselab
