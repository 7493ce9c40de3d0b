#pragma once

// Dense linear-algebra primitives on small matrices: symmetric spectra,
// spectral norms, least squares. Templated on the scalar type so the same
// code runs in double or long double.

#include "sparselab/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace sparselab {

template <typename Derived>
typename Derived::Scalar symmetry_defect(const Eigen::MatrixBase<Derived>& a)
{
    if (a.rows() != a.cols()) {
        throw NotSymmetric("matrix is not square");
    }
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar tol = 1e-10)
{
    using T = typename Derived::Scalar;
    if (a.size() == 0) {
        return;
    }
    const T scale = std::max<T>(T(1), a.cwiseAbs().maxCoeff());
    if (symmetry_defect(a) > tol * scale) {
        throw NotSymmetric("matrix is not symmetric within tolerance");
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
template <typename Derived>
VectorX<typename Derived::Scalar> sym_eigs(const Eigen::MatrixBase<Derived>& a)
{
    using T = typename Derived::Scalar;
    require_symmetric(a);
    if (a.size() == 0) {
        return VectorX<T>();
    }
    Eigen::SelfAdjointEigenSolver<MatrixX<T>> solver(a.eval(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("symmetric eigensolver did not converge");
    }
    return solver.eigenvalues();
}

template <typename T>
struct SymEigen {
    VectorX<T> values;   // ascending
    MatrixX<T> vectors;  // columns match values
};

template <typename Derived>
SymEigen<typename Derived::Scalar> sym_eigen_decomposition(const Eigen::MatrixBase<Derived>& a)
{
    using T = typename Derived::Scalar;
    require_symmetric(a);
    Eigen::SelfAdjointEigenSolver<MatrixX<T>> solver(a.eval(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("symmetric eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Largest singular value, via the smaller of M^T M and M M^T.
template <typename Derived>
typename Derived::Scalar max_singular_value(const Eigen::MatrixBase<Derived>& m)
{
    using T = typename Derived::Scalar;
    if (m.size() == 0) {
        return T(0);
    }
    if (m.rows() == 1 || m.cols() == 1) {
        return m.norm();
    }
    MatrixX<T> g = m.rows() >= m.cols() ? MatrixX<T>(m.transpose() * m) : MatrixX<T>(m * m.transpose());
    g = (g + g.transpose()).eval() * T(0.5);
    Eigen::SelfAdjointEigenSolver<MatrixX<T>> solver(g, Eigen::EigenvaluesOnly);
    const T top = solver.eigenvalues()(solver.eigenvalues().size() - 1);
    return std::sqrt(std::max(top, T(0)));
}

template <typename T>
T soft_threshold(T z, T t)
{
    if (t < T(0)) {
        throw InvalidArgument("soft_threshold: negative threshold");
    }
    const T mag = std::abs(z) - t;
    if (mag <= T(0)) {
        return T(0);
    }
    return z > T(0) ? mag : -mag;
}

template <typename T>
struct LeastSquaresFit {
    VectorX<T> coefficients;
    VectorX<T> residual;
    T rss = T(0);
    T residual_mean_square = T(0);  // rss / (n - k); NaN when n == k
    VectorX<T> inverse_gram_diagonal;  // diag((X^T X)^{-1})
};

/// Ordinary least squares of y on the columns of x. Throws RankDeficient when
/// the smallest singular value is at most 1e-10 times the largest.
template <typename DerivedX, typename DerivedY>
LeastSquaresFit<typename DerivedX::Scalar> least_squares(const Eigen::MatrixBase<DerivedX>& x,
                                                         const Eigen::MatrixBase<DerivedY>& y,
                                                         const IndexSet& label = {})
{
    using T = typename DerivedX::Scalar;
    const Index n = x.rows();
    const Index k = x.cols();
    if (y.size() != n) {
        throw InvalidArgument("least_squares: row mismatch");
    }
    if (k == 0) {
        LeastSquaresFit<T> fit;
        fit.coefficients = VectorX<T>();
        fit.residual = y;
        fit.rss = y.squaredNorm();
        fit.residual_mean_square = n > 0 ? fit.rss / T(n) : T(NAN);
        return fit;
    }
    if (k > n) {
        throw RankDeficient("least_squares: more columns than rows", label);
    }
    Eigen::JacobiSVD<MatrixX<T>> svd(x);
    const auto& sv = svd.singularValues();
    if (!(sv(k - 1) > T(1e-10) * sv(0))) {
        throw RankDeficient("least_squares: design is rank deficient", label);
    }
    Eigen::HouseholderQR<MatrixX<T>> qr(x);
    LeastSquaresFit<T> fit;
    fit.coefficients = qr.solve(y.eval());
    fit.residual = y - x * fit.coefficients;
    fit.rss = fit.residual.squaredNorm();
    fit.residual_mean_square = n > k ? fit.rss / T(n - k) : T(NAN);

    // diag((R^T R)^{-1}) = squared row norms of R^{-1}
    const MatrixX<T> r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    const MatrixX<T> r_inv =
        r.template triangularView<Eigen::Upper>().solve(MatrixX<T>::Identity(k, k));
    fit.inverse_gram_diagonal = r_inv.rowwise().squaredNorm();
    return fit;
}

}  // namespace sparselab
