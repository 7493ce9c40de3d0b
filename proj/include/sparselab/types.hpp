#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparselab {

using Scalar = double;
using Index = Eigen::Index;

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Matrix = MatrixX<Scalar>;
using Vector = VectorX<Scalar>;

/// Sorted list of 0-based column indices.
using IndexSet = std::vector<Index>;

/// A coefficient is "nonzero" when its magnitude exceeds this.
inline constexpr Scalar kSupportTolerance = 1e-8;

// Error hierarchy. Everything thrown by the library derives from Error;
// NumericalError marks failures of the numerics rather than of the inputs.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ZeroColumn : public InvalidArgument {
public:
    explicit ZeroColumn(Index column)
        : InvalidArgument("column " + std::to_string(column) + " is identically zero"), column_(column) {}
    Index column() const noexcept { return column_; }

private:
    Index column_;
};

class IndexOutOfRange : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class NotSymmetric : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidSpec : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class BudgetExceeded : public InvalidArgument {
public:
    BudgetExceeded(std::uint64_t count, std::uint64_t cap)
        : InvalidArgument("enumeration of " + std::to_string(count) + " subsets exceeds budget " +
                          std::to_string(cap)),
          count_(count) {}
    std::uint64_t count() const noexcept { return count_; }

private:
    std::uint64_t count_;
};

class DegenerateCoefficient : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class RankDeficient : public NumericalError {
public:
    RankDeficient(const std::string& what, IndexSet subset)
        : NumericalError(what), subset_(std::move(subset)) {}
    const IndexSet& subset() const noexcept { return subset_; }

private:
    IndexSet subset_;
};

class NumericalFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFold : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace sparselab
