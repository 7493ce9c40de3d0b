#pragma once

#include "sparselab/types.hpp"

#include <limits>
#include <string>

namespace sparselab {

/// minimize c^T x  subject to  A x <= b,  lower <= x <= upper.
/// Bounds may be infinite; a default-constructed bound vector means x >= 0.
struct LinearProgram {
    Vector objective;
    Matrix constraints;
    Vector rhs;
    Vector lower;  // empty => zeros
    Vector upper;  // empty => +inf

    Index num_variables() const noexcept { return objective.size(); }
    Index num_constraints() const noexcept { return constraints.rows(); }
};

void validate(const LinearProgram& lp);

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class LpMethod { Auto, Simplex, InteriorPoint };

std::string to_string(LpStatus status);

struct LpOptions {
    LpMethod method = LpMethod::Auto;
    /// Simplex pivots per phase before falling back (Auto) or failing.
    /// Zero picks a size-based default.
    Index max_pivots = 0;
    Index max_ipm_iterations = 200;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    Scalar value = std::numeric_limits<Scalar>::quiet_NaN();
    /// Multipliers mu >= 0 of the rows A x <= b; c + A^T mu - (bound terms) = 0.
    Vector duals;
    Index iterations = 0;
    LpMethod method_used = LpMethod::Simplex;
};

/// Dense two-phase tableau simplex with Bland's rule. With LpMethod::Auto a
/// primal-dual interior-point method takes over when the pivot budget runs
/// out. Throws NumericalFailure when no method reaches an answer.
LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace sparselab
