#include "sparselab/lp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <optional>

namespace sparselab {

std::string to_string(LpStatus status)
{
    switch (status) {
    case LpStatus::Optimal:
        return "optimal";
    case LpStatus::Infeasible:
        return "infeasible";
    case LpStatus::Unbounded:
        return "unbounded";
    }
    return "unknown";
}

void validate(const LinearProgram& lp)
{
    const Index nv = lp.num_variables();
    if (lp.constraints.cols() != nv && lp.constraints.rows() > 0) {
        throw InvalidArgument("lp: constraint matrix has " + std::to_string(lp.constraints.cols()) +
                              " columns, expected " + std::to_string(nv));
    }
    if (lp.rhs.size() != lp.constraints.rows()) {
        throw InvalidArgument("lp: rhs length does not match constraint rows");
    }
    if ((lp.lower.size() != 0 && lp.lower.size() != nv) || (lp.upper.size() != 0 && lp.upper.size() != nv)) {
        throw InvalidArgument("lp: bound vectors have the wrong length");
    }
    if (!lp.objective.allFinite() || !lp.constraints.allFinite() || !lp.rhs.allFinite()) {
        throw InvalidArgument("lp: objective, constraints and rhs must be finite");
    }
    for (Index j = 0; j < nv; ++j) {
        const Scalar lo = lp.lower.size() ? lp.lower(j) : 0.0;
        const Scalar hi = lp.upper.size() ? lp.upper(j) : std::numeric_limits<Scalar>::infinity();
        if (std::isnan(lo) || std::isnan(hi) || lo == std::numeric_limits<Scalar>::infinity() ||
            hi == -std::numeric_limits<Scalar>::infinity() || lo > hi) {
            throw InvalidArgument("lp: invalid bounds on variable " + std::to_string(j));
        }
    }
}

namespace {

constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

// min c^T y  s.t.  A y <= b,  y >= 0, rows scaled to unit max-abs entry.
// x = offset + sum over columns of map_coef * y.
struct StandardForm {
    Matrix a;
    Vector b;
    Vector c;
    Vector offset;
    std::vector<std::vector<std::pair<Index, Scalar>>> map;  // per original variable
    std::vector<Index> origin_row;  // row of the original A, or -1 for bound rows
    std::vector<Index> twin;        // the negated partner column of a split free variable, or -1
    Vector row_scale;
    bool trivially_infeasible = false;
};

StandardForm to_standard_form(const LinearProgram& lp)
{
    const Index nv = lp.num_variables();
    const Index m0 = lp.num_constraints();
    StandardForm sf;
    sf.offset = Vector::Zero(nv);
    std::vector<std::pair<Index, Index>> splits;
    sf.map.resize(static_cast<std::size_t>(nv));

    Index k = 0;
    std::vector<std::pair<Index, Scalar>> bound_rows;  // (column, upper - lower)
    for (Index j = 0; j < nv; ++j) {
        const Scalar lo = lp.lower.size() ? lp.lower(j) : 0.0;
        const Scalar hi = lp.upper.size() ? lp.upper(j) : kInf;
        auto& entry = sf.map[static_cast<std::size_t>(j)];
        if (std::isfinite(lo)) {
            sf.offset(j) = lo;
            entry.emplace_back(k, 1.0);
            if (std::isfinite(hi)) {
                bound_rows.emplace_back(k, hi - lo);
            }
            ++k;
        } else if (std::isfinite(hi)) {
            sf.offset(j) = hi;
            entry.emplace_back(k++, -1.0);
        } else {
            splits.emplace_back(k, k + 1);
            entry.emplace_back(k++, 1.0);
            entry.emplace_back(k++, -1.0);
        }
    }

    const Index m = m0 + static_cast<Index>(bound_rows.size());
    Matrix a = Matrix::Zero(m, k);
    Vector b(m);
    Vector c = Vector::Zero(k);
    for (Index j = 0; j < nv; ++j) {
        for (const auto& [col, coef] : sf.map[static_cast<std::size_t>(j)]) {
            if (m0 > 0) {
                a.block(0, col, m0, 1) = lp.constraints.col(j) * coef;
            }
            c(col) = lp.objective(j) * coef;
        }
    }
    if (m0 > 0) {
        b.head(m0) = lp.rhs - lp.constraints * sf.offset;
    }
    for (std::size_t r = 0; r < bound_rows.size(); ++r) {
        const Index row = m0 + static_cast<Index>(r);
        a(row, bound_rows[r].first) = 1.0;
        b(row) = bound_rows[r].second;
    }

    // Drop all-zero rows (checking 0 <= b) and scale the rest.
    std::vector<Index> keep;
    std::vector<Scalar> scales;
    for (Index i = 0; i < m; ++i) {
        const Scalar s = a.row(i).cwiseAbs().maxCoeff();
        if (s == 0.0) {
            if (b(i) < -1e-12 * std::max<Scalar>(1.0, std::abs(b(i)))) {
                sf.trivially_infeasible = true;
            }
            continue;
        }
        keep.push_back(i);
        scales.push_back(s);
    }
    sf.a.resize(static_cast<Index>(keep.size()), k);
    sf.b.resize(static_cast<Index>(keep.size()));
    sf.row_scale.resize(static_cast<Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const Index i = keep[r];
        sf.a.row(static_cast<Index>(r)) = a.row(i) / scales[r];
        sf.b(static_cast<Index>(r)) = b(i) / scales[r];
        sf.row_scale(static_cast<Index>(r)) = scales[r];
        sf.origin_row.push_back(i < m0 ? i : -1);
    }
    sf.c = std::move(c);
    sf.twin.assign(static_cast<std::size_t>(k), -1);
    for (const auto& [plus, minus] : splits) {
        sf.twin[static_cast<std::size_t>(plus)] = minus;
        sf.twin[static_cast<std::size_t>(minus)] = plus;
    }
    return sf;
}

Vector recover_x(const StandardForm& sf, const Vector& y)
{
    Vector x = sf.offset;
    for (std::size_t j = 0; j < sf.map.size(); ++j) {
        for (const auto& [col, coef] : sf.map[j]) {
            x(static_cast<Index>(j)) += coef * y(col);
        }
    }
    return x;
}

Vector recover_duals(const StandardForm& sf, const Vector& scaled_duals, Index m0)
{
    Vector mu = Vector::Zero(m0);
    for (Index r = 0; r < scaled_duals.size(); ++r) {
        const Index i = sf.origin_row[static_cast<std::size_t>(r)];
        if (i >= 0) {
            mu(i) = std::max<Scalar>(0.0, scaled_duals(r)) / sf.row_scale(r);
        }
    }
    return mu;
}

struct SimplexOutcome {
    enum class Kind { Optimal, Infeasible, Unbounded, BudgetExhausted, Singular } kind;
    Vector y;
    Vector duals;  // per scaled row
    Index pivots = 0;
};

class Tableau {
public:
    Tableau(const StandardForm& sf, Index budget) : k_(sf.a.cols()), m_(sf.a.rows()), budget_(budget)
    {
        Index n_art = 0;
        for (Index i = 0; i < m_; ++i) {
            if (sf.b(i) < 0.0) {
                ++n_art;
            }
        }
        cols_ = k_ + m_ + n_art;
        t_ = Matrix::Zero(m_, cols_ + 1);
        basis_.resize(static_cast<std::size_t>(m_));
        Index art = k_ + m_;
        for (Index i = 0; i < m_; ++i) {
            const Scalar sign = sf.b(i) < 0.0 ? -1.0 : 1.0;
            t_.block(i, 0, 1, k_) = sign * sf.a.row(i);
            t_(i, k_ + i) = sign;
            t_(i, cols_) = sign * sf.b(i);
            if (sign < 0.0) {
                t_(i, art) = 1.0;
                basis_[static_cast<std::size_t>(i)] = art++;
            } else {
                basis_[static_cast<std::size_t>(i)] = k_ + i;
            }
        }
        original_ = t_;
        twin_ = sf.twin;
        basic_.assign(static_cast<std::size_t>(cols_), false);
        for (Index b : basis_) {
            basic_[static_cast<std::size_t>(b)] = true;
        }
        cost_ = Vector::Zero(cols_);
        cost_.head(k_) = sf.c;
        cost_tol_ = 1e-9 * std::max<Scalar>(1.0, sf.c.size() ? sf.c.cwiseAbs().maxCoeff() : 0.0);
    }

    SimplexOutcome run()
    {
        // Phase 1: minimize the sum of artificials.
        Vector phase1 = Vector::Zero(cols_);
        phase1.tail(cols_ - k_ - m_).setOnes();
        set_objective(phase1);
        eligible_ = cols_;
        const auto p1 = iterate(1e-9);
        if (p1 == Step::Budget) {
            return {SimplexOutcome::Kind::BudgetExhausted, {}, {}, pivots_};
        }
        if (p1 == Step::Singular) {
            return {SimplexOutcome::Kind::Singular, {}, {}, pivots_};
        }
        const Scalar infeasibility = -obj_(cols_);
        const Scalar rhs_scale = std::max<Scalar>(1.0, t_.col(cols_).cwiseAbs().maxCoeff());
        if (infeasibility > 1e-8 * rhs_scale) {
            return {SimplexOutcome::Kind::Infeasible, {}, {}, pivots_};
        }
        drive_out_artificials();

        // Phase 2 over structural and slack columns only.
        set_objective(cost_);
        eligible_ = k_ + m_;
        const auto p2 = iterate(cost_tol_);
        if (p2 == Step::Budget) {
            return {SimplexOutcome::Kind::BudgetExhausted, {}, {}, pivots_};
        }
        if (p2 == Step::Singular) {
            return {SimplexOutcome::Kind::Singular, {}, {}, pivots_};
        }
        if (p2 == Step::Unbounded) {
            return {SimplexOutcome::Kind::Unbounded, {}, {}, pivots_};
        }
        SimplexOutcome out{SimplexOutcome::Kind::Optimal, Vector::Zero(k_), obj_.segment(k_, m_), pivots_};
        for (Index i = 0; i < m_; ++i) {
            const Index b = basis_[static_cast<std::size_t>(i)];
            if (b < k_) {
                out.y(b) = std::max<Scalar>(0.0, t_(i, cols_));
            }
        }
        return out;
    }

private:
    enum class Step { Optimal, Unbounded, Budget, Singular };

    // Rebuilds the tableau from the original rows for the current basis; the
    // product-form updates drift badly over a few thousand pivots otherwise.
    bool reinvert()
    {
        Matrix basis(m_, m_);
        for (Index i = 0; i < m_; ++i) {
            basis.col(i) = original_.col(basis_[static_cast<std::size_t>(i)]);
        }
        const Eigen::FullPivLU<Matrix> lu(basis);
        if (lu.rank() < m_) {
            return false;
        }
        t_ = lu.solve(original_);
        const Vector cost = obj_cost_;
        set_objective(cost);
        since_reinvert_ = 0;
        return true;
    }

    void set_objective(const Vector& cost)
    {
        obj_cost_ = cost;
        obj_ = Vector::Zero(cols_ + 1);
        obj_.head(cols_) = cost;
        for (Index i = 0; i < m_; ++i) {
            const Scalar cb = cost(basis_[static_cast<std::size_t>(i)]);
            if (cb != 0.0) {
                obj_ -= cb * t_.row(i).transpose();
            }
        }
    }

    void pivot(Index r, Index q)
    {
        const Scalar piv = t_(r, q);
        Eigen::RowVectorXd prow = t_.row(r) / piv;
        Vector col = t_.col(q);
        col(r) = 0.0;
        t_.noalias() -= col * prow;
        t_.row(r) = prow;
        const Scalar reduced = obj_(q);
        obj_ -= reduced * prow.transpose();
        obj_(q) = 0.0;
        basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = false;
        basic_[static_cast<std::size_t>(q)] = true;
        basis_[static_cast<std::size_t>(r)] = q;
        ++pivots_;
        ++since_reinvert_;
    }

    Step iterate(Scalar tol)
    {
        constexpr Scalar kPivotTol = 1e-9;
        const Index interval = std::max<Index>(50, m_);
        bool fresh = false;
        for (;;) {
            if (since_reinvert_ >= interval) {
                if (!reinvert()) {
                    return Step::Singular;
                }
            }
            // Dantzig pricing (most negative reduced cost); after a run of
            // degenerate pivots fall back to Bland's lowest index until progress.
            const bool bland = degenerate_run_ >= kDegenerateLimit;
            Index q = -1;
            Scalar most = -tol;
            for (Index j = 0; j < eligible_; ++j) {
                // the two halves of a split free variable are never basic together;
                // an apparent improvement there is rounding drift
                if (j < k_ && twin_[static_cast<std::size_t>(j)] >= 0 &&
                    basic_[static_cast<std::size_t>(twin_[static_cast<std::size_t>(j)])]) {
                    continue;
                }
                if (obj_(j) < most) {
                    q = j;
                    if (bland) {
                        break;
                    }
                    most = obj_(j);
                }
            }
            if (q < 0) {
                // confirm on a freshly factored tableau before stopping
                if (fresh || since_reinvert_ == 0) {
                    return Step::Optimal;
                }
                if (!reinvert()) {
                    return Step::Singular;
                }
                fresh = true;
                continue;
            }
            fresh = false;
            Index r = -1;
            Scalar best = kInf;
            for (Index i = 0; i < m_; ++i) {
                const Scalar a = t_(i, q);
                if (a <= kPivotTol) {
                    continue;
                }
                const Scalar ratio = std::max<Scalar>(0.0, t_(i, cols_)) / a;
                const bool tie = r >= 0 && std::abs(ratio - best) <= 1e-12 * std::max<Scalar>(1.0, best);
                if (ratio < best && !tie) {
                    best = ratio;
                    r = i;
                } else if (tie && (bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)]
                                         : a > t_(r, q))) {
                    r = i;
                }
            }
            if (r < 0) {
                return Step::Unbounded;
            }
            if (pivots_ >= budget_) {
                return Step::Budget;
            }
            degenerate_run_ = best <= 1e-12 ? degenerate_run_ + 1 : 0;
            pivot(r, q);
        }
    }

    void drive_out_artificials()
    {
        for (Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < k_ + m_) {
                continue;
            }
            Index best = -1;
            Scalar best_abs = 1e-7;
            for (Index j = 0; j < k_ + m_; ++j) {
                if (std::abs(t_(i, j)) > best_abs) {
                    best_abs = std::abs(t_(i, j));
                    best = j;
                }
            }
            // A row with no usable entry is redundant; its artificial stays at zero.
            if (best >= 0) {
                pivot(i, best);
            }
        }
    }

    Index k_;
    Index m_;
    Index cols_ = 0;
    Index eligible_ = 0;
    Index budget_;
    Index pivots_ = 0;
    Matrix t_;
    Matrix original_;
    std::vector<Index> twin_;
    std::vector<bool> basic_;
    Vector obj_;
    Vector obj_cost_;
    Index since_reinvert_ = 0;
    Index degenerate_run_ = 0;
    static constexpr Index kDegenerateLimit = 50;
    Vector cost_;
    Scalar cost_tol_ = 1e-9;
    std::vector<Index> basis_;
};

struct IpmOutcome {
    bool converged = false;
    Vector y;
    Vector duals;
    Index iterations = 0;
};

// Mehrotra predictor-corrector on  min c^T v, [A I] v = b, v >= 0.
IpmOutcome interior_point(const StandardForm& sf, Index max_iterations)
{
    const Index m = sf.a.rows();
    const Index k = sf.a.cols();
    const Index nv = k + m;
    Matrix a(m, nv);
    a << sf.a, Matrix::Identity(m, m);
    Vector c = Vector::Zero(nv);
    c.head(k) = sf.c;
    const Vector& b = sf.b;

    IpmOutcome out;
    if (m == 0) {
        // Only sign constraints: bounded iff c >= 0.
        out.converged = (sf.c.array() >= 0.0).all();
        out.y = Vector::Zero(k);
        out.duals = Vector();
        return out;
    }

    const Matrix aat = a * a.transpose();
    Eigen::LDLT<Matrix> aat_ldlt(aat);
    Vector x = a.transpose() * aat_ldlt.solve(b);
    Vector lam = aat_ldlt.solve(a * c);
    Vector z = c - a.transpose() * lam;
    const Scalar dx = std::max<Scalar>(-1.5 * x.minCoeff(), 0.0);
    const Scalar dz = std::max<Scalar>(-1.5 * z.minCoeff(), 0.0);
    x.array() += dx;
    z.array() += dz;
    const Scalar xz = x.dot(z);
    x.array() += 0.5 * xz / std::max<Scalar>(z.sum(), 1e-12);
    z.array() += 0.5 * xz / std::max<Scalar>(x.sum(), 1e-12);
    x = x.cwiseMax(1e-8);
    z = z.cwiseMax(1e-8);

    const Scalar b_scale = 1.0 + b.cwiseAbs().maxCoeff();
    const Scalar c_scale = 1.0 + c.cwiseAbs().maxCoeff();

    auto max_step = [](const Vector& v, const Vector& dv) {
        Scalar alpha = 1.0;
        for (Index i = 0; i < v.size(); ++i) {
            if (dv(i) < 0.0) {
                alpha = std::min(alpha, -v(i) / dv(i));
            }
        }
        return alpha;
    };

    for (Index it = 0; it < max_iterations; ++it) {
        out.iterations = it + 1;
        const Vector rp = b - a * x;
        const Vector rd = c - a.transpose() * lam - z;
        const Scalar mu = x.dot(z) / static_cast<Scalar>(nv);
        const Scalar primal_obj = c.dot(x);
        const Scalar rp_norm = rp.cwiseAbs().maxCoeff();
        const Scalar rd_norm = rd.cwiseAbs().maxCoeff();
        const Scalar gap = mu * static_cast<Scalar>(nv);
        if (rp_norm <= 1e-10 * b_scale && rd_norm <= 1e-10 * c_scale && gap <= 1e-10 * (1.0 + std::abs(primal_obj))) {
            out.converged = true;
            break;
        }
        // Near a degenerate vertex the normal equations lose a few digits and rp
        // stalls slightly above the target while the gap keeps shrinking.
        if (rp_norm <= 1e-8 * b_scale && rd_norm <= 1e-10 * c_scale && gap <= 1e-14 * (1.0 + std::abs(primal_obj))) {
            out.converged = true;
            break;
        }
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12 || lam.cwiseAbs().maxCoeff() > 1e12) {
            return out;
        }
        const Vector d = x.cwiseQuotient(z);
        const Matrix normal = a * d.asDiagonal() * a.transpose();
        Matrix regularized = normal;
        regularized.diagonal().array() += 1e-14 * (1.0 + normal.diagonal().cwiseAbs().maxCoeff());
        Eigen::LDLT<Matrix> ldlt(regularized);

        auto solve = [&](const Vector& rc, Vector& dxv, Vector& dlv, Vector& dzv) {
            const Vector tmp = (rc - x.cwiseProduct(rd)).cwiseQuotient(z);
            const Vector rhs = rp - a * tmp;
            dlv = ldlt.solve(rhs);
            for (int refine = 0; refine < 2; ++refine) {
                dlv += ldlt.solve(rhs - normal * dlv);
            }
            dzv = rd - a.transpose() * dlv;
            dxv = (rc - x.cwiseProduct(dzv)).cwiseQuotient(z);
        };

        Vector dx_a, dl_a, dz_a;
        solve(-x.cwiseProduct(z), dx_a, dl_a, dz_a);
        const Scalar ap = max_step(x, dx_a);
        const Scalar ad = max_step(z, dz_a);
        const Scalar mu_aff = (x + ap * dx_a).dot(z + ad * dz_a) / static_cast<Scalar>(nv);
        const Scalar sigma = std::pow(mu_aff / mu, 3);

        Vector dxv, dlv, dzv;
        const Vector rc = -x.cwiseProduct(z) - dx_a.cwiseProduct(dz_a) + Vector::Constant(nv, sigma * mu);
        solve(rc, dxv, dlv, dzv);
        const Scalar step_p = std::min<Scalar>(1.0, 0.995 * max_step(x, dxv));
        const Scalar step_d = std::min<Scalar>(1.0, 0.995 * max_step(z, dzv));
        x += step_p * dxv;
        lam += step_d * dlv;
        z += step_d * dzv;
        // Both halves of a split free variable can grow without bound while
        // their difference settles; moving them down together changes neither
        // A x nor the objective and keeps the normal equations conditioned.
        for (std::size_t j = 0; j < sf.twin.size(); ++j) {
            const auto t = static_cast<std::size_t>(sf.twin[j]);
            if (sf.twin[j] > static_cast<Index>(j)) {
                const auto i = static_cast<Index>(j);
                const auto o = static_cast<Index>(t);
                const Scalar low = std::min(x(i), x(o));
                const Scalar target = 1.0 + std::abs(x(i) - x(o));
                if (low > 10.0 * target) {
                    x(i) -= low - target;
                    x(o) -= low - target;
                }
            }
        }
    }
    out.y = x.head(k).cwiseMax(0.0);
    out.duals = -lam;
    return out;
}

// Primal check of a solution against the caller's LP, relative to the data scale.
bool feasible(const LinearProgram& lp, const Vector& x)
{
    const Scalar scale = 1.0 + x.cwiseAbs().maxCoeff();
    for (Index i = 0; i < lp.num_constraints(); ++i) {
        const Scalar row = lp.constraints.row(i).cwiseAbs().maxCoeff();
        if (lp.constraints.row(i).dot(x) - lp.rhs(i) > 1e-7 * (1.0 + row * scale + std::abs(lp.rhs(i)))) {
            return false;
        }
    }
    for (Index j = 0; j < x.size(); ++j) {
        const Scalar lo = lp.lower.size() ? lp.lower(j) : 0.0;
        const Scalar hi = lp.upper.size() ? lp.upper(j) : kInf;
        if (x(j) < lo - 1e-7 * (1.0 + std::abs(lo)) || x(j) > hi + 1e-7 * (1.0 + std::abs(hi))) {
            return false;
        }
    }
    return true;
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options)
{
    validate(lp);
    const StandardForm sf = to_standard_form(lp);
    LpSolution sol;
    if (sf.trivially_infeasible) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }

    auto finish = [&](const Vector& y, const Vector& scaled_duals) {
        sol.status = LpStatus::Optimal;
        sol.x = recover_x(sf, y);
        sol.value = lp.objective.dot(sol.x);
        sol.duals = recover_duals(sf, scaled_duals, lp.num_constraints());
    };

    if (options.method != LpMethod::InteriorPoint) {
        const Index budget = options.max_pivots > 0 ? options.max_pivots
                                                    : 50 * (sf.a.rows() + sf.a.cols()) + 1000;
        Tableau tableau(sf, budget);
        const SimplexOutcome res = tableau.run();
        sol.iterations = res.pivots;
        sol.method_used = LpMethod::Simplex;
        switch (res.kind) {
        case SimplexOutcome::Kind::Optimal:
            finish(res.y, res.duals);
            if (feasible(lp, sol.x)) {
                return sol;
            }
            if (options.method == LpMethod::Simplex) {
                throw NumericalFailure("simplex solution violates the constraints");
            }
            sol = LpSolution{};
            sol.iterations = res.pivots;
            break;
        case SimplexOutcome::Kind::Infeasible:
            sol.status = LpStatus::Infeasible;
            return sol;
        case SimplexOutcome::Kind::Unbounded:
            sol.status = LpStatus::Unbounded;
            return sol;
        case SimplexOutcome::Kind::BudgetExhausted:
            if (options.method == LpMethod::Simplex) {
                throw NumericalFailure("simplex pivot budget exhausted");
            }
            break;
        case SimplexOutcome::Kind::Singular:
            if (options.method == LpMethod::Simplex) {
                throw NumericalFailure("simplex basis became singular");
            }
            break;
        }
    }

    const IpmOutcome ipm = interior_point(sf, options.max_ipm_iterations);
    sol.iterations += ipm.iterations;
    sol.method_used = LpMethod::InteriorPoint;
    if (!ipm.converged) {
        throw NumericalFailure("interior-point method did not converge");
    }
    finish(ipm.y, ipm.duals);
    return sol;
}

}  // namespace sparselab
