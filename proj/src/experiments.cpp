#include "sparselab/experiments.hpp"

#include "sparselab/cv.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

namespace sparselab {

namespace {

Scalar predictor(const RateCell& cell)
{
    return std::sqrt(static_cast<Scalar>(cell.s) / static_cast<Scalar>(cell.n) *
                     std::log(static_cast<Scalar>(cell.p)));
}

Scalar cell_lambda(const ExperimentConfig& config, const RateCell& cell, FitMethod method)
{
    const Scalar base = config.lambda_scale * default_lambda(cell.n, cell.p, cell.sigma);
    switch (method) {
    case FitMethod::Lasso:
        return 2.0 * base;
    case FitMethod::Chebyshev:
        return 0.0;
    default:
        return base;
    }
}

FitResult run_fit(FitMethod method, const RegressionProblem& problem, Scalar lambda)
{
    if (method == FitMethod::Chebyshev) {
        return chebyshev_fit(problem);
    }
    return fit_with(method, problem, lambda);
}

// Runs body(i) for i in [0, count) on the configured worker threads. Each
// index writes only its own output slot, so the result does not depend on
// scheduling.
template <typename Body>
void parallel_for(std::size_t count, Body body)
{
    const unsigned threads = std::min<std::size_t>(worker_threads(), std::max<std::size_t>(count, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                body(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

}  // namespace

unsigned worker_threads()
{
    if (const char* env = std::getenv("SPARSELAB_THREADS")) {
        unsigned value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc() && ptr == end && value > 0) {
            return value;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Scalar median(std::vector<Scalar> values)
{
    if (values.empty()) {
        throw InvalidArgument("median of an empty list");
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::optional<std::pair<Scalar, Scalar>> ols_line(const std::vector<Scalar>& x, const std::vector<Scalar>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        return std::nullopt;
    }
    const auto m = static_cast<Scalar>(x.size());
    const Scalar mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const Scalar my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    Scalar sxx = 0.0;
    Scalar sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        return std::nullopt;
    }
    const Scalar slope = sxy / sxx;
    return std::make_pair(slope, my - slope * mx);
}

void validate(const ExperimentConfig& config)
{
    if (config.cells.empty()) {
        throw InvalidArgument("experiment needs at least one cell");
    }
    if (config.replications < 1) {
        throw InvalidArgument("replications must be >= 1");
    }
    if (config.estimators.empty()) {
        throw InvalidArgument("experiment needs at least one estimator");
    }
    if (!(config.lambda_scale >= 0.0)) {
        throw InvalidArgument("lambda_scale must be nonnegative");
    }
    for (const RateCell& cell : config.cells) {
        SyntheticSpec spec;
        spec.n = cell.n;
        spec.p = cell.p;
        spec.s = cell.s;
        spec.sigma = cell.sigma;
        spec.design = cell.design;
        spec.correlation = cell.correlation;
        validate(spec);
        if (cell.s < 1) {
            throw InvalidArgument("rate study cells need s >= 1");
        }
        if (cell.p < 2) {
            throw InvalidArgument("rate study cells need p >= 2 (log p > 0)");
        }
    }
}

std::vector<RateCell> doubling_cells(Index n0, Index count, Index p_factor, Index s, Scalar sigma, DesignKind design)
{
    std::vector<RateCell> cells;
    Index n = n0;
    for (Index i = 0; i < count; ++i, n *= 2) {
        RateCell cell;
        cell.n = n;
        cell.p = p_factor * n;
        cell.s = s;
        cell.sigma = sigma;
        cell.design = design;
        cells.push_back(cell);
    }
    return cells;
}

RateStudyResult run_rate_study(const ExperimentConfig& config)
{
    validate(config);
    const auto cells = static_cast<Index>(config.cells.size());
    const Index reps = config.replications;
    const auto methods = static_cast<Index>(config.estimators.size());

    RateStudyResult result;
    result.config = config;
    result.records.resize(static_cast<std::size_t>(cells * reps * methods));

    parallel_for(static_cast<std::size_t>(cells * reps), [&](std::size_t job) {
        const Index c = static_cast<Index>(job) / reps;
        const Index r = static_cast<Index>(job) % reps;
        const RateCell& cell = config.cells[static_cast<std::size_t>(c)];
        SyntheticSpec spec;
        spec.n = cell.n;
        spec.p = cell.p;
        spec.s = cell.s;
        spec.sigma = cell.sigma;
        spec.design = cell.design;
        spec.correlation = cell.correlation;
        spec.seed = config.seed + static_cast<std::uint64_t>(r);

        std::optional<SimulatedData> data;
        std::string sim_failure;
        try {
            data = simulate(spec);
        } catch (const std::exception& e) {
            sim_failure = std::string("simulate: ") + e.what();
        }
        for (Index e = 0; e < methods; ++e) {
            const FitMethod method = config.estimators[static_cast<std::size_t>(e)];
            RateRecord& rec = result.records[static_cast<std::size_t>((c * reps + r) * methods + e)];
            rec.cell = c;
            rec.replication = r;
            rec.method = method;
            rec.seed = spec.seed;
            rec.lambda = cell_lambda(config, cell, method);
            if (!data) {
                rec.failure = sim_failure;
                continue;
            }
            try {
                const FitResult fit = run_fit(method, data->problem, rec.lambda);
                rec.error = (fit.coefficients.values() - data->beta0.values()).norm();
                rec.converged = fit.converged;
            } catch (const std::exception& ex) {
                rec.failure = ex.what();
            }
        }
    });

    for (Index e = 0; e < methods; ++e) {
        const FitMethod method = config.estimators[static_cast<std::size_t>(e)];
        std::vector<Scalar> log_x;
        std::vector<Scalar> log_y;
        for (Index c = 0; c < cells; ++c) {
            RateCellSummary summary;
            summary.cell = c;
            summary.method = method;
            summary.spec = config.cells[static_cast<std::size_t>(c)];
            summary.predictor = predictor(summary.spec);
            summary.lambda = cell_lambda(config, summary.spec, method);
            std::vector<Scalar> errors;
            for (Index r = 0; r < reps; ++r) {
                const RateRecord& rec = result.records[static_cast<std::size_t>((c * reps + r) * methods + e)];
                if (rec.error) {
                    errors.push_back(*rec.error);
                } else {
                    ++summary.failures;
                }
            }
            summary.completed = static_cast<Index>(errors.size());
            if (!errors.empty()) {
                summary.mean_error = std::accumulate(errors.begin(), errors.end(), 0.0) /
                                     static_cast<Scalar>(errors.size());
                summary.median_error = median(errors);
                if (*summary.mean_error > 0.0 && summary.predictor > 0.0) {
                    log_x.push_back(std::log(summary.predictor));
                    log_y.push_back(std::log(*summary.mean_error));
                }
            }
            result.summaries.push_back(summary);
        }
        RateSlope slope;
        slope.method = method;
        slope.cells_used = static_cast<Index>(log_x.size());
        if (const auto line = ols_line(log_x, log_y)) {
            slope.slope = line->first;
            slope.intercept = line->second;
        }
        result.slopes.push_back(slope);
    }
    // summaries were built estimator-major; present them cell-major
    std::stable_sort(result.summaries.begin(), result.summaries.end(),
                     [](const RateCellSummary& a, const RateCellSummary& b) { return a.cell < b.cell; });
    return result;
}

void validate(const ComparisonConfig& config)
{
    if (config.n < 2 || config.dictionary_size < 1 || config.test_size < 1) {
        throw InvalidArgument("comparison: n >= 2, dictionary size >= 1 and test size >= 1 required");
    }
    if (config.terms < 1 || config.terms > config.dictionary_size) {
        throw InvalidArgument("comparison: need 1 <= terms <= dictionary size");
    }
    if (config.replications < 1) {
        throw InvalidArgument("comparison: replications must be >= 1");
    }
    if (!(config.sigma >= 0.0) || !(config.spike_probability >= 0.0 && config.spike_probability <= 1.0) ||
        !(config.spike_scale >= 0.0) || !(config.outlier >= 0.0)) {
        throw InvalidArgument("comparison: sigma, spike and outlier settings must be nonnegative");
    }
    if (config.lambda && !(*config.lambda >= 0.0)) {
        throw InvalidArgument("comparison: lambda must be nonnegative");
    }
}

Matrix cosine_dictionary(const Vector& x, Index size)
{
    const Scalar pi = std::acos(-1.0);
    Matrix d(x.size(), size);
    for (Index j = 0; j < size; ++j) {
        d.col(j) = (pi * static_cast<Scalar>(j) * x.array()).cos().matrix();
    }
    return d;
}

namespace {

struct DictionaryDraw {
    Vector x;
    Vector f;
    Vector y;
    Index spikes = 0;
};

DictionaryDraw draw_points(const ComparisonConfig& config, const Vector& coef, Index count, std::mt19937_64& rng)
{
    std::uniform_real_distribution<Scalar> unif(0.0, 1.0);
    std::normal_distribution<Scalar> normal(0.0, 1.0);
    std::bernoulli_distribution spike(config.spike_probability);
    std::bernoulli_distribution coin(0.5);
    DictionaryDraw draw;
    draw.x.resize(count);
    for (Index i = 0; i < count; ++i) {
        draw.x(i) = unif(rng);
    }
    draw.f = cosine_dictionary(draw.x, config.dictionary_size) * coef;
    draw.y = draw.f;
    for (Index i = 0; i < count; ++i) {
        Scalar e = config.sigma * normal(rng);
        if (spike(rng)) {
            e += (coin(rng) ? 1.0 : -1.0) * config.spike_scale * config.sigma;
            ++draw.spikes;
        }
        draw.y(i) += e;
    }
    return draw;
}

struct RawFits {
    Vector dantzig;
    Vector chebyshev;
};

RawFits fit_both(const Matrix& raw, const Vector& y, Scalar lambda)
{
    const RegressionProblem problem = normalize_columns(RegressionProblem(raw, y));
    RawFits out;
    out.dantzig = problem.to_original_scale(dantzig_fit(problem, lambda).coefficients.values());
    out.chebyshev = problem.to_original_scale(chebyshev_fit(problem).coefficients.values());
    return out;
}

}  // namespace

ComparisonTable run_objective_comparison(const ComparisonConfig& config)
{
    validate(config);
    ComparisonTable table;
    table.config = config;
    table.lambda = config.lambda ? *config.lambda : default_lambda(config.n, config.dictionary_size, config.sigma);
    table.records.resize(static_cast<std::size_t>(config.replications));

    parallel_for(table.records.size(), [&](std::size_t r) {
        ComparisonRecord& rec = table.records[r];
        rec.replication = static_cast<Index>(r);
        rec.seed = config.seed + r;
        std::mt19937_64 rng(rec.seed);
        try {
            // f: `terms` random dictionary elements with +-1 coefficients
            std::vector<Index> order(static_cast<std::size_t>(config.dictionary_size));
            std::iota(order.begin(), order.end(), Index{0});
            std::shuffle(order.begin(), order.end(), rng);
            std::bernoulli_distribution coin(0.5);
            Vector coef = Vector::Zero(config.dictionary_size);
            for (Index t = 0; t < config.terms; ++t) {
                coef(order[static_cast<std::size_t>(t)]) = coin(rng) ? 1.0 : -1.0;
            }
            const DictionaryDraw train = draw_points(config, coef, config.n, rng);
            const DictionaryDraw test = draw_points(config, coef, config.test_size, rng);
            rec.spikes = train.spikes;

            const Matrix raw = cosine_dictionary(train.x, config.dictionary_size);
            const RawFits fits = fit_both(raw, train.y, table.lambda);
            const Matrix raw_test = cosine_dictionary(test.x, config.dictionary_size);
            const auto m = static_cast<Scalar>(config.test_size);
            const Vector pd = raw_test * fits.dantzig;
            const Vector pc = raw_test * fits.chebyshev;
            rec.dantzig_mse = (test.y - pd).squaredNorm() / m;
            rec.chebyshev_mse = (test.y - pc).squaredNorm() / m;
            rec.dantzig_f_mse = (test.f - pd).squaredNorm() / m;
            rec.chebyshev_f_mse = (test.f - pc).squaredNorm() / m;
            rec.dantzig_coef_error = (fits.dantzig - coef).norm();
            rec.chebyshev_coef_error = (fits.chebyshev - coef).norm();
            rec.dantzig_wins = rec.dantzig_mse <= rec.chebyshev_mse;

            if (config.outlier > 0.0) {
                std::uniform_real_distribution<Scalar> unif(0.0, 1.0);
                Vector x_out(train.x.size() + 1);
                x_out << train.x, unif(rng);
                Vector y_out(train.y.size() + 1);
                const Vector f_last = cosine_dictionary(x_out.tail(1), config.dictionary_size) * coef;
                y_out << train.y, f_last(0) + config.outlier;
                const RawFits again = fit_both(cosine_dictionary(x_out, config.dictionary_size), y_out, table.lambda);
                const auto ratio = [](Scalar after, Scalar before) {
                    return before > 0.0 ? after / before : std::numeric_limits<Scalar>::infinity();
                };
                rec.dantzig_outlier_ratio = ratio((again.dantzig - coef).norm(), rec.dantzig_coef_error);
                rec.chebyshev_outlier_ratio = ratio((again.chebyshev - coef).norm(), rec.chebyshev_coef_error);
            }
        } catch (const std::exception& e) {
            rec.failure = e.what();
        }
    });

    std::vector<Scalar> dm;
    std::vector<Scalar> cm;
    for (const ComparisonRecord& rec : table.records) {
        if (!rec.failure.empty()) {
            continue;
        }
        ++table.completed;
        table.dantzig_wins += rec.dantzig_wins ? 1 : 0;
        dm.push_back(rec.dantzig_mse);
        cm.push_back(rec.chebyshev_mse);
    }
    if (table.completed > 0) {
        const auto k = static_cast<Scalar>(table.completed);
        table.dantzig_win_rate = static_cast<Scalar>(table.dantzig_wins) / k;
        table.mean_dantzig_mse = std::accumulate(dm.begin(), dm.end(), 0.0) / k;
        table.mean_chebyshev_mse = std::accumulate(cm.begin(), cm.end(), 0.0) / k;
        table.median_dantzig_mse = median(dm);
        table.median_chebyshev_mse = median(cm);
    }
    return table;
}

}  // namespace sparselab
