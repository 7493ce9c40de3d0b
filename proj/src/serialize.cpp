#include "sparselab/serialize.hpp"

#include <cmath>
#include <set>

namespace sparselab {

Json number(Scalar value)
{
    if (!std::isfinite(value)) {
        return nullptr;
    }
    return value;
}

Json to_json(const Vector& values)
{
    Json arr = Json::array();
    for (Index i = 0; i < values.size(); ++i) {
        arr.push_back(number(values(i)));
    }
    return arr;
}

Json to_json(const IndexSet& indices)
{
    Json arr = Json::array();
    for (Index i : indices) {
        arr.push_back(i);
    }
    return arr;
}

namespace {

template <typename T>
Json optional_number(const std::optional<T>& v)
{
    return v ? number(static_cast<Scalar>(*v)) : Json(nullptr);
}

Json optional_bool(const std::optional<bool>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

Json subset_json(const SubsetExtremum& e, Index m)
{
    Json j;
    j["m"] = m;
    j["value"] = number(e.value);
    j["subset"] = to_json(e.subset);
    j["evaluated"] = e.evaluated;
    return j;
}

Json pair_json(const PairExtremum& e)
{
    Json j;
    j["value"] = number(e.value);
    j["left"] = to_json(e.left);
    j["right"] = to_json(e.right);
    j["evaluated"] = e.evaluated;
    return j;
}

Json cell_json(const RateCell& cell)
{
    Json j;
    j["n"] = cell.n;
    j["p"] = cell.p;
    j["s"] = cell.s;
    j["sigma"] = number(cell.sigma);
    j["design"] = to_string(cell.design);
    j["correlation"] = number(cell.correlation);
    return j;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what)
{
    if (!j.is_object()) {
        throw InvalidArgument(what + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (allowed.count(item.key()) == 0) {
            throw InvalidArgument(what + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
void read_key(const Json& j, const char* key, T& out)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

Json to_json(const io::DatasetMetadata& meta)
{
    Json j;
    j["n"] = meta.n;
    j["p"] = meta.p;
    j["seed"] = meta.seed;
    j["normalized"] = meta.normalized;
    j["column_scales"] = to_json(meta.column_scales);
    return j;
}

Json to_json(const FitResult& fit)
{
    Json j;
    j["method"] = to_string(fit.method);
    j["lambda"] = number(fit.lambda);
    j["coefficients"] = to_json(fit.coefficients.values());
    j["objective"] = number(fit.objective_value);
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["support"] = to_json(fit.coefficients.support());
    return j;
}

Json to_json(const ConditionReport& report)
{
    Json j;
    j["s"] = report.s;
    j["n"] = report.n;
    j["p"] = report.p;
    Json params;
    params["k_bar"] = optional_number(report.params.k_bar);
    params["k_underline"] = number(report.params.k_underline);
    params["M"] = number(report.params.m_constant);
    params["epsilon"] = number(report.params.epsilon);
    j["params"] = params;
    j["m_two_s"] = report.m_two_s;
    j["m_s_log_n"] = report.m_my;

    Json pmin = Json::array();
    for (const auto& [m, e] : report.phi_min) {
        pmin.push_back(subset_json(e, m));
    }
    j["phi_min"] = pmin;
    Json pmax = Json::array();
    for (const auto& [m, e] : report.phi_max) {
        pmax.push_back(subset_json(e, m));
    }
    j["phi_max"] = pmax;
    j["phi_max_full"] = report.phi_max_full ? subset_json(*report.phi_max_full, report.p) : Json(nullptr);
    Json th = Json::array();
    for (const auto& [key, e] : report.theta) {
        Json t;
        t["m"] = key.first;
        t["m_prime"] = key.second;
        const Json body = pair_json(e);
        for (const auto& item : body.items()) {
            t[item.key()] = item.value();
        }
        th.push_back(t);
    }
    j["theta"] = th;
    j["rho_s"] = report.rho_s ? pair_json(*report.rho_s) : Json(nullptr);

    Json verdicts;
    verdicts["A1"] = optional_bool(report.a1);
    verdicts["A2"] = optional_bool(report.a2);
    verdicts["A3_BTW"] = optional_bool(report.a3_btw);
    verdicts["A3_MY"] = optional_bool(report.a3_my);
    verdicts["A3_CT"] = optional_bool(report.a3_ct);
    j["verdicts"] = verdicts;
    j["phi_min_two_s_is_one"] = report.phi_min_two_s_is_one;
    j["enumeration_exact"] = report.enumeration_exact;
    j["notes"] = report.notes;
    return j;
}

Json to_json(const RepresentationFamily& family)
{
    Json j;
    j["fitted_norm"] = number(family.fitted.norm());
    Json members = Json::array();
    for (const Representation& r : family.members) {
        Json m;
        m["support"] = to_json(r.support);
        m["coefficients"] = to_json(r.coefficients);
        m["l1_norm"] = number(r.coefficients.lpNorm<1>());
        members.push_back(m);
    }
    j["members"] = members;
    j["evaluated"] = family.evaluated;
    return j;
}

Json to_json(const ImportanceReport& report)
{
    Json j;
    j["sigma_hat"] = number(report.sigma_hat);
    j["cutoff_kind"] = to_string(report.cutoff_kind);
    j["cutoff"] = number(report.cutoff);
    j["r2_threshold"] = number(report.r2_threshold);
    j["importance_threshold"] = number(report.importance_threshold);
    j["screened_in"] = to_json(report.screened_in);
    j["support"] = to_json(report.support);
    j["candidates"] = to_json(report.candidates);
    j["retained"] = to_json(report.retained);
    Json vars = Json::array();
    for (const VariableImportance& v : report.variables) {
        Json e;
        e["index"] = v.index;
        e["screen_statistic"] = number(v.screen_statistic);
        e["in_support"] = v.in_support;
        e["candidate"] = v.candidate;
        e["retained"] = v.retained;
        e["importance"] = optional_number(v.importance);
        e["best_partner_set"] = v.best_partner_set ? to_json(*v.best_partner_set) : Json(nullptr);
        Json ctxs = Json::array();
        for (const ContextEvaluation& c : v.contexts) {
            Json cj;
            cj["dropped"] = c.dropped;
            cj["context"] = to_json(c.context);
            cj["r2"] = optional_number(c.r2);
            cj["t_squared"] = optional_number(c.t_squared);
            cj["skipped"] = c.skipped.empty() ? Json(nullptr) : Json(c.skipped);
            ctxs.push_back(cj);
        }
        e["t_statistics"] = ctxs;
        vars.push_back(e);
    }
    j["variables"] = vars;
    return j;
}

Json to_json(const CvResult& result)
{
    Json j;
    j["method"] = to_string(result.method);
    j["chosen_lambda"] = number(result.chosen_lambda);
    j["test_size"] = result.test_size;
    Json curve = Json::array();
    for (const CvPoint& pt : result.curve) {
        Json c;
        c["lambda"] = number(pt.lambda);
        c["mean_error"] = number(pt.mean_error);
        c["std_error"] = number(pt.std_error);
        Json errs = Json::array();
        for (Scalar e : pt.fold_errors) {
            errs.push_back(number(e));
        }
        c["fold_errors"] = errs;
        curve.push_back(c);
    }
    j["curve"] = curve;
    Json folds = Json::array();
    for (const auto& f : result.test_folds) {
        folds.push_back(to_json(IndexSet(f.begin(), f.end())));
    }
    j["test_folds"] = folds;
    return j;
}

Json to_json(const ExperimentConfig& config)
{
    Json j;
    Json cells = Json::array();
    for (const RateCell& c : config.cells) {
        cells.push_back(cell_json(c));
    }
    j["cells"] = cells;
    j["replications"] = config.replications;
    j["seed"] = config.seed;
    Json est = Json::array();
    for (FitMethod m : config.estimators) {
        est.push_back(to_string(m));
    }
    j["estimators"] = est;
    j["lambda_scale"] = number(config.lambda_scale);
    j["output"] = config.output;
    return j;
}

Json to_json(const RateStudyResult& result)
{
    Json j;
    j["config"] = to_json(result.config);
    Json cells = Json::array();
    for (const RateCellSummary& s : result.summaries) {
        Json c;
        c["cell"] = s.cell;
        c["method"] = to_string(s.method);
        const Json spec = cell_json(s.spec);
        for (const auto& item : spec.items()) {
            c[item.key()] = item.value();
        }
        c["predictor"] = number(s.predictor);
        c["lambda"] = number(s.lambda);
        c["completed"] = s.completed;
        c["failures"] = s.failures;
        c["mean_error"] = optional_number(s.mean_error);
        c["median_error"] = optional_number(s.median_error);
        cells.push_back(c);
    }
    j["cells"] = cells;
    Json slopes = Json::array();
    for (const RateSlope& s : result.slopes) {
        Json c;
        c["method"] = to_string(s.method);
        c["slope"] = optional_number(s.slope);
        c["intercept"] = optional_number(s.intercept);
        c["cells_used"] = s.cells_used;
        slopes.push_back(c);
    }
    j["slopes"] = slopes;
    Json records = Json::array();
    for (const RateRecord& r : result.records) {
        Json c;
        c["cell"] = r.cell;
        c["replication"] = r.replication;
        c["method"] = to_string(r.method);
        c["seed"] = r.seed;
        c["lambda"] = number(r.lambda);
        c["error"] = optional_number(r.error);
        c["converged"] = r.converged;
        c["failure"] = r.failure.empty() ? Json(nullptr) : Json(r.failure);
        records.push_back(c);
    }
    j["records"] = records;
    return j;
}

Json to_json(const ComparisonConfig& config)
{
    Json j;
    j["n"] = config.n;
    j["dictionary_size"] = config.dictionary_size;
    j["terms"] = config.terms;
    j["sigma"] = number(config.sigma);
    j["spike_probability"] = number(config.spike_probability);
    j["spike_scale"] = number(config.spike_scale);
    j["test_size"] = config.test_size;
    j["replications"] = config.replications;
    j["seed"] = config.seed;
    j["lambda"] = optional_number(config.lambda);
    j["outlier"] = number(config.outlier);
    return j;
}

Json to_json(const ComparisonTable& table)
{
    Json j;
    j["config"] = to_json(table.config);
    j["lambda"] = number(table.lambda);
    j["completed"] = table.completed;
    j["dantzig_wins"] = table.dantzig_wins;
    j["dantzig_win_rate"] = number(table.dantzig_win_rate);
    j["mean_dantzig_mse"] = number(table.mean_dantzig_mse);
    j["mean_chebyshev_mse"] = number(table.mean_chebyshev_mse);
    j["median_dantzig_mse"] = number(table.median_dantzig_mse);
    j["median_chebyshev_mse"] = number(table.median_chebyshev_mse);
    Json records = Json::array();
    for (const ComparisonRecord& r : table.records) {
        Json c;
        c["replication"] = r.replication;
        c["seed"] = r.seed;
        c["spikes"] = r.spikes;
        c["dantzig_mse"] = number(r.dantzig_mse);
        c["chebyshev_mse"] = number(r.chebyshev_mse);
        c["dantzig_f_mse"] = number(r.dantzig_f_mse);
        c["chebyshev_f_mse"] = number(r.chebyshev_f_mse);
        c["dantzig_coef_error"] = number(r.dantzig_coef_error);
        c["chebyshev_coef_error"] = number(r.chebyshev_coef_error);
        c["dantzig_wins"] = r.dantzig_wins;
        c["dantzig_outlier_ratio"] = optional_number(r.dantzig_outlier_ratio);
        c["chebyshev_outlier_ratio"] = optional_number(r.chebyshev_outlier_ratio);
        c["failure"] = r.failure.empty() ? Json(nullptr) : Json(r.failure);
        records.push_back(c);
    }
    j["records"] = records;
    return j;
}

void update_from_json(const Json& j, ExperimentConfig& config)
{
    check_keys(j, {"cells", "replications", "seed", "estimators", "lambda_scale", "output"}, "experiment config");
    if (j.contains("cells")) {
        if (!j.at("cells").is_array()) {
            throw InvalidArgument("experiment config: 'cells' must be an array");
        }
        config.cells.clear();
        for (const Json& c : j.at("cells")) {
            check_keys(c, {"n", "p", "s", "sigma", "design", "correlation"}, "experiment cell");
            RateCell cell;
            read_key(c, "n", cell.n);
            read_key(c, "p", cell.p);
            read_key(c, "s", cell.s);
            read_key(c, "sigma", cell.sigma);
            read_key(c, "correlation", cell.correlation);
            std::string design = to_string(cell.design);
            read_key(c, "design", design);
            cell.design = design_kind_from_string(design);
            config.cells.push_back(cell);
        }
    }
    read_key(j, "replications", config.replications);
    read_key(j, "seed", config.seed);
    read_key(j, "lambda_scale", config.lambda_scale);
    read_key(j, "output", config.output);
    if (j.contains("estimators")) {
        std::vector<std::string> names;
        read_key(j, "estimators", names);
        config.estimators.clear();
        for (const auto& name : names) {
            config.estimators.push_back(fit_method_from_string(name));
        }
    }
}

void update_from_json(const Json& j, ComparisonConfig& config)
{
    check_keys(j,
               {"n", "dictionary_size", "terms", "sigma", "spike_probability", "spike_scale", "test_size",
                "replications", "seed", "lambda", "outlier"},
               "comparison config");
    read_key(j, "n", config.n);
    read_key(j, "dictionary_size", config.dictionary_size);
    read_key(j, "terms", config.terms);
    read_key(j, "sigma", config.sigma);
    read_key(j, "spike_probability", config.spike_probability);
    read_key(j, "spike_scale", config.spike_scale);
    read_key(j, "test_size", config.test_size);
    read_key(j, "replications", config.replications);
    read_key(j, "seed", config.seed);
    read_key(j, "outlier", config.outlier);
    if (j.contains("lambda")) {
        if (j.at("lambda").is_null()) {
            config.lambda.reset();
        } else {
            Scalar value = 0.0;
            read_key(j, "lambda", value);
            config.lambda = value;
        }
    }
}

std::string dump(const Json& j)
{
    return j.dump(2);
}

}  // namespace sparselab
