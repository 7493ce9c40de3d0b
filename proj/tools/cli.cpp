#include "cli.hpp"

#include "sparselab/conditions.hpp"
#include "sparselab/cv.hpp"
#include "sparselab/experiments.hpp"
#include "sparselab/io.hpp"
#include "sparselab/model_analysis.hpp"
#include "sparselab/serialize.hpp"
#include "sparselab/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sparselab::cli {

namespace {

// Subcommands whose --config file holds an experiment description rather
// than flag defaults.
bool structured_config(const std::string& command)
{
    return command == "rate-experiment" || command == "objective-comparison";
}

Json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open config '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config '" + path + "': " + e.what());
    }
}

std::string scalar_text(const Json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    if (v.is_number_float()) {
        return io::format_scalar(v.get<Scalar>());
    }
    throw InvalidArgument("config values must be strings, numbers, booleans or arrays of those");
}

std::optional<std::string> find_config(const std::vector<std::string>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return std::nullopt;
}

bool given(const std::vector<std::string>& args, const std::string& flag)
{
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Flag-style config: every key names a long option of the subcommand; values
// apply only where the option is absent from the command line.
std::vector<std::string> inject_config(const std::vector<std::string>& args)
{
    if (args.empty() || structured_config(args[0])) {
        return args;
    }
    const auto path = find_config(args);
    if (!path) {
        return args;
    }
    const Json j = load_json(*path);
    if (!j.is_object()) {
        throw InvalidArgument("config '" + *path + "' must be a JSON object");
    }
    std::vector<std::string> extra;
    for (const auto& item : j.items()) {
        const std::string flag = "--" + item.key();
        if (given(args, flag)) {
            continue;
        }
        const Json& v = item.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) {
                extra.push_back(flag);
            }
        } else if (v.is_array()) {
            std::string joined;
            for (const Json& e : v) {
                joined += (joined.empty() ? "" : ",") + scalar_text(e);
            }
            extra.push_back(flag);
            extra.push_back(joined);
        } else {
            extra.push_back(flag);
            extra.push_back(scalar_text(v));
        }
    }
    std::vector<std::string> merged;
    merged.push_back(args[0]);
    merged.insert(merged.end(), extra.begin(), extra.end());
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

struct DataArgs {
    std::string design;
    std::string response;
    bool normalize = false;
};

void add_data_options(CLI::App* cmd, DataArgs& d, bool response_required = true)
{
    cmd->add_option("--design", d.design, "headerless n x p CSV")->required()->check(CLI::ExistingFile);
    auto* r = cmd->add_option("--response", d.response, "single-column CSV")->check(CLI::ExistingFile);
    if (response_required) {
        r->required();
    }
    cmd->add_flag("--normalize", d.normalize, "rescale columns so |X_j|^2 = n before use");
}

RegressionProblem load_problem(const DataArgs& d)
{
    Matrix x = io::read_csv_matrix(d.design);
    Vector y = d.response.empty() ? Vector::Zero(x.rows()) : io::read_csv_vector(d.response);
    RegressionProblem problem(std::move(x), std::move(y));
    return d.normalize ? normalize_columns(problem) : problem;
}

struct SigmaChoice {
    Scalar value = 0.0;
    std::string source;
};

SigmaChoice resolve_sigma(const RegressionProblem& problem, const CLI::Option* opt, Scalar sigma, std::uint64_t seed)
{
    if (opt->count() > 0) {
        return {sigma, "given"};
    }
    SigmaOptions options;
    options.seed = seed;
    return {estimate_sigma(problem, options), "estimated"};
}

Scalar default_lambda_for(FitMethod method, const RegressionProblem& problem, Scalar sigma)
{
    const Scalar base = default_lambda(problem.n(), problem.p(), sigma);
    return method == FitMethod::Lasso ? 2.0 * base : base;
}

void emit(std::ostream& out, const Json& j)
{
    out << dump(j) << '\n';
}

void emit_to(std::ostream& out, const std::string& path, const Json& j)
{
    if (path.empty()) {
        emit(out, j);
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw InvalidArgument("cannot write '" + path + "'");
    }
    emit(file, j);
}

const std::map<std::string, FitMethod> kMethods{{"dantzig", FitMethod::Dantzig},
                                                 {"lasso", FitMethod::Lasso},
                                                 {"chebyshev", FitMethod::Chebyshev},
                                                 {"soft-threshold", FitMethod::SoftThreshold}};
const std::map<std::string, FitMethod> kPenalized{{"dantzig", FitMethod::Dantzig}, {"lasso", FitMethod::Lasso}};
const std::map<std::string, CutoffKind> kCutoffs{{"standardized", CutoffKind::Standardized},
                                                  {"paper-literal", CutoffKind::Unscaled}};

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sparse regression laboratory: Dantzig selector, Lasso, design conditions, "
                 "importance under collinearity and cross-validation."};
    app.name("sparselab");
    app.require_subcommand(1, 1);

    std::uint64_t seed = 0;
    std::string config_path;
    const auto common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed")->capture_default_str();
        cmd->add_option("--config", config_path, "JSON file of option defaults");
    };

    // simulate
    SyntheticSpec spec;
    std::string design_name = "iid-gaussian";
    std::string sim_out;
    bool population = false;
    auto* sim = app.add_subcommand("simulate", "draw a synthetic problem and write it as CSV + JSON metadata");
    common(sim);
    sim->add_option("--n", spec.n)->capture_default_str();
    sim->add_option("--p", spec.p)->capture_default_str();
    sim->add_option("--s", spec.s)->capture_default_str();
    sim->add_option("--sigma", spec.sigma)->capture_default_str();
    sim->add_option("--design", design_name, "iid-gaussian | orthogonal | collinear-example | custom-correlation")
        ->capture_default_str();
    sim->add_option("--alpha", spec.alpha)->capture_default_str();
    sim->add_option("--beta", spec.beta)->capture_default_str();
    sim->add_option("--correlation", spec.correlation)->capture_default_str();
    sim->add_flag("--population", population, "collinear example with exact population Gram (noiseless)");
    sim->add_option("--out", sim_out, "output directory")->required();

    // fit
    DataArgs fit_data;
    FitMethod fit_method = FitMethod::Lasso;
    Scalar fit_lambda = 0.0;
    Scalar fit_sigma = 1.0;
    auto* fit = app.add_subcommand("fit", "fit one estimator and print the FitResult");
    common(fit);
    add_data_options(fit, fit_data);
    fit->add_option("--method", fit_method)->transform(CLI::CheckedTransformer(kMethods))->capture_default_str();
    auto* fit_lambda_opt = fit->add_option("--lambda", fit_lambda, "default: lambda_default (x2 for the Lasso)");
    auto* fit_sigma_opt = fit->add_option("--sigma", fit_sigma, "noise level for the default lambda");

    // diagnose
    DataArgs diag_data;
    Index diag_s = 1;
    ConditionParams params;
    Scalar k_bar = 0.0;
    std::uint64_t budget = kDefaultEnumerationBudget;
    auto* diag = app.add_subcommand("diagnose", "restricted eigenvalues, theta, rho and the five conditions");
    common(diag);
    add_data_options(diag, diag_data, false);
    diag->add_option("--s", diag_s)->required();
    auto* k_bar_opt = diag->add_option("--k-bar", k_bar, "A1 bound (default p)");
    diag->add_option("--k-underline", params.k_underline)->capture_default_str();
    diag->add_option("--M", params.m_constant)->capture_default_str();
    diag->add_option("--epsilon", params.epsilon)->capture_default_str();
    diag->add_option("--budget", budget, "subset enumeration cap")->capture_default_str();

    // screen
    DataArgs scr_data;
    Scalar scr_sigma = 1.0;
    CutoffKind scr_cutoff = CutoffKind::Standardized;
    auto* scr = app.add_subcommand("screen", "marginal screening statistic with cutoff");
    common(scr);
    add_data_options(scr, scr_data);
    auto* scr_sigma_opt = scr->add_option("--sigma", scr_sigma, "default: cross-validated estimate");
    scr->add_option("--cutoff", scr_cutoff)->transform(CLI::CheckedTransformer(kCutoffs));

    // importance
    DataArgs imp_data;
    FitMethod imp_method = FitMethod::Lasso;
    Scalar imp_lambda = 0.0;
    Scalar imp_sigma = 1.0;
    CandidateOptions cand;
    auto* imp = app.add_subcommand("importance", "candidate-variable importance procedure on a sparse fit");
    common(imp);
    add_data_options(imp, imp_data);
    imp->add_option("--method", imp_method)->transform(CLI::CheckedTransformer(kPenalized));
    auto* imp_lambda_opt = imp->add_option("--lambda", imp_lambda);
    auto* imp_sigma_opt = imp->add_option("--sigma", imp_sigma);
    imp->add_option("--K", cand.k)->capture_default_str();
    imp->add_option("--r2-threshold", cand.r2_threshold)->capture_default_str();
    imp->add_option("--cutoff", cand.cutoff)->transform(CLI::CheckedTransformer(kCutoffs));

    // cv
    DataArgs cv_data;
    CvPlan plan;
    Scalar grid_c = 1.0;
    Scalar cv_sigma = 1.0;
    std::vector<Scalar> explicit_grid;
    Index max_grid = 0;
    std::string curve_csv;
    auto* cvc = app.add_subcommand("cv", "V-fold cross-validation of lambda");
    common(cvc);
    add_data_options(cvc, cv_data);
    cvc->add_option("--method", plan.method)->transform(CLI::CheckedTransformer(kPenalized));
    cvc->add_option("--folds", plan.folds)->capture_default_str();
    cvc->add_option("--test-size", plan.test_size, "default ceil(log n)");
    cvc->add_option("--grid-c", grid_c, "grid width constant")->capture_default_str();
    auto* cv_sigma_opt = cvc->add_option("--sigma", cv_sigma);
    auto* grid_opt = cvc->add_option("--grid", explicit_grid, "explicit ascending lambda values")->delimiter(',');
    auto* max_grid_opt = cvc->add_option("--lambda-max-grid", max_grid, "geometric grid of this many points ending at lambda_max");
    cvc->add_option("--curve-csv", curve_csv, "also write the error curve as CSV");
    grid_opt->excludes(max_grid_opt);

    // rate-experiment
    Index n0 = 200;
    Index cell_count = 4;
    Index p_factor = 2;
    RateCell cell_template;
    cell_template.s = 5;
    std::string rate_design = "iid-gaussian";
    Index replications = 50;
    std::vector<std::string> estimator_names{"dantzig", "lasso"};
    Scalar lambda_scale = 1.0;
    std::string rate_out;
    auto* rate = app.add_subcommand("rate-experiment", "estimation error against sqrt((s/n) log p)");
    common(rate);
    auto* n0_opt = rate->add_option("--n0", n0, "smallest n; n doubles across cells")->capture_default_str();
    auto* cells_opt = rate->add_option("--cells", cell_count)->capture_default_str();
    auto* pf_opt = rate->add_option("--p-factor", p_factor, "p = p_factor * n")->capture_default_str();
    auto* rs_opt = rate->add_option("--s", cell_template.s)->capture_default_str();
    auto* rsig_opt = rate->add_option("--sigma", cell_template.sigma)->capture_default_str();
    auto* rdes_opt = rate->add_option("--design", rate_design)->capture_default_str();
    auto* reps_opt = rate->add_option("--replications", replications)->capture_default_str();
    auto* est_opt = rate->add_option("--estimators", estimator_names)->delimiter(',');
    auto* ls_opt = rate->add_option("--lambda-scale", lambda_scale)->capture_default_str();
    rate->add_option("--out", rate_out, "write JSON here instead of standard output");

    // objective-comparison
    ComparisonConfig cmp;
    Scalar cmp_lambda = 0.0;
    std::string cmp_out;
    auto* obj = app.add_subcommand("objective-comparison", "Chebyshev versus Dantzig out-of-sample error");
    common(obj);
    auto* on_opt = obj->add_option("--n", cmp.n)->capture_default_str();
    auto* od_opt = obj->add_option("--dictionary-size", cmp.dictionary_size)->capture_default_str();
    auto* ot_opt = obj->add_option("--terms", cmp.terms)->capture_default_str();
    auto* osig_opt = obj->add_option("--sigma", cmp.sigma)->capture_default_str();
    auto* osp_opt = obj->add_option("--spike-probability", cmp.spike_probability)->capture_default_str();
    auto* oss_opt = obj->add_option("--spike-scale", cmp.spike_scale)->capture_default_str();
    auto* ots_opt = obj->add_option("--test-size", cmp.test_size)->capture_default_str();
    auto* oreps_opt = obj->add_option("--replications", cmp.replications)->capture_default_str();
    auto* olam_opt = obj->add_option("--lambda", cmp_lambda);
    auto* oout_opt = obj->add_option("--outlier", cmp.outlier, "append one outlier of this size and refit")
                         ->capture_default_str();
    obj->add_option("--out", cmp_out, "write JSON here instead of standard output");

    try {
        std::vector<std::string> args = inject_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (sim->parsed()) {
            spec.design = design_kind_from_string(design_name);
            spec.seed = seed;
            SimulatedData data = [&] {
                if (population) {
                    if (spec.design != DesignKind::Collinear) {
                        throw InvalidArgument("--population applies to the collinear example only");
                    }
                    return population_collinear(spec.alpha, spec.beta, spec.n);
                }
                return simulate(spec);
            }();
            io::write_dataset(sim_out, data.problem, seed, &data.beta0.values());
            Json j;
            j["command"] = "simulate";
            j["n"] = data.problem.n();
            j["p"] = data.problem.p();
            j["s"] = data.beta0.sparsity();
            j["sigma"] = number(population ? 0.0 : spec.sigma);
            j["design"] = to_string(spec.design);
            j["population"] = population;
            j["seed"] = seed;
            j["normalized"] = data.problem.normalized();
            j["support"] = to_json(data.beta0.support());
            j["directory"] = sim_out;
            j["files"] = {"design.csv", "response.csv", "beta.csv", "metadata.json"};
            emit(out, j);
        } else if (fit->parsed()) {
            const RegressionProblem problem = load_problem(fit_data);
            Scalar lambda = fit_lambda;
            if (fit_lambda_opt->count() == 0 && fit_method != FitMethod::Chebyshev) {
                lambda = default_lambda_for(fit_method, problem,
                                            resolve_sigma(problem, fit_sigma_opt, fit_sigma, seed).value);
            }
            const FitResult result =
                fit_method == FitMethod::Chebyshev ? chebyshev_fit(problem) : fit_with(fit_method, problem, lambda);
            emit(out, to_json(result));
        } else if (diag->parsed()) {
            const RegressionProblem problem = load_problem(diag_data);
            if (k_bar_opt->count() > 0) {
                params.k_bar = k_bar;
            }
            emit(out, to_json(evaluate_conditions(problem, diag_s, params, budget)));
        } else if (scr->parsed()) {
            const RegressionProblem problem = load_problem(scr_data);
            const SigmaChoice sigma = resolve_sigma(problem, scr_sigma_opt, scr_sigma, seed);
            Json j;
            j["sigma_hat"] = number(sigma.value);
            j["sigma_source"] = sigma.source;
            j["cutoff_kind"] = to_string(scr_cutoff);
            j["cutoff"] = number(screen_cutoff(problem.n(), problem.p(), scr_cutoff));
            j["statistics"] = to_json(screen_statistics(problem, sigma.value));
            j["screened_in"] = to_json(screen(problem, sigma.value, scr_cutoff));
            emit(out, j);
        } else if (imp->parsed()) {
            const RegressionProblem problem = load_problem(imp_data);
            const SigmaChoice sigma = resolve_sigma(problem, imp_sigma_opt, imp_sigma, seed);
            const Scalar lambda =
                imp_lambda_opt->count() > 0 ? imp_lambda : default_lambda_for(imp_method, problem, sigma.value);
            const FitResult result = fit_with(imp_method, problem, lambda);
            cand.sigma_hat = sigma.value;
            Json j = to_json(candidate_importance_procedure(problem, result, cand));
            j["sigma_source"] = sigma.source;
            j["fit"] = to_json(result);
            emit(out, j);
        } else if (cvc->parsed()) {
            const RegressionProblem problem = load_problem(cv_data);
            plan.seed = seed;
            std::string grid_kind;
            if (grid_opt->count() > 0) {
                plan.grid = explicit_grid;
                grid_kind = "explicit";
            } else if (max_grid_opt->count() > 0) {
                plan.grid = lambda_max_grid(problem, plan.method, max_grid, 1e-4);
                grid_kind = "lambda-max";
            } else {
                const SigmaChoice sigma = resolve_sigma(problem, cv_sigma_opt, cv_sigma, seed);
                plan.grid = default_grid(problem, sigma.value, grid_c, plan.method);
                grid_kind = "default";
            }
            const CvResult result = cross_validate(problem, plan);
            Json j = to_json(result);
            j["grid_kind"] = grid_kind;
            j["folds"] = plan.folds;
            j["seed"] = seed;
            emit(out, j);
            if (!curve_csv.empty()) {
                Matrix table(static_cast<Index>(result.curve.size()), 3);
                for (std::size_t i = 0; i < result.curve.size(); ++i) {
                    const auto r = static_cast<Index>(i);
                    table(r, 0) = result.curve[i].lambda;
                    table(r, 1) = result.curve[i].mean_error;
                    table(r, 2) = result.curve[i].std_error;
                }
                io::write_csv(curve_csv, table);
            }
        } else if (rate->parsed()) {
            ExperimentConfig config;
            config.cells = doubling_cells(n0, cell_count, p_factor, cell_template.s, cell_template.sigma,
                                          design_kind_from_string(rate_design));
            config.replications = replications;
            config.lambda_scale = lambda_scale;
            config.seed = seed;
            const bool shape_flags = n0_opt->count() + cells_opt->count() + pf_opt->count() + rs_opt->count() +
                                         rsig_opt->count() + rdes_opt->count() >
                                     0;
            if (!config_path.empty()) {
                update_from_json(load_json(config_path), config);
                if (shape_flags) {
                    config.cells = doubling_cells(n0, cell_count, p_factor, cell_template.s, cell_template.sigma,
                                                  design_kind_from_string(rate_design));
                }
            }
            if (reps_opt->count() > 0) {
                config.replications = replications;
            }
            if (ls_opt->count() > 0 || config_path.empty()) {
                config.lambda_scale = lambda_scale;
            }
            if (est_opt->count() > 0 || config_path.empty()) {
                config.estimators.clear();
                for (const auto& name : estimator_names) {
                    config.estimators.push_back(fit_method_from_string(name));
                }
            }
            if (app.get_subcommand("rate-experiment")->get_option("--seed")->count() > 0) {
                config.seed = seed;
            }
            config.output = rate_out;
            emit_to(out, rate_out, to_json(run_rate_study(config)));
        } else if (obj->parsed()) {
            ComparisonConfig config = cmp;
            config.seed = seed;
            if (!config_path.empty()) {
                config = ComparisonConfig{};
                update_from_json(load_json(config_path), config);
                const std::pair<CLI::Option*, std::function<void()>> overrides[] = {
                    {on_opt, [&] { config.n = cmp.n; }},
                    {od_opt, [&] { config.dictionary_size = cmp.dictionary_size; }},
                    {ot_opt, [&] { config.terms = cmp.terms; }},
                    {osig_opt, [&] { config.sigma = cmp.sigma; }},
                    {osp_opt, [&] { config.spike_probability = cmp.spike_probability; }},
                    {oss_opt, [&] { config.spike_scale = cmp.spike_scale; }},
                    {ots_opt, [&] { config.test_size = cmp.test_size; }},
                    {oreps_opt, [&] { config.replications = cmp.replications; }},
                    {oout_opt, [&] { config.outlier = cmp.outlier; }},
                    {obj->get_option("--seed"), [&] { config.seed = seed; }},
                };
                for (const auto& [opt, apply] : overrides) {
                    if (opt->count() > 0) {
                        apply();
                    }
                }
            }
            if (olam_opt->count() > 0) {
                config.lambda = cmp_lambda;
            }
            emit_to(out, cmp_out, to_json(run_objective_comparison(config)));
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kSuccess;
}

}  // namespace sparselab::cli
