#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "eta/csv.hpp"
#include "eta/metrics.hpp"
#include "eta/problems.hpp"
#include "eta/training.hpp"
#include "eta/wasserstein.hpp"
#include "json.hpp"

namespace eta::cli {

namespace fs = std::filesystem;

namespace {

struct ProblemContext {
    std::unique_ptr<Observable> g;
    std::size_t input_dim = 2;
    std::size_t state_dim = 1;
    bool analytic = false;  // toy problems carry an analytic truth map
    ToyProblemSpec toy_spec;
};

ProblemContext problem_context(const ExperimentConfig& cfg) {
    ProblemContext ctx;
    switch (cfg.problem) {
        case Problem::kToy1d:
            ctx.g = make_identity_observable();
            ctx.state_dim = 1;
            ctx.analytic = true;
            ctx.toy_spec = toy1d_spec();
            ctx.toy_spec.input_sigma2 = cfg.sigma2;
            break;
        case Problem::kToy2d:
            ctx.g = make_weighted_abs_observable({2.0, 0.5});
            ctx.state_dim = 2;
            ctx.analytic = true;
            ctx.toy_spec = toy2d_spec();
            ctx.toy_spec.input_sigma2 = cfg.sigma2;
            break;
        case Problem::kCustomCsv:
            try {
                ctx.g = make_observable(cfg.observable);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            ctx.analytic = false;
            break;
    }
    return ctx;
}

double analytic_observable(const ProblemContext& ctx, const double* x) {
    if (ctx.toy_spec.mode == ToyMode::kOneD) return toy1d_y(x[0], x[1]);
    double u1, u2;
    toy2d_u(x[0], x[1], u1, u2);
    return toy2d_g(u1, u2);
}

std::string path_in_out(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out) / name).string();
}

void ensure_out_dir(const ExperimentConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw UsageError("cannot create output directory: " + cfg.out);
}

void echo_config(const ExperimentConfig& cfg) {
    csv::write_text(path_in_out(cfg, "config_used.cfg"), render_config(cfg));
}

void say(const ExperimentConfig& cfg, const std::string& msg) {
    if (!cfg.quiet) std::fputs((msg + "\n").c_str(), stdout);
}

csv::Table dataset_to_table(const Dataset& data) {
    csv::Table t;
    const std::size_t d = data.inputs.cols;
    const std::size_t m = data.states.cols;
    for (std::size_t k = 0; k < d; ++k) t.header.push_back("x" + std::to_string(k + 1));
    for (std::size_t k = 0; k < m; ++k) t.header.push_back("u" + std::to_string(k + 1));
    t.header.push_back("y");
    t.rows.reserve(data.inputs.rows);
    for (std::size_t i = 0; i < data.inputs.rows; ++i) {
        std::vector<double> row;
        row.reserve(d + m + 1);
        for (std::size_t k = 0; k < d; ++k) row.push_back(data.inputs.at(i, k));
        for (std::size_t k = 0; k < m; ++k) row.push_back(data.states.at(i, k));
        row.push_back(data.observables[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

csv::Table load_table_or_usage(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("missing data file: " + path);
    try {
        return csv::read_table(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

// Counts leading columns named prefix1..prefixK.
std::size_t count_prefixed(const std::vector<std::string>& header, std::size_t from,
                           const std::string& prefix) {
    std::size_t count = 0;
    while (from + count < header.size() &&
           header[from + count] == prefix + std::to_string(count + 1))
        ++count;
    return count;
}

Dataset load_dataset_csv(const std::string& path, const Observable& g) {
    const auto table = load_table_or_usage(path);
    const std::size_t d = count_prefixed(table.header, 0, "x");
    const std::size_t m = count_prefixed(table.header, d, "u");
    if (d == 0 || m == 0 || table.header.size() != d + m + 1 || table.header.back() != "y")
        throw UsageError("dataset header must be x1..xD,u1..uM,y: " + path);
    Dataset data;
    data.inputs = Matrix(table.rows.size(), d);
    data.states = Matrix(table.rows.size(), m);
    data.observables.resize(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k) data.inputs.at(i, k) = table.rows[i][k];
        for (std::size_t k = 0; k < m; ++k) data.states.at(i, k) = table.rows[i][d + k];
        data.observables[i] = table.rows[i][d + m];
    }
    try {
        validate_dataset(data, g);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(e.what()) + ": " + path);
    }
    return data;
}

Matrix load_pool_csv(const std::string& path, std::size_t expected_dim) {
    const auto table = load_table_or_usage(path);
    const std::size_t d = count_prefixed(table.header, 0, "x");
    if (d == 0 || table.header.size() != d)
        throw UsageError("pool header must be x1..xD: " + path);
    if (expected_dim != 0 && d != expected_dim)
        throw UsageError("pool dimension does not match dataset: " + path);
    Matrix pool(table.rows.size(), d);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t k = 0; k < d; ++k) pool.at(i, k) = table.rows[i][k];
    return pool;
}

// Reference quantile source: an empirical sample file or a GEVD descriptor.
struct Reference {
    QuantileFn quantile;
    std::string description;
};

Reference load_reference(const ExperimentConfig& cfg) {
    Reference ref;
    switch (cfg.reference_kind) {
        case ReferenceKind::kAnalytic: {
            const std::string path = path_in_out(cfg, "reference.csv");
            if (!fs::exists(path)) throw UsageError("missing data file: " + path);
            auto dist = std::make_shared<EmpiricalDistribution>(
                EmpiricalDistribution::load_csv(path));
            ref.quantile = [dist](double q) { return dist->quantile(q); };
            ref.description = path;
            break;
        }
        case ReferenceKind::kCsv: {
            if (!fs::exists(cfg.reference_path))
                throw UsageError("missing data file: " + cfg.reference_path);
            auto dist = std::make_shared<EmpiricalDistribution>(
                EmpiricalDistribution::load_csv(cfg.reference_path));
            ref.quantile = [dist](double q) { return dist->quantile(q); };
            ref.description = cfg.reference_path;
            break;
        }
        case ReferenceKind::kGevd: {
            if (!fs::exists(cfg.reference_path))
                throw UsageError("missing data file: " + cfg.reference_path);
            GevdDescriptor desc;
            try {
                desc = gevd_load_json(cfg.reference_path);
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            if (desc.truncated) {
                const auto tg = make_truncated_gevd(desc.params, desc.gamma);
                ref.quantile = [tg](double q) { return truncated_gevd_quantile(tg, q); };
            } else {
                const auto params = desc.params;
                ref.quantile = [params](double q) { return gevd_quantile(params, q); };
            }
            ref.description = cfg.reference_path;
            break;
        }
    }
    return ref;
}

std::vector<std::size_t> model_dims(const ExperimentConfig& cfg, std::size_t in_dim,
                                    std::size_t out_dim) {
    std::vector<std::size_t> dims;
    dims.push_back(in_dim);
    for (std::size_t h : cfg.hidden) dims.push_back(h);
    dims.push_back(out_dim);
    return dims;
}

struct TrainLog {
    csv::Table table;
    TrainLog() { table.header = {"step", "erm_loss", "tail_w1_loss", "total", "refresh_flag"}; }
    void add(const TrainStepInfo& info) {
        table.rows.push_back({static_cast<double>(info.step), info.erm, info.tail, info.total,
                              info.refreshed ? 1.0 : 0.0});
    }
};

StepHook make_hook(const ExperimentConfig& cfg, TrainLog& log, const std::string& prefix) {
    return [&log, &cfg, prefix](const TrainStepInfo& info) {
        log.add(info);
        if (cfg.checkpoint_interval > 0 && info.step % cfg.checkpoint_interval == 0) {
            info.params->save_json(
                path_in_out(cfg, prefix + "_step" + std::to_string(info.step) + ".json"));
        }
    };
}

MlpParams run_erm_phase(const ExperimentConfig& cfg, const Dataset& data, MlpParams init) {
    TrainLog log;
    OptimizerConfig opt;
    opt.lr = cfg.lr;
    opt.batch = cfg.batch;
    opt.shuffle_seed = sub_seed(cfg.seed, SeedPurpose::kShuffle);
    MlpParams model;
    try {
        model = train_erm(data, std::move(init), opt, cfg.steps_erm,
                          make_hook(cfg, log, "erm_checkpoint"));
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }
    model.save_json(path_in_out(cfg, "erm_checkpoint.json"));
    csv::write_table(path_in_out(cfg, "erm_log.csv"), log.table);
    return model;
}

// Push-forward observable values of a model over a batch of inputs.
std::vector<double> push_forward(const MlpParams& model, const Observable& g, const Matrix& x) {
    const Matrix outs = mlp_forward(model, x);
    std::vector<double> values(outs.rows);
    for (std::size_t i = 0; i < outs.rows; ++i)
        values[i] = g.value({outs.row(i), outs.cols});
    return values;
}

}  // namespace

void cmd_gen_data(const ExperimentConfig& cfg) {
    if (cfg.problem == Problem::kCustomCsv)
        throw UsageError("gen-data applies to the toy problems; custom-csv supplies its own files");
    ensure_out_dir(cfg);
    const ProblemContext ctx = problem_context(cfg);

    const Dataset data = build_training_set(cfg.n_train, cfg.exclusion_center,
                                            cfg.exclusion_radius, cfg.sigma2,
                                            sub_seed(cfg.seed, SeedPurpose::kTrainData),
                                            ctx.toy_spec);
    csv::write_table(path_in_out(cfg, "dataset.csv"), dataset_to_table(data));

    const Matrix pool =
        sample_inputs(cfg.pool_size, cfg.sigma2, sub_seed(cfg.seed, SeedPurpose::kPool));
    csv::Table pool_table;
    pool_table.header = {"x1", "x2"};
    for (std::size_t i = 0; i < pool.rows; ++i)
        pool_table.rows.push_back({pool.at(i, 0), pool.at(i, 1)});
    csv::write_table(path_in_out(cfg, "pool.csv"), pool_table);

    std::string reference_note = "gevd descriptor (analytic quantiles)";
    if (cfg.reference_kind == ReferenceKind::kAnalytic) {
        const auto reference = reference_distribution(
            ctx.toy_spec, cfg.n_reference, sub_seed(cfg.seed, SeedPurpose::kReference));
        reference.save_csv(path_in_out(cfg, "reference.csv"));
        reference_note = std::to_string(reference.size()) + " samples";
    } else if (cfg.reference_kind == ReferenceKind::kCsv) {
        if (!fs::exists(cfg.reference_path))
            throw UsageError("missing data file: " + cfg.reference_path);
        const auto reference = EmpiricalDistribution::load_csv(cfg.reference_path);
        reference.save_csv(path_in_out(cfg, "reference.csv"));
        reference_note = std::to_string(reference.size()) + " samples (copied)";
    }
    echo_config(cfg);

    double max_y = data.observables.front();
    for (double y : data.observables) max_y = std::max(max_y, y);
    std::ostringstream summary;
    summary << "dataset: " << data.inputs.rows << " rows, observable max "
            << csv::format_double(max_y) << "\npool: " << pool.rows << " rows\nreference: "
            << reference_note << "\nwrote " << cfg.out;
    say(cfg, summary.str());
}

void cmd_train(const ExperimentConfig& cfg, const std::string& mode) {
    if (mode != "erm" && mode != "eta") throw UsageError("train mode must be erm or eta");
    ensure_out_dir(cfg);
    const ProblemContext ctx = problem_context(cfg);

    const std::string dataset_path = cfg.problem == Problem::kCustomCsv
                                         ? cfg.dataset_csv
                                         : path_in_out(cfg, "dataset.csv");
    if (dataset_path.empty()) throw UsageError("custom-csv training needs dataset_csv");
    const Dataset data = load_dataset_csv(dataset_path, *ctx.g);

    MlpParams init;
    if (!cfg.init_checkpoint.empty()) {
        if (!fs::exists(cfg.init_checkpoint))
            throw UsageError("missing data file: " + cfg.init_checkpoint);
        try {
            init = MlpParams::load_json(cfg.init_checkpoint);
        } catch (const std::runtime_error& e) {
            throw UsageError(e.what());
        }
    } else {
        Rng rng(sub_seed(cfg.seed, SeedPurpose::kModelInit));
        init = MlpParams::glorot_init(model_dims(cfg, data.inputs.cols, data.states.cols), rng);
    }

    if (mode == "erm") {
        run_erm_phase(cfg, data, std::move(init));
        echo_config(cfg);
        say(cfg, "erm training done: " + path_in_out(cfg, "erm_checkpoint.json"));
        return;
    }

    // eta mode: pull in pool + reference, reuse or produce the ERM start
    const std::string pool_path =
        cfg.problem == Problem::kCustomCsv ? cfg.pool_csv : path_in_out(cfg, "pool.csv");
    if (pool_path.empty()) throw UsageError("custom-csv training needs pool_csv");
    const Matrix pool = load_pool_csv(pool_path, data.inputs.cols);
    const Reference reference = load_reference(cfg);
    const QuantileSet q_set = resolve_quantile_set(cfg);

    MlpParams pretrained;
    if (!cfg.init_checkpoint.empty()) {
        pretrained = std::move(init);
    } else if (fs::exists(path_in_out(cfg, "erm_checkpoint.json"))) {
        pretrained = MlpParams::load_json(path_in_out(cfg, "erm_checkpoint.json"));
    } else {
        pretrained = run_erm_phase(cfg, data, std::move(init));
    }

    EtaConfig eta_cfg;
    eta_cfg.lambda = cfg.lambda;
    eta_cfg.tau = cfg.tau;
    eta_cfg.omega = cfg.omega;
    eta_cfg.steps = cfg.steps_eta;
    eta_cfg.lr = cfg.lr;
    eta_cfg.seed = sub_seed(cfg.seed, SeedPurpose::kShuffle);
    eta_cfg.pool_size = pool.rows;
    eta_cfg.batch = cfg.batch;

    TrainLog log;
    MlpParams model;
    try {
        model = train_iict(data, pool, q_set, reference.quantile, eta_cfg,
                           std::move(pretrained), *ctx.g, make_hook(cfg, log, "eta_checkpoint"));
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }
    model.save_json(path_in_out(cfg, "eta_checkpoint.json"));
    csv::write_table(path_in_out(cfg, "eta_log.csv"), log.table);
    echo_config(cfg);
    say(cfg, "eta training done: " + path_in_out(cfg, "eta_checkpoint.json"));
}

void cmd_eval(const ExperimentConfig& cfg, const std::vector<std::string>& checkpoints) {
    if (checkpoints.empty()) throw UsageError("eval needs at least one --checkpoint");
    ensure_out_dir(cfg);
    const ProblemContext ctx = problem_context(cfg);
    const Reference reference = load_reference(cfg);
    const QuantileSet q_set = resolve_quantile_set(cfg);

    Matrix eval_x;
    if (cfg.problem == Problem::kCustomCsv) {
        if (cfg.pool_csv.empty()) throw UsageError("custom-csv eval needs pool_csv");
        eval_x = load_pool_csv(cfg.pool_csv, 0);
    } else {
        eval_x = sample_inputs(cfg.n_eval, cfg.sigma2, sub_seed(cfg.seed, SeedPurpose::kEval));
    }

    // truth values back every toy evaluation
    std::vector<double> truth_vals;
    if (ctx.analytic) {
        truth_vals.resize(eval_x.rows);
        for (std::size_t i = 0; i < eval_x.rows; ++i)
            truth_vals[i] = analytic_observable(ctx, eval_x.row(i));
    }

    struct Entry {
        std::string name;
        std::vector<double> values;
    };
    std::vector<Entry> entries;
    for (const auto& ckpt : checkpoints) {
        Entry e;
        if (ckpt == "truth") {
            if (!ctx.analytic) throw UsageError("truth pseudo-checkpoint needs a toy problem");
            e.name = "truth_model";
            e.values = truth_vals;
        } else {
            if (!fs::exists(ckpt)) throw UsageError("missing data file: " + ckpt);
            MlpParams model;
            try {
                model = MlpParams::load_json(ckpt);
            } catch (const std::runtime_error& ex) {
                throw UsageError(ex.what());
            }
            if (model.input_dim() != eval_x.cols)
                throw UsageError("checkpoint input dimension mismatch: " + ckpt);
            e.name = fs::path(ckpt).stem().string();
            e.values = push_forward(model, *ctx.g, eval_x);
        }
        entries.push_back(std::move(e));
    }

    // tail-W1 table: every model against the reference quantiles
    {
        std::ostringstream body;
        body << "model,tail_w1,w1_grid\n";
        for (const auto& e : entries) {
            EmpiricalDistribution push(e.values);
            double tail_acc = 0.0, grid_acc = 0.0;
            std::size_t tail_n = 0;
            for (double q : q_set.probs) {
                const double diff = std::abs(push.quantile(q) - reference.quantile(q));
                grid_acc += diff;
                if (q >= cfg.tail_eval_min_q) {
                    tail_acc += diff;
                    ++tail_n;
                }
            }
            if (tail_n == 0) throw UsageError("no quantile levels at or above tail_eval_min_q");
            body << e.name << ',' << csv::format_double(tail_acc / tail_n) << ','
                 << csv::format_double(grid_acc / q_set.size()) << '\n';
        }
        csv::write_text(path_in_out(cfg, "tail_w1.csv"), body.str());
    }

    // shared-grid KDE export (truth column first when available)
    {
        std::vector<NamedSamples> sets;
        if (ctx.analytic) sets.push_back({"truth", truth_vals});
        for (const auto& e : entries) sets.push_back({e.name, e.values});
        pdf_compare_export(path_in_out(cfg, "pdf_compare.csv"), sets);
    }

    // conditional-mean / weighted-coverage tables over reference thresholds
    {
        std::ostringstream body;
        body << "t";
        std::vector<const Entry*> cols;
        if (ctx.analytic) body << ",m_truth,c_truth";
        for (const auto& e : entries) {
            body << ",m_" << e.name << ",c_" << e.name;
            cols.push_back(&e);
        }
        body << '\n';
        for (double q : cfg.threshold_qs) {
            const double t = reference.quantile(q);
            body << csv::format_double(t);
            auto emit = [&](const std::vector<double>& values) {
                double m = std::numeric_limits<double>::quiet_NaN();
                double c = std::numeric_limits<double>::quiet_NaN();
                try {
                    m = conditional_mean(values, t);
                } catch (const std::exception&) {
                }
                try {
                    c = weighted_coverage(values, t);
                } catch (const std::exception&) {
                }
                body << ',' << csv::format_double(m) << ',' << csv::format_double(c);
            };
            if (ctx.analytic) emit(truth_vals);
            for (const auto* e : cols) emit(e->values);
            body << '\n';
        }
        csv::write_text(path_in_out(cfg, "thresholds.csv"), body.str());
    }

    // data-consistency diagnostics need the analytic truth
    if (ctx.analytic) {
        const double t_star = reference.quantile(cfg.consistency_q);
        for (const auto& e : entries) {
            try {
                const auto report = data_consistency_report(truth_vals, e.values, t_star);
                csv::write_text(path_in_out(cfg, "consistency_" + e.name + ".json"),
                                consistency_report_to_json(report));
            } catch (const std::runtime_error& ex) {
                throw NumericalError(ex.what());
            }
        }
    }
    echo_config(cfg);
    say(cfg, "eval wrote tail_w1.csv, pdf_compare.csv, thresholds.csv in " + cfg.out);
}

void cmd_bounds_check(const ExperimentConfig& cfg, std::size_t trials, bool inject_fault) {
    if (trials < 1) throw UsageError("trials must be >= 1");
    ensure_out_dir(cfg);
    Rng rng(sub_seed(cfg.seed, SeedPurpose::kBounds));

    auto random_values = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-10, 10);
        return v;
    };
    auto fail = [&](const std::string& suite, const nlohmann::json& instance) {
        nlohmann::json j;
        j["violation"] = suite;
        j["instance"] = instance;
        csv::write_text(path_in_out(cfg, "bounds_report.json"), j.dump(2) + "\n");
        throw PropertyViolation(suite + " violated; instance dumped to " +
                                path_in_out(cfg, "bounds_report.json"));
    };

    for (std::size_t trial = 0; trial < trials; ++trial) {
        // exact-oracle equivalence on small equal-size pairs
        {
            const std::size_t n = 2 + rng.below(6);
            const auto a = random_values(n);
            const auto b = random_values(n);
            const EmpiricalDistribution da(a), db(b);
            double w1 = w1_empirical(da, db);
            if (inject_fault) w1 += 0.1;
            const double oracle = w1_bruteforce_oracle(da, db);
            if (std::abs(w1 - oracle) > 1e-12) {
                fail("w1_oracle_equivalence",
                     {{"a", a}, {"b", b}, {"w1", w1}, {"oracle", oracle}});
            }
        }
        // sandwich bounds on paired evaluations
        {
            const std::size_t n = 1 + rng.below(40);
            const auto y1 = random_values(n);
            const auto y2 = random_values(n);
            auto report = check_w1_bounds(y1, y2);
            if (inject_fault) {
                report.w1 = report.upper_coupled_mean_abs + 1.0;
                report.satisfied = false;
            }
            if (!report.satisfied) {
                fail("w1_sandwich_bounds",
                     {{"y1", y1}, {"y2", y2}, {"report", nlohmann::json::parse(
                                                   bound_report_to_json(report))}});
            }
        }
        // Wp bound suite with monotonicity in p
        {
            const std::size_t n = 2 + rng.below(30);
            const auto y1 = random_values(n);
            const auto y2 = random_values(n);
            double prev_wp = 0.0;
            for (double p : {1.0, 2.0, 3.0}) {
                const auto report = check_wp_bounds(y1, y2, p);
                if (!report.satisfied || report.wp + 1e-10 < prev_wp) {
                    fail("wp_bound_suite", {{"p", p}, {"y1", y1}, {"y2", y2}});
                }
                prev_wp = report.wp;
            }
        }
    }

    nlohmann::json j;
    j["trials"] = trials;
    j["suites"] = {"w1_oracle_equivalence", "w1_sandwich_bounds", "wp_bound_suite"};
    j["violations"] = 0;
    csv::write_text(path_in_out(cfg, "bounds_report.json"), j.dump(2) + "\n");
    say(cfg, "bounds-check passed " + std::to_string(trials) + " trials");
}

void cmd_gevd_fit(const ExperimentConfig& cfg, const std::string& samples_csv,
                  const std::string& out_json) {
    if (!fs::exists(samples_csv)) throw UsageError("missing data file: " + samples_csv);
    std::vector<double> samples;
    try {
        samples = csv::read_column(samples_csv);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    GevdFitResult fit;
    try {
        fit = gevd_fit_mle_detailed(samples);
    } catch (const std::exception& e) {
        throw NumericalError(e.what());
    }
    gevd_save_json(out_json, fit.params);
    say(cfg, "fit: kappa=" + csv::format_double(fit.params.kappa) +
                 " zeta=" + csv::format_double(fit.params.zeta) +
                 " sigma=" + csv::format_double(fit.params.sigma) +
                 " nll=" + csv::format_double(fit.nll));
}

void cmd_gevd_quantile(const ExperimentConfig& cfg, const std::string& params_json,
                       const std::vector<double>& direct_params, double gamma,
                       const std::vector<double>& levels) {
    if (levels.empty()) throw UsageError("gevd quantile needs at least one --q level");
    GevdParams params;
    bool truncated = false;
    double effective_gamma = 0.0;
    if (!params_json.empty()) {
        if (!fs::exists(params_json)) throw UsageError("missing data file: " + params_json);
        GevdDescriptor desc;
        try {
            desc = gevd_load_json(params_json);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        params = desc.params;
        truncated = desc.truncated;
        effective_gamma = desc.gamma;
    } else if (direct_params.size() == 3) {
        params = {direct_params[0], direct_params[1], direct_params[2]};
    } else {
        throw UsageError("gevd quantile needs --params-json or --kappa/--zeta/--sigma");
    }
    if (gamma > 0.0) {
        truncated = true;
        effective_gamma = gamma;
    }
    if (!(params.sigma > 0.0)) throw UsageError("sigma must be positive");

    std::ostringstream body;
    body << "q,value\n";
    try {
        if (truncated) {
            const auto tg = make_truncated_gevd(params, effective_gamma);
            for (double q : levels)
                body << csv::format_double(q) << ','
                     << csv::format_double(truncated_gevd_quantile(tg, q)) << '\n';
        } else {
            for (double q : levels)
                body << csv::format_double(q) << ',' << csv::format_double(gevd_quantile(params, q))
                     << '\n';
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::fputs(body.str().c_str(), stdout);
    (void)cfg;
}

}  // namespace eta::cli
