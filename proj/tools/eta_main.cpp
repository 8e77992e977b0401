// Experiment driver for tail-aware distribution-matched regression: data
// generation, ERM / eta training, evaluation, randomized bound checks, and
// GEVD utilities. Every subcommand is deterministic given (config, seed).
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

using eta::cli::ExperimentConfig;

struct GlobalArgs {
    std::optional<std::string> config_path;
    std::map<std::string, std::string> overrides;
    bool quiet = false;
};

ExperimentConfig resolve_config(const GlobalArgs& args) {
    ExperimentConfig cfg = eta::cli::load_config(args.config_path, args.overrides);
    cfg.quiet = args.quiet;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eta: tail-aware distribution-matched regression experiments"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    GlobalArgs global;
    std::vector<std::string> set_pairs;
    app.add_option("--config", global.config_path, "config file of key = value lines");
    app.add_option("--out", global.overrides["out"], "output directory");
    app.add_option("--seed", global.overrides["seed"], "master 64-bit seed");
    app.add_flag("--quiet", global.quiet, "suppress progress output");
    app.add_option("--set", set_pairs, "extra KEY=VALUE config overrides")->take_all();

    auto* gen = app.add_subcommand("gen-data", "write dataset, pool, and reference files");

    auto* train = app.add_subcommand("train", "train an ERM baseline or an eta model");
    std::string mode = "eta";
    train->add_option("--mode", mode, "erm | eta")->default_str("eta");
    train->add_option("--lambda", global.overrides["lambda"], "regularizer balance");
    train->add_option("--init-checkpoint", global.overrides["init_checkpoint"],
                      "start from an existing checkpoint");

    auto* eval = app.add_subcommand("eval", "evaluate checkpoints against the reference");
    std::vector<std::string> checkpoints;
    eval->add_option("--checkpoint", checkpoints,
                     "checkpoint json (repeatable); 'truth' evaluates the analytic map")
        ->take_all();

    auto* bounds = app.add_subcommand("bounds-check", "randomized transport-bound suites");
    std::size_t trials = 1000;
    bool inject_fault = false;
    bounds->add_option("--trials", trials, "number of randomized trials")->default_str("1000");
    bounds->add_flag("--inject-fault", inject_fault,
                     "negative control: corrupt the computed W1 and expect failure");

    auto* gevd = app.add_subcommand("gevd", "generalized extreme value utilities");
    gevd->require_subcommand(1);
    auto* fit = gevd->add_subcommand("fit", "maximum-likelihood fit from a samples CSV");
    std::string samples_csv, out_json = "gevd_fit.json";
    fit->add_option("--samples", samples_csv, "one observable value per line")->required();
    fit->add_option("--out-json", out_json, "where to write the fitted descriptor");
    auto* quant = gevd->add_subcommand("quantile", "closed-form (truncated) quantiles");
    std::string params_json;
    double kappa = 0.0, zeta = 0.0, sigma = 0.0, gamma = 0.0;
    std::vector<double> levels;
    quant->add_option("--params-json", params_json, "GEVD descriptor json");
    quant->add_option("--kappa", kappa, "shape (formula convention)");
    quant->add_option("--zeta", zeta, "location");
    quant->add_option("--sigma", sigma, "scale");
    quant->add_option("--gamma", gamma, "tail truncation probability");
    quant->add_option("--q", levels, "quantile levels (repeatable)")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            return app.exit(e);
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    // empty-string overrides from unset options must not clobber file values
    for (auto it = global.overrides.begin(); it != global.overrides.end();) {
        if (it->second.empty()) it = global.overrides.erase(it);
        else ++it;
    }
    for (const auto& pair : set_pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "error: --set expects KEY=VALUE, got '%s'\n", pair.c_str());
            return 2;
        }
        global.overrides[pair.substr(0, eq)] = pair.substr(eq + 1);
    }

    try {
        const ExperimentConfig cfg = resolve_config(global);
        if (gen->parsed()) {
            eta::cli::cmd_gen_data(cfg);
        } else if (train->parsed()) {
            eta::cli::cmd_train(cfg, mode);
        } else if (eval->parsed()) {
            eta::cli::cmd_eval(cfg, checkpoints);
        } else if (bounds->parsed()) {
            eta::cli::cmd_bounds_check(cfg, trials, inject_fault);
        } else if (fit->parsed()) {
            eta::cli::cmd_gevd_fit(cfg, samples_csv, out_json);
        } else if (quant->parsed()) {
            std::vector<double> direct;
            if (sigma != 0.0 || kappa != 0.0 || zeta != 0.0) direct = {kappa, zeta, sigma};
            eta::cli::cmd_gevd_quantile(cfg, params_json, direct, gamma, levels);
        }
    } catch (const eta::cli::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const eta::cli::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const eta::cli::PropertyViolation& e) {
        std::fprintf(stderr, "property violation: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
