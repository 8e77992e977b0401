// Acceptance suite: runs every contract the artifact must satisfy, one
// criterion per line, at the tolerances fixed below. The toy experiment
// criteria train the full recipes, so a complete run takes ~25 minutes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eta/csv.hpp"
#include "eta/distributions.hpp"
#include "eta/metrics.hpp"
#include "eta/model.hpp"
#include "eta/problems.hpp"
#include "eta/training.hpp"
#include "eta/wasserstein.hpp"

using namespace eta;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -10, double hi = 10) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// ---------------------------------------------------------------- 1
void criterion_1() {
    const auto start = Clock::now();
    Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        const EmpiricalDistribution a(random_values(rng, n));
        const EmpiricalDistribution b(random_values(rng, n));
        worst = std::max(worst, std::abs(w1_empirical(a, b) - w1_bruteforce_oracle(a, b)));
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-12 && elapsed < 10.0,
           "W1 oracle equivalence over 500 pairs (max |diff| = " + fmt(worst) + ", " +
               fmt(elapsed) + " s)");
}

// ---------------------------------------------------------------- 2
void criterion_2() {
    const auto start = Clock::now();
    Rng rng(1002);
    bool all_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        const auto y1 = random_values(rng, n);
        const auto y2 = random_values(rng, n);
        const auto rep = check_w1_bounds(y1, y2);
        const double tol = 1e-9 * (1.0 + std::abs(rep.w1));
        all_ok = all_ok && rep.lower_mean_diff <= rep.w1 + tol &&
                 rep.w1 <= rep.upper_coupled_mean_abs + tol;
    }
    const double elapsed = seconds_since(start);
    report(2, all_ok && elapsed < 10.0,
           "sandwich bounds on 1000 paired instances (" + fmt(elapsed) + " s)");
}

// ---------------------------------------------------------------- 3
void criterion_3() {
    const auto start = Clock::now();
    Rng rng(1003);
    bool all_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        const auto y1 = random_values(rng, n);
        const auto y2 = random_values(rng, n);
        double prev = 0.0;
        for (double p : {1.0, 2.0, 3.0}) {
            const auto rep = check_wp_bounds(y1, y2, p);
            all_ok = all_ok && rep.satisfied && rep.wp + 1e-10 >= prev;
            prev = rep.wp;
        }
    }
    const double elapsed = seconds_since(start);
    report(3, all_ok && elapsed < 30.0,
           "Wp bound suite, p in {1,2,3}, 1000 instances, monotone in p (" + fmt(elapsed) +
               " s)");
}

// ---------------------------------------------------------------- 4
void criterion_4() {
    struct Setup {
        std::vector<std::size_t> dims;
        std::string observable;
    };
    const std::vector<Setup> setups = {
        {{2, 16, 16, 1}, "identity"}, {{3, 8, 2}, "max"},
        {{2, 10, 10, 2}, "weighted_abs:2,0.5"}, {{1, 6, 6, 1}, "identity"},
        {{4, 12, 3}, "max"},
    };
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(4000 + seed);
        const auto& setup = setups[seed % setups.size()];
        const auto g = make_observable(setup.observable);
        MlpParams params = MlpParams::glorot_init(setup.dims, rng);
        const double lambda = 0.5 + rng.uniform();

        Matrix inputs(12, setup.dims.front());
        for (auto& v : inputs.data) v = rng.normal();
        Matrix targets(12, setup.dims.back());
        for (auto& v : targets.data) v = rng.normal();

        Matrix pool(60, setup.dims.front());
        for (auto& v : pool.data) v = rng.normal();
        const QuantileSet q_set({0.1, 0.4, 0.8, 0.95, 0.99}, 0.0);
        const IndexSets idx = update_index(params, *g, q_set, pool);
        std::vector<double> refs(q_set.size());
        for (auto& r : refs) r = rng.uniform(-2, 2);

        const auto objective = [&](const MlpParams& p) {
            return erm_loss(p, inputs, targets) +
                   lambda * w1_tail_loss(p, *g, idx, refs, pool);
        };
        std::vector<double> grad(params.param_count(), 0.0);
        erm_loss(params, inputs, targets, &grad);
        w1_tail_loss(params, *g, idx, refs, pool, &grad, lambda);

        MlpParams p = params;
        const double h = 1e-5;
        for (std::size_t i = 0; i < p.param_count(); ++i) {
            const double saved = p.flat()[i];
            p.flat()[i] = saved + h;
            const double up = objective(p);
            p.flat()[i] = saved - h;
            const double down = objective(p);
            p.flat()[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-4});
            worst = std::max(worst, std::abs(fd - grad[i]) / denom);
        }
    }
    report(4, worst < 1e-5,
           "gradient fidelity of erm + lambda*tail over 10 architectures (max rel err = " +
               fmt(worst) + ")");
}

// ---------------------------------------------------------------- 5
void criterion_5() {
    // (a) quantile/CDF round trip
    Rng rng(1005);
    double worst_rt = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        GevdParams params;
        params.kappa = rng.uniform(-0.4, 0.5);
        params.zeta = rng.uniform(-5, 30);
        params.sigma = rng.uniform(0.5, 5);
        for (double q = 0.01; q <= 0.999; q += 0.007) {
            const double back = gevd_cdf(params, gevd_quantile(params, q));
            worst_rt = std::max(worst_rt, std::abs(back - q));
        }
    }
    const bool pass_a = worst_rt < 1e-7;

    // (b) precipitation GEVD fit: kappa = +0.179 in the formula convention
    // (equals -0.179 in the scipy genextreme convention)
    const GevdParams precip{0.179, 25.077, 25.928};
    const auto tg = make_truncated_gevd(precip, 0.00470);
    const double cutoff = truncated_gevd_quantile(tg, 1.0);
    const bool pass_b = std::abs(cutoff - 258.0) <= 0.5;

    // (c) MLE recovery on synthetic Gumbel(5, 2)
    Rng grng(1105);
    std::vector<double> samples(10000);
    for (auto& v : samples) {
        double u = grng.uniform();
        while (u <= 0.0) u = grng.uniform();
        v = 5.0 - 2.0 * std::log(-std::log(u));
    }
    const auto fit = gevd_fit_mle(samples);
    const bool pass_c = std::abs(fit.kappa) < 0.05 && std::abs(fit.zeta - 5.0) < 0.1 &&
                        std::abs(fit.sigma - 2.0) < 0.1;

    report(5, pass_a && pass_b && pass_c,
           "GEVD round trip (max |dq| = " + fmt(worst_rt) + "), truncation point " +
               fmt(cutoff) + " within 258.0 +- 0.5, MLE fit kappa=" + fmt(fit.kappa) +
               " zeta=" + fmt(fit.zeta) + " sigma=" + fmt(fit.sigma));
}

// ------------------------------------------------------- toy harness
struct ToyRun {
    Dataset data;
    EmpiricalDistribution reference{std::vector<double>{0.0}};
    Matrix pool;
    Matrix eval_inputs;
    QuantileSet q_set;
    std::unique_ptr<Observable> g;
    MlpParams erm;
    double erm_tail = 0.0;
    double erm_rmse = 0.0;
    std::vector<double> truth_vals;  // analytic observable on the eval set
};

double in_sample_rmse(const MlpParams& model, const Dataset& data) {
    const Matrix out = mlp_forward(model, data.inputs);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double r = out.data[i] - data.states.data[i];
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(data.inputs.rows));
}

std::vector<double> push_forward_values(const MlpParams& model, const Observable& g,
                                        const Matrix& inputs) {
    const Matrix outs = mlp_forward(model, inputs);
    std::vector<double> vals(outs.rows);
    for (std::size_t i = 0; i < outs.rows; ++i) vals[i] = g.value({outs.row(i), outs.cols});
    return vals;
}

double tail_w1_vs_reference(const std::vector<double>& push_vals,
                            const EmpiricalDistribution& reference, const QuantileSet& q_set,
                            double min_q) {
    const EmpiricalDistribution push(push_vals);
    double acc = 0.0;
    std::size_t count = 0;
    for (double q : q_set.probs) {
        if (q < min_q) continue;
        acc += std::abs(push.quantile(q) - reference.quantile(q));
        ++count;
    }
    return acc / static_cast<double>(count);
}

constexpr std::uint64_t kRecipeSeed = 123;  // shipped default

ToyRun prepare_toy(bool two_d) {
    ToyRun run;
    const ToyProblemSpec spec = two_d ? toy2d_spec() : toy1d_spec();
    run.g = two_d ? make_weighted_abs_observable({2.0, 0.5})
                  : make_identity_observable();
    run.data = build_training_set(100, kDefaultExclusionCenter, kDefaultExclusionRadius, 10.0,
                                  kRecipeSeed, spec);
    run.reference = reference_distribution(spec, 1000000, kRecipeSeed + 1000);
    run.pool = sample_inputs(10000, 10.0, kRecipeSeed + 2000);
    run.eval_inputs = sample_inputs(100000, 10.0, kRecipeSeed + 3000);
    run.q_set = build_quantile_set(two_d ? toy2d_quantile_blocks() : toy1d_quantile_blocks(), 0.0);

    Rng init_rng(kRecipeSeed + 4000);
    const std::size_t out_dim = two_d ? 2 : 1;
    MlpParams init = MlpParams::glorot_init({2, 256, 256, 256, out_dim}, init_rng);
    OptimizerConfig opt;
    opt.lr = 1e-3;
    run.erm = train_erm(run.data, std::move(init), opt, 3000);
    run.erm_tail = tail_w1_vs_reference(push_forward_values(run.erm, *run.g, run.eval_inputs),
                                        run.reference, run.q_set, 0.9);
    run.erm_rmse = in_sample_rmse(run.erm, run.data);

    run.truth_vals.resize(run.eval_inputs.rows);
    for (std::size_t i = 0; i < run.eval_inputs.rows; ++i) {
        const double x1 = run.eval_inputs.at(i, 0);
        const double x2 = run.eval_inputs.at(i, 1);
        if (two_d) {
            double u1, u2;
            toy2d_u(x1, x2, u1, u2);
            run.truth_vals[i] = toy2d_g(u1, u2);
        } else {
            run.truth_vals[i] = toy1d_y(x1, x2);
        }
    }
    return run;
}

MlpParams run_iict(const ToyRun& run, double lambda, const RefreshHook& on_refresh = {}) {
    EtaConfig cfg;
    cfg.lambda = lambda;
    cfg.steps = 3000;
    cfg.omega = 30;
    cfg.lr = 1e-3;
    return train_iict(run.data, run.pool, run.q_set,
                      [&](double q) { return run.reference.quantile(q); }, cfg, run.erm, *run.g,
                      {}, on_refresh);
}

// ---------------------------------------------------------------- 6 + 7 + 9
// Returns the deferred criterion-9 printer so lines appear in order.
std::function<void()> criteria_6_7_9(ToyRun& toy1d) {
    const auto start = Clock::now();
    const MlpParams eta1 = run_iict(toy1d, 1.0);
    const double eta_tail = tail_w1_vs_reference(
        push_forward_values(eta1, *toy1d.g, toy1d.eval_inputs), toy1d.reference, toy1d.q_set,
        0.9);
    const double eta_rmse = in_sample_rmse(eta1, toy1d.data);
    const double elapsed = seconds_since(start);

    const double tail_ratio = eta_tail / toy1d.erm_tail;
    const double rmse_ratio = eta_rmse / toy1d.erm_rmse;
    const bool pass6 = tail_ratio <= 0.5 && rmse_ratio <= 2.0 && elapsed < 900.0;
    report(6, pass6,
           "toy 2D-to-1D recipe: tail-W1 eta/erm = " + fmt(eta_tail) + "/" +
               fmt(toy1d.erm_tail) + " = " + fmt(tail_ratio) +
               " (need <= 0.5); in-sample RMSE ratio = " + fmt(eta_rmse) + "/" +
               fmt(toy1d.erm_rmse) + " = " + fmt(rmse_ratio) + " (need <= 2); " + fmt(elapsed) +
               " s");

    // 7: lambda sweep reusing the shared ERM baseline and the lambda=1 run
    std::map<double, double> tails = {{1.0, eta_tail}};
    for (double lambda : {1e-4, 1e-2, 10.0}) {
        const MlpParams model = run_iict(toy1d, lambda);
        tails[lambda] = tail_w1_vs_reference(
            push_forward_values(model, *toy1d.g, toy1d.eval_inputs), toy1d.reference,
            toy1d.q_set, 0.9);
    }
    double lo = 1e300, hi = 0.0;
    bool all_beat = true;
    std::string detail;
    for (const auto& [lambda, tail] : tails) {
        lo = std::min(lo, tail);
        hi = std::max(hi, tail);
        all_beat = all_beat && tail < toy1d.erm_tail;
        detail += "l=" + fmt(lambda) + ":" + fmt(tail) + " ";
    }
    report(7, hi <= 3.0 * lo && all_beat,
           "lambda robustness: " + detail + "spread = " + fmt(hi / lo) +
               " (need <= 3), all below erm " + fmt(toy1d.erm_tail));

    // 9: data-consistency ratios of the ERM baseline at the 0.99 threshold
    const double t_star = toy1d.reference.quantile(0.99);
    const auto erm_vals = push_forward_values(toy1d.erm, *toy1d.g, toy1d.eval_inputs);
    const auto rep = data_consistency_report(toy1d.truth_vals, erm_vals, t_star);
    const bool pass9 = rep.ratios_defined && rep.c_tilde_hat < 1.0 && rep.c_hat_hat < 1.0;
    return [=] {
        report(9, pass9,
               "data-consistency exhibit at t* = " + fmt(t_star) + ": C~ = " +
                   fmt(rep.c_tilde_hat) + ", C^ = " + fmt(rep.c_hat_hat) +
                   " (need both < 1), K = " + fmt(rep.k_hat));
    };
}

// ---------------------------------------------------------------- 8
void criterion_8() {
    const auto start = Clock::now();
    ToyRun toy2d = prepare_toy(true);

    bool j_always_active = true;
    bool idempotent = true;
    std::size_t refreshes = 0;
    const MlpParams eta_model =
        run_iict(toy2d, 1.0, [&](const IndexSets& idx, const MlpParams& params, std::size_t) {
            ++refreshes;
            j_always_active = j_always_active && idx.component_indices.has_value();
            const IndexSets again = update_index(params, *toy2d.g, toy2d.q_set, toy2d.pool);
            idempotent = idempotent && again.input_indices == idx.input_indices &&
                         again.component_indices == idx.component_indices;
        });

    const double eta_tail = tail_w1_vs_reference(
        push_forward_values(eta_model, *toy2d.g, toy2d.eval_inputs), toy2d.reference,
        toy2d.q_set, 0.9);
    const double eta_rmse = in_sample_rmse(eta_model, toy2d.data);
    const double tail_ratio = eta_tail / toy2d.erm_tail;
    const double rmse_ratio = eta_rmse / toy2d.erm_rmse;
    const double elapsed = seconds_since(start);

    const bool pass = tail_ratio <= 0.5 && rmse_ratio <= 2.0 && j_always_active && idempotent &&
                      elapsed < 900.0;
    report(8, pass,
           "toy 2D-to-2D recipe: tail-W1 ratio = " + fmt(tail_ratio) +
               " (need <= 0.5); RMSE ratio = " + fmt(rmse_ratio) + " (need <= 2); J tracking " +
               (j_always_active ? "active" : "INACTIVE") + " over " + std::to_string(refreshes) +
               " refreshes, idempotent: " + (idempotent ? "yes" : "NO") + "; " + fmt(elapsed) +
               " s");
}

// ---------------------------------------------------------------- 10
struct CliRunner {
    std::string binary;

    int run(const std::string& args, std::string* output = nullptr) const {
        const std::string cmd = binary + " " + args + " 2>&1";
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return -1;
        std::string out;
        char buf[4096];
        while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
        const int status = pclose(pipe);
        if (output) *output = out;
        return WEXITSTATUS(status);
    }
};

void criterion_10(const std::string& cli) {
    if (cli.empty() || !fs::exists(cli)) {
        report(10, false, "determinism: eta binary not found (pass --cli PATH)");
        return;
    }
    CliRunner runner{cli};
    const fs::path dir = fs::temp_directory_path() / "eta_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const std::string args =
        "--out " + dir.string() +
        " --seed 99 --set n_train=30 pool_size=400 n_reference=15000 n_eval=1500 "
        "hidden=12,12 steps_erm=80 steps_eta=60 omega=20 "
        "'quantile_blocks=0:0.9:6;0.9:0.999:7' threshold_qs=0.5,0.9";

    const std::vector<std::string> commands = {
        "gen-data " + args,
        "train --mode eta " + args,
        "eval " + args + " --checkpoint " + (dir / "eta_checkpoint.json").string() +
            " --checkpoint truth",
        "bounds-check --trials 200 " + args,
    };
    const std::vector<std::string> artifacts = {
        "dataset.csv",    "pool.csv",        "reference.csv", "erm_checkpoint.json",
        "eta_checkpoint.json", "erm_log.csv", "eta_log.csv",  "tail_w1.csv",
        "pdf_compare.csv", "thresholds.csv", "bounds_report.json", "config_used.cfg",
    };

    bool ok = true;
    std::string reason;
    std::map<std::string, std::string> first_pass;
    for (int round = 0; round < 2 && ok; ++round) {
        for (const auto& cmd : commands) {
            std::string output;
            if (runner.run(cmd, &output) != 0) {
                ok = false;
                reason = "command failed: " + cmd + " :: " + output;
                break;
            }
        }
        if (!ok) break;
        for (const auto& name : artifacts) {
            const std::string content = csv::read_text((dir / name).string());
            if (round == 0) {
                first_pass[name] = content;
            } else if (first_pass[name] != content) {
                ok = false;
                reason = "artifact differs across reruns: " + name;
                break;
            }
        }
    }

    // gevd subcommands are deterministic too
    if (ok) {
        std::string q1, q2;
        runner.run("gevd quantile --kappa 0.179 --zeta 25.077 --sigma 25.928 --q 0.9 --q 0.9953",
                   &q1);
        runner.run("gevd quantile --kappa 0.179 --zeta 25.077 --sigma 25.928 --q 0.9 --q 0.9953",
                   &q2);
        if (q1 != q2 || q1.empty()) {
            ok = false;
            reason = "gevd quantile output differs across reruns";
        }
    }
    fs::remove_all(dir);
    report(10, ok, ok ? "determinism: all subcommand artifacts byte-identical across reruns"
                      : "determinism: " + reason);
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    }
    if (cli.empty()) {
        if (const char* env = std::getenv("ETA_CLI")) cli = env;
    }

    std::printf("acceptance suite (full run trains the toy recipes; ~25 min)\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();

    ToyRun toy1d = prepare_toy(false);
    const auto print_criterion_9 = criteria_6_7_9(toy1d);
    criterion_8();
    print_criterion_9();
    criterion_10(cli);

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
    } else {
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
