#include "eta/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eta/csv.hpp"
#include "json.hpp"

namespace eta {

namespace {

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("empty distribution");
    for (double v : samples_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("empirical distribution requires finite samples");
    }
    std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::mean() const { return sample_mean(samples_); }

double EmpiricalDistribution::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("quantile level must be in [0,1]");
    const auto n = samples_.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return samples_[rank - 1];
}

void EmpiricalDistribution::save_csv(const std::string& path) const {
    csv::write_column(path, samples_);
}

EmpiricalDistribution EmpiricalDistribution::load_csv(const std::string& path) {
    return EmpiricalDistribution(csv::read_column(path));
}

QuantileSet::QuantileSet(std::vector<double> probs_in, double tau_in)
    : probs(std::move(probs_in)), tau(tau_in) {
    if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("tau must be in [0,1)");
    double prev = -1.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("quantile level outside [0,1]");
        if (!(p > prev)) throw std::invalid_argument("quantile levels must be strictly increasing");
        prev = p;
    }
    if (tau > 0.0 && !probs.empty() && probs.front() < tau)
        throw std::invalid_argument("quantile levels must be >= tau");
}

std::vector<double> linsp(double a, double b, std::size_t n) {
    if (n < 2) throw std::invalid_argument("linsp requires n >= 2");
    if (!(a <= b)) throw std::invalid_argument("linsp requires a <= b");
    std::vector<double> out(n);
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + static_cast<double>(i) * step;
    out.back() = b;  // endpoint exact so shared block boundaries dedup cleanly
    return out;
}

QuantileSet build_quantile_set(const std::vector<LinspBlock>& blocks, double tau) {
    std::vector<double> all;
    for (const auto& blk : blocks) {
        const auto pts = linsp(blk.a, blk.b, blk.n);
        for (double p : pts) {
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("quantile block value outside [0,1]");
            all.push_back(p);
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return QuantileSet(std::move(all), tau);
}

double gevd_pdf(const GevdParams& params, double y) {
    if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const double z = (y - params.zeta) / params.sigma;
    if (std::abs(params.kappa) <= kGevdKappaEps) {
        // Gumbel branch
        const double e = std::exp(-z);
        return std::exp(-z - e) / params.sigma;
    }
    const double t = 1.0 + params.kappa * z;
    if (t <= 0.0) return 0.0;  // outside the support
    const double inv_kappa = 1.0 / params.kappa;
    return std::pow(t, -(1.0 + inv_kappa)) * std::exp(-std::pow(t, -inv_kappa)) / params.sigma;
}

double gevd_cdf(const GevdParams& params, double y) {
    if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const double z = (y - params.zeta) / params.sigma;
    if (std::abs(params.kappa) <= kGevdKappaEps) {
        return std::exp(-std::exp(-z));
    }
    const double t = 1.0 + params.kappa * z;
    if (t <= 0.0) return params.kappa > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::pow(t, -1.0 / params.kappa));
}

double gevd_quantile(const GevdParams& params, double q) {
    if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must be in (0,1)");
    const double lnq = -std::log(q);
    if (std::abs(params.kappa) <= kGevdKappaEps) {
        return params.zeta - params.sigma * std::log(lnq);
    }
    return params.zeta + params.sigma / params.kappa * (std::pow(lnq, -params.kappa) - 1.0);
}

TruncatedGevd::TruncatedGevd(const GevdParams& base_in, double gamma_in, double cutoff_in)
    : base(base_in), gamma(gamma_in), cutoff(cutoff_in) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    const double expected = gevd_quantile(base, 1.0 - gamma);
    if (std::abs(cutoff - expected) > 1e-9 * (1.0 + std::abs(expected)))
        throw std::invalid_argument("cutoff inconsistent with gamma");
}

TruncatedGevd make_truncated_gevd(const GevdParams& base, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    return TruncatedGevd(base, gamma, gevd_quantile(base, 1.0 - gamma));
}

double truncated_gevd_quantile(const TruncatedGevd& tg, double q) {
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("truncated quantile level must be in (0,1]");
    return gevd_quantile(tg.base, q * (1.0 - tg.gamma));
}

double gevd_nll(const GevdParams& params, const std::vector<double>& samples) {
    if (!(params.sigma > 0.0)) return std::numeric_limits<double>::infinity();
    const double log_sigma = std::log(params.sigma);
    double nll = 0.0;
    if (std::abs(params.kappa) <= kGevdKappaEps) {
        for (double y : samples) {
            const double z = (y - params.zeta) / params.sigma;
            nll += log_sigma + z + std::exp(-z);
        }
        return nll;
    }
    const double inv_kappa = 1.0 / params.kappa;
    for (double y : samples) {
        const double t = 1.0 + params.kappa * (y - params.zeta) / params.sigma;
        if (t <= 0.0) return std::numeric_limits<double>::infinity();  // sample outside support
        const double log_t = std::log(t);
        nll += log_sigma + (1.0 + inv_kappa) * log_t + std::exp(-inv_kappa * log_t);
    }
    return nll;
}

namespace {

// Nelder-Mead on (kappa, zeta, s = log sigma). The log-sigma
// reparameterization keeps the scale positive; infeasible points score +inf.
double nm_objective(const std::vector<double>& samples, const std::array<double, 3>& p) {
    GevdParams g;
    g.kappa = p[0];
    g.zeta = p[1];
    g.sigma = std::exp(p[2]);
    if (!std::isfinite(g.sigma) || g.sigma <= 0.0)
        return std::numeric_limits<double>::infinity();
    return gevd_nll(g, samples);
}

std::array<double, 3> nelder_mead(const std::vector<double>& samples,
                                  std::array<double, 3> start) {
    constexpr int kDim = 3;
    constexpr int kMaxIter = 4000;
    constexpr double kTolF = 1e-10;

    std::array<std::array<double, 3>, kDim + 1> pts;
    std::array<double, kDim + 1> fv;
    pts[0] = start;
    for (int i = 0; i < kDim; ++i) {
        pts[i + 1] = start;
        const double step = (std::abs(start[i]) > 1e-3) ? 0.1 * std::abs(start[i]) : 0.05;
        pts[i + 1][i] += step;
    }
    for (int i = 0; i <= kDim; ++i) fv[i] = nm_objective(samples, pts[i]);

    for (int iter = 0; iter < kMaxIter; ++iter) {
        // order ascending by objective
        std::array<int, kDim + 1> idx{0, 1, 2, 3};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::array<std::array<double, 3>, kDim + 1> sp;
        std::array<double, kDim + 1> sf;
        for (int i = 0; i <= kDim; ++i) {
            sp[i] = pts[idx[i]];
            sf[i] = fv[idx[i]];
        }
        pts = sp;
        fv = sf;

        if (std::isfinite(fv[kDim]) && std::abs(fv[kDim] - fv[0]) <= kTolF * (1.0 + std::abs(fv[0])))
            break;

        std::array<double, 3> centroid{0, 0, 0};
        for (int i = 0; i < kDim; ++i)
            for (int d = 0; d < 3; ++d) centroid[d] += pts[i][d] / kDim;

        auto blend = [&](double coef) {
            std::array<double, 3> p;
            for (int d = 0; d < 3; ++d) p[d] = centroid[d] + coef * (pts[kDim][d] - centroid[d]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = nm_objective(samples, reflected);
        if (fr < fv[0]) {
            const auto expanded = blend(-2.0);
            const double fe = nm_objective(samples, expanded);
            if (fe < fr) {
                pts[kDim] = expanded;
                fv[kDim] = fe;
            } else {
                pts[kDim] = reflected;
                fv[kDim] = fr;
            }
            continue;
        }
        if (fr < fv[kDim - 1]) {
            pts[kDim] = reflected;
            fv[kDim] = fr;
            continue;
        }
        const auto contracted = blend(0.5);
        const double fc = nm_objective(samples, contracted);
        if (fc < fv[kDim]) {
            pts[kDim] = contracted;
            fv[kDim] = fc;
            continue;
        }
        for (int i = 1; i <= kDim; ++i) {  // shrink toward the best point
            for (int d = 0; d < 3; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
            fv[i] = nm_objective(samples, pts[i]);
        }
    }

    int best = 0;
    for (int i = 1; i <= kDim; ++i)
        if (fv[i] < fv[best]) best = i;
    return pts[best];
}

}  // namespace

GevdFitResult gevd_fit_mle_detailed(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("degenerate sample");
    for (double v : samples) {
        if (!std::isfinite(v)) throw std::invalid_argument("samples must be finite");
    }
    const double sd = sample_std(samples);
    if (!(sd > 0.0)) throw std::invalid_argument("degenerate sample");

    // Gumbel moment initializer
    const double euler_gamma = 0.57721566490153286;
    const double sigma0 = sd * std::sqrt(6.0) / 3.14159265358979323846;
    const double zeta0 = sample_mean(samples) - euler_gamma * sigma0;
    std::array<double, 3> start{0.1, zeta0, std::log(sigma0)};

    GevdParams init;
    init.kappa = 0.0;
    init.zeta = zeta0;
    init.sigma = sigma0;
    const double initial_nll = gevd_nll(init, samples);

    auto best = nelder_mead(samples, start);
    best = nelder_mead(samples, best);  // restart once to polish

    GevdParams fit;
    fit.kappa = best[0];
    fit.zeta = best[1];
    fit.sigma = std::exp(best[2]);
    double nll = gevd_nll(fit, samples);
    if (!std::isfinite(nll) || nll > initial_nll) {
        // fall back to the feasible initializer rather than a worse optimum
        fit = init;
        nll = initial_nll;
    }
    return GevdFitResult{fit, nll, initial_nll};
}

GevdParams gevd_fit_mle(const std::vector<double>& samples) {
    return gevd_fit_mle_detailed(samples).params;
}

std::string gevd_to_json(const GevdParams& params) {
    nlohmann::json j;
    j["kappa"] = params.kappa;
    j["zeta"] = params.zeta;
    j["sigma"] = params.sigma;
    return j.dump(2) + "\n";
}

std::string truncated_gevd_to_json(const TruncatedGevd& tg) {
    nlohmann::json j;
    j["kappa"] = tg.base.kappa;
    j["zeta"] = tg.base.zeta;
    j["sigma"] = tg.base.sigma;
    j["gamma"] = tg.gamma;
    j["cutoff"] = tg.cutoff;
    return j.dump(2) + "\n";
}

void gevd_save_json(const std::string& path, const GevdParams& params) {
    csv::write_text(path, gevd_to_json(params));
}

void truncated_gevd_save_json(const std::string& path, const TruncatedGevd& tg) {
    csv::write_text(path, truncated_gevd_to_json(tg));
}

GevdDescriptor gevd_load_json(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(csv::read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed GEVD descriptor " + path + ": " + e.what());
    }
    GevdDescriptor d;
    try {
        d.params.kappa = j.at("kappa").get<double>();
        d.params.zeta = j.at("zeta").get<double>();
        d.params.sigma = j.at("sigma").get<double>();
        if (j.contains("gamma")) {
            d.truncated = true;
            d.gamma = j.at("gamma").get<double>();
            d.cutoff = j.contains("cutoff") ? j.at("cutoff").get<double>()
                                            : gevd_quantile(d.params, 1.0 - d.gamma);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed GEVD descriptor " + path + ": " + e.what());
    }
    if (!(d.params.sigma > 0.0))
        throw std::runtime_error("GEVD descriptor has non-positive sigma: " + path);
    return d;
}

double scott_bandwidth(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    const double n = static_cast<double>(samples.size());
    return sample_std(samples) * std::pow(n, -0.2);
}

std::vector<double> kde_pdf(const std::vector<double>& samples,
                            const std::vector<double>& grid) {
    return kde_pdf(samples, grid, scott_bandwidth(samples));
}

std::vector<double> kde_pdf(const std::vector<double>& samples,
                            const std::vector<double>& grid, double bandwidth) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    if (grid.empty()) throw std::invalid_argument("empty grid");
    const double h = bandwidth;
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");

    const double inv_norm = 1.0 / (static_cast<double>(samples.size()) * h *
                                   std::sqrt(2.0 * 3.14159265358979323846));
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double acc = 0.0;
        for (double x : samples) {
            const double u = (grid[k] - x) / h;
            acc += std::exp(-0.5 * u * u);
        }
        density[k] = acc * inv_norm;
    }
    return density;
}

}  // namespace eta
