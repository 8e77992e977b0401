#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace eta {

// Quantile function over (0,1]; q = 0 maps to the distribution minimum where
// the underlying law supports it.
using QuantileFn = std::function<double(double)>;

// Estimated 1D law backed by a sorted sample set. Quantiles are the
// ceil(q*n)-th order statistic (1-based), so the training-time index
// bookkeeping and the evaluation-time quantiles agree exactly.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }
    double min() const { return samples_.front(); }
    double max() const { return samples_.back(); }
    double mean() const;

    // q in [0,1]; q=0 returns the minimum.
    double quantile(double q) const;

    void save_csv(const std::string& path) const;
    static EmpiricalDistribution load_csv(const std::string& path);

private:
    std::vector<double> samples_;  // ascending, finite
};

// Ordered probability levels with a tail cutoff tau; the levels at or above
// tau drive the tail-emphasized W1 estimator.
struct QuantileSet {
    std::vector<double> probs;  // strictly increasing, all in [0,1]
    double tau = 0.0;           // in [0,1); if tau > 0 all probs are >= tau

    QuantileSet() = default;
    QuantileSet(std::vector<double> probs_in, double tau_in);

    std::size_t size() const { return probs.size(); }
};

// n evenly spaced points from a to b inclusive; n >= 2.
std::vector<double> linsp(double a, double b, std::size_t n);

struct LinspBlock {
    double a;
    double b;
    std::size_t n;
};

// Concatenates linsp blocks, removes exactly-equal duplicates, sorts
// ascending, and records tau. All values must lie in [0,1].
QuantileSet build_quantile_set(const std::vector<LinspBlock>& blocks, double tau);

// Generalized extreme value distribution, formula convention:
//   pdf(y) = (1/sigma) t^{-(1+1/kappa)} exp(-t^{-1/kappa}),  t = 1 + kappa (y-zeta)/sigma
// kappa > 0 is the heavy-tailed (Frechet) branch, kappa < 0 the bounded
// (Weibull) branch, |kappa| <= kGevdKappaEps falls back to Gumbel.
struct GevdParams {
    double kappa = 0.0;  // shape
    double zeta = 0.0;   // location
    double sigma = 1.0;  // scale, > 0
};

inline constexpr double kGevdKappaEps = 1e-8;

double gevd_pdf(const GevdParams& params, double y);
double gevd_cdf(const GevdParams& params, double y);
double gevd_quantile(const GevdParams& params, double q);  // q in (0,1)
double gevd_nll(const GevdParams& params, const std::vector<double>& samples);

// GEVD with its upper tail cut at probability gamma; the renormalized law has
// quantiles Q_gamma(q) = Q(q (1-gamma)).
struct TruncatedGevd {
    GevdParams base;
    double gamma = 0.0;   // tail probability in (0,1)
    double cutoff = 0.0;  // = gevd_quantile(base, 1-gamma)

    TruncatedGevd(const GevdParams& base_in, double gamma_in, double cutoff_in);
};

TruncatedGevd make_truncated_gevd(const GevdParams& base, double gamma);

// q in (0,1]; q=1 returns the cutoff.
double truncated_gevd_quantile(const TruncatedGevd& tg, double q);

// Maximum-likelihood fit via a derivative-free simplex on (kappa, zeta,
// log sigma), started from Gumbel moment estimates.
GevdParams gevd_fit_mle(const std::vector<double>& samples);

struct GevdFitResult {
    GevdParams params;
    double nll;
    double initial_nll;  // at the Gumbel moment initializer
};
GevdFitResult gevd_fit_mle_detailed(const std::vector<double>& samples);

// JSON descriptor {kappa, zeta, sigma, gamma?, cutoff?}.
std::string gevd_to_json(const GevdParams& params);
std::string truncated_gevd_to_json(const TruncatedGevd& tg);
void gevd_save_json(const std::string& path, const GevdParams& params);
void truncated_gevd_save_json(const std::string& path, const TruncatedGevd& tg);
// Returns TruncatedGevd when gamma is present, otherwise gamma = 0 marks a
// plain GEVD (cutoff unused).
struct GevdDescriptor {
    GevdParams params;
    bool truncated = false;
    double gamma = 0.0;
    double cutoff = 0.0;
};
GevdDescriptor gevd_load_json(const std::string& path);

// Gaussian-kernel density estimate on a grid; bandwidth must be positive.
std::vector<double> kde_pdf(const std::vector<double>& samples,
                            const std::vector<double>& grid, double bandwidth);

// Same with the bandwidth picked by Scott's rule, std(samples) * n^{-1/5}.
std::vector<double> kde_pdf(const std::vector<double>& samples,
                            const std::vector<double>& grid);

double scott_bandwidth(const std::vector<double>& samples);

}  // namespace eta
