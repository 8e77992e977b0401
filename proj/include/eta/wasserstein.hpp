#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eta/distributions.hpp"

namespace eta {

// Exact 1D W1 between two empirical laws. Equal sizes reduce to the sorted
// matching; unequal sizes integrate |F1^-1 - F2^-1| exactly over the merged
// breakpoint partition of (0,1).
double w1_empirical(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2);

// Monte-Carlo / fixed-grid estimator: mean over Q of |qf_a(q) - qf_b(q)|.
double w1_quantile_mc(const QuantileFn& qf_a, const QuantileFn& qf_b, const QuantileSet& q_set);

// Tail-restricted estimator (requires tau > 0, all levels >= tau); this is
// the value of the training regularizer.
double w1_tail(const QuantileFn& qf_a, const QuantileFn& qf_b, const QuantileSet& q_set);

// |mean(y1) - mean(y2)|: the identity-test-function lower bound on the W1 of
// the push-forwards of paired evaluations.
double w1_lower_bound_mean_diff(const std::vector<double>& y1_vals,
                                const std::vector<double>& y2_vals);

// mean |y1 - y2|: the exact-coupling upper bound.
double w1_upper_bound_coupled(const std::vector<double>& y1_vals,
                              const std::vector<double>& y2_vals);

struct BoundReport {
    double lower_mean_diff = 0.0;
    double w1 = 0.0;
    double upper_coupled_mean_abs = 0.0;
    bool satisfied = false;
};

// Sandwich check: lower <= W1(push-forwards) <= upper, slack 1e-9*(1+|w1|).
BoundReport check_w1_bounds(const std::vector<double>& y1_vals,
                            const std::vector<double>& y2_vals);

std::string bound_report_to_json(const BoundReport& report);

// p-Wasserstein between equal-size empirical laws (monotone coupling).
double wp_empirical(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2, double p);

struct WpBoundReport {
    double p = 1.0;
    double wp = 0.0;
    double jensen_lower = 0.0;        // |mean(y1 - y2)|
    double sharp_moment_lower = 0.0;  // |E|y1|^{1/p} - E|y2|^{1/p}|
    double coupled_upper = 0.0;       // (mean |y1 - y2|^p)^{1/p}
    bool satisfied = false;
};

WpBoundReport check_wp_bounds(const std::vector<double>& y1_vals,
                              const std::vector<double>& y2_vals, double p);

// Exhaustive minimum over all bijective matchings; test oracle, n <= 7.
double w1_bruteforce_oracle(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2);

}  // namespace eta
