#include "eta/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace eta {

namespace {

double bound_slack(double value) { return 1e-9 * (1.0 + std::abs(value)); }

void require_paired(const std::vector<double>& y1, const std::vector<double>& y2) {
    if (y1.empty() || y2.empty()) throw std::invalid_argument("empty evaluation set");
    if (y1.size() != y2.size())
        throw std::invalid_argument("paired evaluations must have equal length");
}

}  // namespace

double w1_empirical(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2) {
    const auto& a = d1.samples();
    const auto& b = d2.samples();
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    if (n1 == n2) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n1; ++i) acc += std::abs(a[i] - b[i]);
        return acc / static_cast<double>(n1);
    }
    // Both quantile functions are step functions with breakpoints at i/n1 and
    // j/n2; on each cell of the merged partition the integrand is constant.
    double acc = 0.0;
    double pos = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n1 && j < n2) {
        const double next1 = static_cast<double>(i + 1) / static_cast<double>(n1);
        const double next2 = static_cast<double>(j + 1) / static_cast<double>(n2);
        const double next = std::min(next1, next2);
        acc += (next - pos) * std::abs(a[i] - b[j]);
        pos = next;
        if (next1 <= next) ++i;
        if (next2 <= next) ++j;
    }
    return acc;
}

double w1_quantile_mc(const QuantileFn& qf_a, const QuantileFn& qf_b, const QuantileSet& q_set) {
    if (q_set.probs.empty()) throw std::invalid_argument("empty quantile set");
    double acc = 0.0;
    for (double q : q_set.probs) acc += std::abs(qf_a(q) - qf_b(q));
    return acc / static_cast<double>(q_set.probs.size());
}

double w1_tail(const QuantileFn& qf_a, const QuantileFn& qf_b, const QuantileSet& q_set) {
    if (!(q_set.tau > 0.0)) throw std::invalid_argument("w1_tail requires tau > 0");
    double acc = 0.0;
    std::size_t count = 0;
    for (double q : q_set.probs) {
        if (q < q_set.tau) throw std::invalid_argument("quantile level below tau");
        acc += std::abs(qf_a(q) - qf_b(q));
        ++count;
    }
    if (count == 0) throw std::invalid_argument("empty quantile set");
    return acc / static_cast<double>(count);
}

double w1_lower_bound_mean_diff(const std::vector<double>& y1_vals,
                                const std::vector<double>& y2_vals) {
    require_paired(y1_vals, y2_vals);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < y1_vals.size(); ++i) {
        s1 += y1_vals[i];
        s2 += y2_vals[i];
    }
    return std::abs(s1 - s2) / static_cast<double>(y1_vals.size());
}

double w1_upper_bound_coupled(const std::vector<double>& y1_vals,
                              const std::vector<double>& y2_vals) {
    require_paired(y1_vals, y2_vals);
    double acc = 0.0;
    for (std::size_t i = 0; i < y1_vals.size(); ++i) acc += std::abs(y1_vals[i] - y2_vals[i]);
    return acc / static_cast<double>(y1_vals.size());
}

BoundReport check_w1_bounds(const std::vector<double>& y1_vals,
                            const std::vector<double>& y2_vals) {
    BoundReport report;
    report.lower_mean_diff = w1_lower_bound_mean_diff(y1_vals, y2_vals);
    report.w1 = w1_empirical(EmpiricalDistribution(y1_vals), EmpiricalDistribution(y2_vals));
    report.upper_coupled_mean_abs = w1_upper_bound_coupled(y1_vals, y2_vals);
    const double tol = bound_slack(report.w1);
    report.satisfied = report.lower_mean_diff <= report.w1 + tol &&
                       report.w1 <= report.upper_coupled_mean_abs + tol;
    return report;
}

std::string bound_report_to_json(const BoundReport& report) {
    nlohmann::json j;
    j["lower_mean_diff"] = report.lower_mean_diff;
    j["w1"] = report.w1;
    j["upper_coupled_mean_abs"] = report.upper_coupled_mean_abs;
    j["satisfied"] = report.satisfied;
    return j.dump(2) + "\n";
}

double wp_empirical(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("order p must be >= 1");
    const auto& a = d1.samples();
    const auto& b = d2.samples();
    if (a.size() != b.size())
        throw std::invalid_argument("wp_empirical requires equal sample sizes");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(acc / static_cast<double>(a.size()), 1.0 / p);
}

WpBoundReport check_wp_bounds(const std::vector<double>& y1_vals,
                              const std::vector<double>& y2_vals, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("order p must be >= 1");
    require_paired(y1_vals, y2_vals);
    const auto n = static_cast<double>(y1_vals.size());

    WpBoundReport report;
    report.p = p;
    report.wp = wp_empirical(EmpiricalDistribution(y1_vals), EmpiricalDistribution(y2_vals), p);
    report.jensen_lower = w1_lower_bound_mean_diff(y1_vals, y2_vals);

    double abs1 = 0.0, abs2 = 0.0, diff_p = 0.0;
    for (std::size_t i = 0; i < y1_vals.size(); ++i) {
        abs1 += std::abs(y1_vals[i]);
        abs2 += std::abs(y2_vals[i]);
        diff_p += std::pow(std::abs(y1_vals[i] - y2_vals[i]), p);
    }
    report.sharp_moment_lower =
        std::abs(std::pow(abs1 / n, 1.0 / p) - std::pow(abs2 / n, 1.0 / p));
    report.coupled_upper = std::pow(diff_p / n, 1.0 / p);

    const double tol = bound_slack(report.wp);
    report.satisfied = report.jensen_lower <= report.wp + tol &&
                       report.sharp_moment_lower <= report.wp + tol &&
                       report.wp <= report.coupled_upper + tol;
    return report;
}

double w1_bruteforce_oracle(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2) {
    const auto& a = d1.samples();
    const auto& b = d2.samples();
    if (a.size() != b.size())
        throw std::invalid_argument("oracle requires equal sample sizes");
    if (a.size() > 7) throw std::invalid_argument("oracle size limit");
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) cost += std::abs(a[i] - b[perm[i]]);
        best = std::min(best, cost / static_cast<double>(a.size()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace eta
