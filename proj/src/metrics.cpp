#include "eta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eta/csv.hpp"
#include "json.hpp"

namespace eta {

double conditional_mean(const std::vector<double>& field, double t) {
    if (field.empty()) throw std::invalid_argument("empty field");
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : field) {
        if (v >= t) {
            sum += v;
            ++count;
        }
    }
    if (count == 0) throw std::runtime_error("empty conditional set");
    return sum / static_cast<double>(count);
}

double weighted_coverage(const std::vector<double>& field, double t) {
    if (field.empty()) throw std::invalid_argument("empty field");
    double total = 0.0;
    double above = 0.0;
    for (double v : field) {
        if (v < 0.0) throw std::invalid_argument("coverage requires nonnegative field");
        total += v;
        if (v >= t) above += v;
    }
    if (total == 0.0) throw std::runtime_error("zero total mass");
    return above / total;
}

namespace {

// Compensated (Kahan) accumulator; keeps the report stable under parallel or
// reordered evaluation.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

ConsistencyReport data_consistency_report(const ScalarMap& true_map, const ScalarMap& estimator,
                                          double extreme_threshold, const Matrix& eval_inputs) {
    if (eval_inputs.rows == 0) throw std::invalid_argument("empty evaluation set");
    std::vector<double> y_true(eval_inputs.rows), y_est(eval_inputs.rows);
    for (std::size_t i = 0; i < eval_inputs.rows; ++i) {
        const std::span<const double> x{eval_inputs.row(i), eval_inputs.cols};
        y_true[i] = true_map(x);
        y_est[i] = estimator(x);
    }
    return data_consistency_report(y_true, y_est, extreme_threshold);
}

ConsistencyReport data_consistency_report(const std::vector<double>& y_true,
                                          const std::vector<double>& y_est,
                                          double extreme_threshold) {
    if (y_true.empty()) throw std::invalid_argument("empty evaluation set");
    if (y_true.size() != y_est.size())
        throw std::invalid_argument("evaluation pairs not aligned");

    KahanSum bulk_signed, extreme_signed, bulk_abs, extreme_abs;
    std::size_t n_extreme = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double err = y_true[i] - y_est[i];
        if (y_true[i] >= extreme_threshold) {
            extreme_signed.add(err);
            extreme_abs.add(std::abs(err));
            ++n_extreme;
        } else {
            bulk_signed.add(err);
            bulk_abs.add(std::abs(err));
        }
    }
    if (n_extreme == 0) throw std::runtime_error("extreme set empty at this threshold");

    const double inv_n = 1.0 / static_cast<double>(y_true.size());
    ConsistencyReport report;
    report.err_bulk_signed = bulk_signed.sum * inv_n;
    report.err_extreme_signed = extreme_signed.sum * inv_n;
    report.err_bulk_abs = bulk_abs.sum * inv_n;
    report.err_extreme_abs = extreme_abs.sum * inv_n;
    report.n_eval = y_true.size();
    report.n_extreme = n_extreme;
    report.extreme_threshold = extreme_threshold;

    const double denom = std::abs(report.err_extreme_signed);
    if (denom < 1e-15) {
        report.ratios_defined = false;
        report.c_tilde_hat = std::numeric_limits<double>::quiet_NaN();
        report.c_hat_hat = std::numeric_limits<double>::quiet_NaN();
        report.k_hat = std::numeric_limits<double>::quiet_NaN();
    } else {
        report.ratios_defined = true;
        report.c_tilde_hat = std::abs(report.err_bulk_signed) / denom;
        report.c_hat_hat = report.err_bulk_abs / report.err_extreme_abs;
        report.k_hat = report.err_extreme_abs / denom;
    }
    return report;
}

std::string consistency_report_to_json(const ConsistencyReport& report) {
    nlohmann::json j;
    j["err_bulk_signed"] = report.err_bulk_signed;
    j["err_extreme_signed"] = report.err_extreme_signed;
    j["err_bulk_abs"] = report.err_bulk_abs;
    j["err_extreme_abs"] = report.err_extreme_abs;
    j["ratios_defined"] = report.ratios_defined;
    if (report.ratios_defined) {
        j["c_tilde_hat"] = report.c_tilde_hat;
        j["c_hat_hat"] = report.c_hat_hat;
        j["k_hat"] = report.k_hat;
    } else {
        j["c_tilde_hat"] = nullptr;
        j["c_hat_hat"] = nullptr;
        j["k_hat"] = nullptr;
    }
    j["n_eval"] = report.n_eval;
    j["n_extreme"] = report.n_extreme;
    j["extreme_threshold"] = report.extreme_threshold;
    return j.dump(2) + "\n";
}

void pdf_compare_export(const std::string& path, const std::vector<NamedSamples>& sets,
                        const PdfGridConfig& config) {
    if (sets.empty()) throw std::invalid_argument("no sample sets");
    if (config.points < 2) throw std::invalid_argument("grid needs at least 2 points");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double max_bw = 0.0;
    std::vector<double> bandwidths;
    for (const auto& s : sets) {
        if (s.values.empty()) throw std::invalid_argument("empty sample set: " + s.name);
        const double bw = config.bandwidth ? *config.bandwidth : scott_bandwidth(s.values);
        if (!(bw > 0.0)) throw std::invalid_argument("bandwidth must be positive");
        bandwidths.push_back(bw);
        max_bw = std::max(max_bw, bw);
        lo = std::min(lo, *std::min_element(s.values.begin(), s.values.end()));
        hi = std::max(hi, *std::max_element(s.values.begin(), s.values.end()));
    }
    lo -= config.padding_bandwidths * max_bw;
    hi += config.padding_bandwidths * max_bw;
    const std::vector<double> grid = linsp(lo, hi, config.points);

    csv::Table table;
    table.header.push_back("grid");
    for (const auto& s : sets) table.header.push_back(s.name);
    table.rows.assign(grid.size(), std::vector<double>());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        table.rows[k].reserve(1 + sets.size());
        table.rows[k].push_back(grid[k]);
    }
    for (std::size_t si = 0; si < sets.size(); ++si) {
        const auto density = kde_pdf(sets[si].values, grid, bandwidths[si]);
        for (std::size_t k = 0; k < grid.size(); ++k) table.rows[k].push_back(density[k]);
    }
    csv::write_table(path, table);
}

}  // namespace eta
