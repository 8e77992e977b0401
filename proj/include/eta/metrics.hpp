#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eta/distributions.hpp"
#include "eta/model.hpp"

namespace eta {

// Mean of the values at or above t.
double conditional_mean(const std::vector<double>& field, double t);

// Fraction of the total mass carried by values at or above t; field must be
// nonnegative with positive total.
double weighted_coverage(const std::vector<double>& field, double t);

// Monte-Carlo estimates of the four error integrals of an estimator against
// the true map, split at the extreme threshold, plus the consistency ratios.
struct ConsistencyReport {
    double err_bulk_signed = 0.0;
    double err_extreme_signed = 0.0;
    double err_bulk_abs = 0.0;
    double err_extreme_abs = 0.0;
    double c_tilde_hat = 0.0;  // |bulk signed| / |extreme signed|
    double c_hat_hat = 0.0;    // bulk abs / extreme abs
    double k_hat = 0.0;        // extreme abs / |extreme signed|
    bool ratios_defined = false;
    std::size_t n_eval = 0;
    std::size_t n_extreme = 0;
    double extreme_threshold = 0.0;
};

using ScalarMap = std::function<double(std::span<const double>)>;

ConsistencyReport data_consistency_report(const ScalarMap& true_map, const ScalarMap& estimator,
                                          double extreme_threshold, const Matrix& eval_inputs);

// Same report from pre-evaluated pairs (y_true[i], y_est[i]).
ConsistencyReport data_consistency_report(const std::vector<double>& y_true,
                                          const std::vector<double>& y_est,
                                          double extreme_threshold);

std::string consistency_report_to_json(const ConsistencyReport& report);

struct NamedSamples {
    std::string name;
    std::vector<double> values;
};

struct PdfGridConfig {
    std::size_t points = 512;
    double padding_bandwidths = 3.0;   // grid extends this many bandwidths past the data
    std::optional<double> bandwidth;   // per-set Scott's rule when unset
};

// Shared-grid KDE columns for several sample sets, written as CSV
// (grid, <name0>, <name1>, ...).
void pdf_compare_export(const std::string& path, const std::vector<NamedSamples>& sets,
                        const PdfGridConfig& config = {});

}  // namespace eta
