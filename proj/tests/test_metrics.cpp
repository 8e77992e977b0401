#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "eta/csv.hpp"
#include "eta/metrics.hpp"
#include "eta/random.hpp"

using namespace eta;

TEST_CASE("conditional mean of threshold exceedances") {
    CHECK(conditional_mean({1, 2, 3, 4}, 3.0) == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(conditional_mean({5, 5, 5}, 2.0) == 5.0);
    CHECK_THROWS_WITH(conditional_mean({1, 2, 3, 4}, 10.0), "empty conditional set");
    CHECK_THROWS(conditional_mean({}, 0.0));

    // at t = min the conditional set is the whole field
    const std::vector<double> field{0.5, 1.5, 4.0, 2.0};
    CHECK(conditional_mean(field, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("weighted coverage of threshold exceedances") {
    CHECK(weighted_coverage({1, 2, 3, 4}, 3.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(weighted_coverage({1, 2, 3, 4}, 0.0) == 1.0);
    CHECK(weighted_coverage({1, 2, 3, 4}, 100.0) == 0.0);
    CHECK_THROWS_WITH(weighted_coverage({0, 0, 0}, 1.0), "zero total mass");
    CHECK_THROWS(weighted_coverage({1, -2, 3}, 0.0));
}

TEST_CASE("threshold statistics are monotone in t") {
    Rng rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> field(50);
        for (auto& v : field) v = rng.uniform(0.0, 10.0);
        double prev_m = -1e300;
        double prev_c = 2.0;
        for (double t = 0.0; t <= 9.0; t += 0.5) {
            bool any = false;
            for (double v : field) any = any || v >= t;
            if (!any) break;
            const double m = conditional_mean(field, t);
            const double c = weighted_coverage(field, t);
            CHECK(m >= prev_m - 1e-12);
            CHECK(c <= prev_c + 1e-12);
            prev_m = m;
            prev_c = c;
        }
    }
}

namespace {

Matrix grid_inputs(std::size_t n, double lo, double hi) {
    Matrix x(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        x.at(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

}  // namespace

TEST_CASE("consistency report on constructed estimators") {
    const auto truth = [](std::span<const double> x) { return x[0] * x[0]; };
    const Matrix inputs = grid_inputs(10001, -2.0, 2.0);
    const double t_star = 3.0;  // |x| >= sqrt(3)

    SUBCASE("perfect estimator: zero errors, undefined ratios") {
        const auto report = data_consistency_report(truth, truth, t_star, inputs);
        CHECK(report.err_bulk_signed == 0.0);
        CHECK(report.err_extreme_signed == 0.0);
        CHECK(report.err_bulk_abs == 0.0);
        CHECK(report.err_extreme_abs == 0.0);
        CHECK_FALSE(report.ratios_defined);
        CHECK(std::isnan(report.c_tilde_hat));
    }

    SUBCASE("constant offset inside the extreme set: C-tilde 0, K 1") {
        const auto estimator = [&](std::span<const double> x) {
            const double y = truth(x);
            return y >= t_star ? y - 0.5 : y;
        };
        const auto report = data_consistency_report(truth, estimator, t_star, inputs);
        CHECK(report.ratios_defined);
        CHECK(report.c_tilde_hat == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(report.c_hat_hat == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(report.k_hat == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(report.err_extreme_abs >= std::abs(report.err_extreme_signed));
        CHECK(report.err_bulk_abs >= std::abs(report.err_bulk_signed));
    }

    SUBCASE("empty extreme set") {
        CHECK_THROWS_WITH(data_consistency_report(truth, truth, 100.0, inputs),
                          "extreme set empty at this threshold");
    }
}

TEST_CASE("consistency report sums are order-stable") {
    Rng rng(7);
    const std::size_t n = 20000;
    Matrix inputs(n, 1);
    for (std::size_t i = 0; i < n; ++i) inputs.at(i, 0) = rng.uniform(-3, 3);
    const auto truth = [](std::span<const double> x) { return std::exp(x[0]); };
    const auto estimator = [](std::span<const double> x) { return std::exp(x[0]) * 0.95; };
    const double t_star = std::exp(1.5);
    const auto report = data_consistency_report(truth, estimator, t_star, inputs);

    // naive reversed-order accumulation
    double bulk_signed = 0, extreme_signed = 0, bulk_abs = 0, extreme_abs = 0;
    for (std::size_t i = n; i-- > 0;) {
        const std::span<const double> x{inputs.row(i), 1};
        const double err = truth(x) - estimator(x);
        if (truth(x) >= t_star) {
            extreme_signed += err;
            extreme_abs += std::abs(err);
        } else {
            bulk_signed += err;
            bulk_abs += std::abs(err);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    CHECK(std::abs(report.err_bulk_signed - bulk_signed * inv_n) < 1e-10);
    CHECK(std::abs(report.err_extreme_signed - extreme_signed * inv_n) < 1e-10);
    CHECK(std::abs(report.err_bulk_abs - bulk_abs * inv_n) < 1e-10);
    CHECK(std::abs(report.err_extreme_abs - extreme_abs * inv_n) < 1e-10);
}

TEST_CASE("pdf compare export writes one density column per set") {
    Rng rng(12);
    std::vector<double> a(300), b(300);
    for (auto& v : a) v = rng.normal(0.0, 1.0);
    for (auto& v : b) v = rng.normal(2.0, 0.5);

    const std::string path = "pdf_compare_test.csv";
    pdf_compare_export(path, {{"truth", a}, {"mse", a}, {"eta", b}});
    const auto table = csv::read_table(path);
    REQUIRE(table.header ==
            std::vector<std::string>{"grid", "truth", "mse", "eta"});
    for (const auto& row : table.rows) {
        CHECK(row[1] == row[2]);  // identical sets give identical columns
        CHECK(row[1] >= 0.0);
        CHECK(row[3] >= 0.0);
    }
    std::remove(path.c_str());

    CHECK_THROWS(pdf_compare_export(path, {}));
    CHECK_THROWS(pdf_compare_export(path, {{"empty", {}}}));
}
