#include "eta/problems.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace eta {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bump_value(const GaussianBump& b, double x1, double x2) {
    const double dx1 = x1 - b.c1;
    const double dx2 = x2 - b.c2;
    return b.amplitude / (2.0 * kPi * std::sqrt(b.s)) *
           std::exp(-(dx1 * dx1 + dx2 * dx2) / (2.0 * b.s));
}

const std::vector<GaussianBump>& toy_bumps() {
    static const std::vector<GaussianBump> bumps = {
        {1.5, 2.0, 2.0, 0.5},    {1.5, -1.0, -1.0, 0.7}, {1.0, 2.0, -2.0, 0.3},
        {0.5, 0.0, 1.0, 0.9},    {1.25, 0.5, -0.5, 0.6},
    };
    return bumps;
}

}  // namespace

ToyProblemSpec toy1d_spec() {
    ToyProblemSpec spec;
    spec.bumps = toy_bumps();
    spec.input_sigma2 = 10.0;
    spec.mode = ToyMode::kOneD;
    return spec;
}

ToyProblemSpec toy2d_spec() {
    ToyProblemSpec spec = toy1d_spec();
    spec.mode = ToyMode::kTwoD;
    return spec;
}

double toy1d_y(double x1, double x2) {
    double acc = 0.0;
    for (const auto& b : toy_bumps()) acc += bump_value(b, x1, x2);
    return acc;
}

void toy2d_u(double x1, double x2, double& u1, double& u2) {
    u1 = toy1d_y(x1, x2);
    u2 = -0.1 * std::sin(kPi / 3.0 * x1) * std::sin(kPi / 4.0 * x2);
}

double toy2d_g(double u1, double u2) { return 2.0 * std::abs(u1) + std::abs(u2) / 2.0; }

std::vector<LinspBlock> toy1d_quantile_blocks() {
    return {
        {0.0, 1e-4, 10},      {1e-4, 1e-3, 10},     {1e-3, 1e-2, 10},
        {1e-2, 1e-1, 9},      {1e-1, 1.0 - 1e-1, 20},
        {1.0 - 1e-1, 1.0 - 1e-2, 21}, {1.0 - 1e-2, 1.0 - 1e-3, 21},
        {1.0 - 1e-3, 1.0 - 1e-4, 21}, {1.0 - 1e-4, 1.0 - 1e-5, 21},
        {1.0 - 1e-5, 1.0 - 1e-6, 21}, {1.0 - 1e-6, 1.0 - 1e-7, 21},
    };
}

std::vector<LinspBlock> toy2d_quantile_blocks() {
    return {
        {0.0, 1.0 - 1e-1, 41},
        {1.0 - 1e-1, 1.0 - 1e-2, 21}, {1.0 - 1e-2, 1.0 - 1e-3, 21},
        {1.0 - 1e-3, 1.0 - 1e-4, 21}, {1.0 - 1e-4, 1.0 - 1e-5, 21},
        {1.0 - 1e-5, 1.0 - 1e-6, 21}, {1.0 - 1e-6, 1.0 - 1e-7, 21},
    };
}

Matrix sample_inputs(std::size_t n, double sigma2, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("need at least one sample");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    Rng rng(seed);
    const double sd = std::sqrt(sigma2);
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        x.at(i, 0) = rng.normal(0.0, sd);
        x.at(i, 1) = rng.normal(0.0, sd);
    }
    return x;
}

Matrix toy_states(const ToyProblemSpec& problem, const Matrix& inputs) {
    if (inputs.cols != 2) throw std::invalid_argument("toy problems take 2D inputs");
    const std::size_t m = problem.mode == ToyMode::kOneD ? 1 : 2;
    Matrix states(inputs.rows, m);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        const double x1 = inputs.at(i, 0);
        const double x2 = inputs.at(i, 1);
        if (problem.mode == ToyMode::kOneD) {
            states.at(i, 0) = toy1d_y(x1, x2);
        } else {
            toy2d_u(x1, x2, states.at(i, 0), states.at(i, 1));
        }
    }
    return states;
}

Dataset build_training_set(std::size_t n, const std::array<double, 2>& exclusion_center,
                           double exclusion_radius, double sigma2, std::uint64_t seed,
                           const ToyProblemSpec& problem) {
    if (n < 1) throw std::invalid_argument("need at least one sample");
    if (exclusion_radius < 0.0) throw std::invalid_argument("radius must be >= 0");

    Rng rng(seed);
    const double sd = std::sqrt(sigma2);
    const double r2 = exclusion_radius * exclusion_radius;

    Matrix inputs(n, 2);
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    while (accepted < n) {
        const double x1 = rng.normal(0.0, sd);
        const double x2 = rng.normal(0.0, sd);
        ++attempts;
        const double d1 = x1 - exclusion_center[0];
        const double d2 = x2 - exclusion_center[1];
        if (d1 * d1 + d2 * d2 > r2) {
            inputs.at(accepted, 0) = x1;
            inputs.at(accepted, 1) = x2;
            ++accepted;
        }
        if (attempts >= 10000 &&
            static_cast<double>(accepted) < 1e-3 * static_cast<double>(attempts)) {
            throw std::runtime_error("exclusion region too large");
        }
    }

    Dataset data;
    data.inputs = std::move(inputs);
    data.states = toy_states(problem, data.inputs);
    data.observables.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (problem.mode == ToyMode::kOneD) {
            data.observables[i] = data.states.at(i, 0);
        } else {
            data.observables[i] = toy2d_g(data.states.at(i, 0), data.states.at(i, 1));
        }
    }
    return data;
}

EmpiricalDistribution reference_distribution(const ToyProblemSpec& problem, std::size_t n_mc,
                                             std::uint64_t seed) {
    if (n_mc < 10000) throw std::invalid_argument("reference needs at least 1e4 samples");
    Rng rng(seed);
    const double sd = std::sqrt(problem.input_sigma2);
    std::vector<double> values(n_mc);
    for (std::size_t i = 0; i < n_mc; ++i) {
        const double x1 = rng.normal(0.0, sd);
        const double x2 = rng.normal(0.0, sd);
        if (problem.mode == ToyMode::kOneD) {
            values[i] = toy1d_y(x1, x2);
        } else {
            double u1, u2;
            toy2d_u(x1, x2, u1, u2);
            values[i] = toy2d_g(u1, u2);
        }
    }
    return EmpiricalDistribution(std::move(values));
}

}  // namespace eta
