#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "eta/distributions.hpp"
#include "eta/training.hpp"

namespace eta {

// One isotropic Gaussian term A / (2 pi sqrt(s)) * exp(-||x - c||^2 / (2 s)).
struct GaussianBump {
    double amplitude;
    double c1;
    double c2;
    double s;  // > 0
};

enum class ToyMode { kOneD, kTwoD };

struct ToyProblemSpec {
    std::vector<GaussianBump> bumps;
    double input_sigma2 = 10.0;
    ToyMode mode = ToyMode::kOneD;
};

ToyProblemSpec toy1d_spec();
ToyProblemSpec toy2d_spec();

// The five-bump analytic map; the sharpest bump sits at (2,2).
double toy1d_y(double x1, double x2);

// u1 = toy1d_y, u2 = -0.1 sin(pi x1 / 3) sin(pi x2 / 4).
void toy2d_u(double x1, double x2, double& u1, double& u2);

// g(u) = 2|u1| + |u2|/2.
double toy2d_g(double u1, double u2);

// The quantile-level blocks used by the toy recipes.
std::vector<LinspBlock> toy1d_quantile_blocks();
std::vector<LinspBlock> toy2d_quantile_blocks();

// n IID draws from N(0, sigma2 * I_2); deterministic per seed.
Matrix sample_inputs(std::size_t n, double sigma2, std::uint64_t seed);

// Rejection-samples n inputs outside the ball around exclusion_center, then
// attaches states and observables via the analytic maps.
Dataset build_training_set(std::size_t n, const std::array<double, 2>& exclusion_center,
                           double exclusion_radius, double sigma2, std::uint64_t seed,
                           const ToyProblemSpec& problem);

// Empirical law of the observable over n_mc IID inputs (the ideal-case nu0).
EmpiricalDistribution reference_distribution(const ToyProblemSpec& problem, std::size_t n_mc,
                                             std::uint64_t seed);

// State map of a toy problem applied to a batch of inputs.
Matrix toy_states(const ToyProblemSpec& problem, const Matrix& inputs);

inline constexpr std::array<double, 2> kDefaultExclusionCenter{2.0, 2.0};
inline constexpr double kDefaultExclusionRadius = 1.5;

}  // namespace eta
