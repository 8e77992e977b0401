#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eta/distributions.hpp"
#include "eta/model.hpp"
#include "eta/observable.hpp"

namespace eta {

// Aligned (input, state, observable) triples; observables[i] must equal
// g(states[i]) to 1e-12.
struct Dataset {
    Matrix inputs;                    // n x d
    Matrix states;                    // n x m
    std::vector<double> observables;  // n
};

Dataset make_dataset(Matrix inputs, Matrix states, const Observable& g);
void validate_dataset(const Dataset& data, const Observable& g);

// Frozen quantile-attaining pool indices, plus (when the observable exposes
// one) the output component that triggers it at each selected point.
struct IndexSets {
    std::vector<std::size_t> input_indices;                         // one per quantile level
    std::optional<std::vector<std::size_t>> component_indices;      // aligned with input_indices
};

struct EtaConfig {
    double lambda = 1.0;         // regularizer balance, >= 0
    double tau = 0.0;            // tail cutoff carried by the quantile set
    std::size_t omega = 30;      // index refresh window, >= 1
    std::size_t steps = 3000;    // gradient steps N
    double lr = 1e-3;
    std::uint64_t seed = 0;      // reserved for mini-batch shuffling
    std::size_t pool_size = 10000;
    std::size_t batch = 0;       // 0 = full batch (ERM term only)
};

// MSE over the batch (squared Euclidean norm per sample for vector states).
// When grad_flat is non-null, accumulates grad_scale * d(loss)/d(theta).
double erm_loss(const MlpParams& params, const Matrix& inputs, const Matrix& targets,
                std::vector<double>* grad_flat = nullptr, double grad_scale = 1.0);

// (1/|Q|) sum_i |g_i - ref_values[i]| where g_i is the observable of the
// model at the frozen pool point i; for component-replacing observables the
// frozen coordinate stands in for g. Gradients flow only through the |Q|
// selected points; the subgradient of |.| at 0 is 0.
double w1_tail_loss(const MlpParams& params, const Observable& g, const IndexSets& index_sets,
                    const std::vector<double>& ref_values, const Matrix& pool,
                    std::vector<double>* grad_flat = nullptr, double grad_scale = 1.0);

// Evaluates g(model(.)) on the pool, sorts ascending (ties by pool index),
// and records the ceil(q * n) rank index for every level of Q, clamped to
// [1, n]; also records the triggering output component when g exposes one.
IndexSets update_index(const MlpParams& params, const Observable& g, const QuantileSet& q_set,
                       const Matrix& pool);

struct TrainStepInfo {
    std::size_t step = 0;  // 1-based, the update just applied
    double erm = 0.0;
    double tail = 0.0;   // unweighted tail-W1 estimate at the frozen indices
    double total = 0.0;  // erm + lambda * tail
    bool refreshed = false;  // index sets refreshed right after this update
    const MlpParams* params = nullptr;
};

using StepHook = std::function<void(const TrainStepInfo&)>;
using RefreshHook = std::function<void(const IndexSets&, const MlpParams&, std::size_t step)>;

struct OptimizerConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t batch = 0;      // 0 = full batch
    std::uint64_t shuffle_seed = 0;
};

// Adam on the ERM loss alone; throws "training diverged" if the loss goes
// non-finite.
MlpParams train_erm(const Dataset& data, MlpParams init, const OptimizerConfig& opt,
                    std::size_t steps, const StepHook& hook = {});

// The continual-training loop: Adam on erm + lambda * tail with the index
// sets frozen between refreshes; refreshes happen once before the first step
// and every omega steps thereafter. With lambda = 0 this is exactly
// continued ERM training (same seed, same trajectory).
MlpParams train_iict(const Dataset& data, const Matrix& pool, const QuantileSet& q_set,
                     const QuantileFn& nu0_quantile, const EtaConfig& config,
                     MlpParams pretrained, const Observable& g, const StepHook& hook = {},
                     const RefreshHook& on_refresh = {});

}  // namespace eta
