#include "eta/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eta {

namespace {

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_finite_loss(double loss) {
    if (!std::isfinite(loss)) throw std::runtime_error("training diverged");
}

}  // namespace

Dataset make_dataset(Matrix inputs, Matrix states, const Observable& g) {
    if (inputs.rows != states.rows) throw std::invalid_argument("inputs/states length mismatch");
    Dataset data;
    data.inputs = std::move(inputs);
    data.states = std::move(states);
    data.observables.resize(data.states.rows);
    for (std::size_t i = 0; i < data.states.rows; ++i) {
        data.observables[i] = g.value({data.states.row(i), data.states.cols});
    }
    return data;
}

void validate_dataset(const Dataset& data, const Observable& g) {
    if (data.inputs.rows != data.states.rows || data.inputs.rows != data.observables.size())
        throw std::invalid_argument("dataset columns not aligned");
    for (std::size_t i = 0; i < data.states.rows; ++i) {
        const double y = g.value({data.states.row(i), data.states.cols});
        if (std::abs(y - data.observables[i]) > 1e-12)
            throw std::invalid_argument("observable column inconsistent with g(state)");
    }
}

double erm_loss(const MlpParams& params, const Matrix& inputs, const Matrix& targets,
                std::vector<double>* grad_flat, double grad_scale) {
    if (inputs.rows == 0) throw std::invalid_argument("empty batch");
    if (inputs.rows != targets.rows || targets.cols != params.output_dim())
        throw std::invalid_argument("target shape mismatch");

    ForwardCache cache;
    const Matrix pred = mlp_forward_cached(params, inputs, cache);
    const double inv_n = 1.0 / static_cast<double>(inputs.rows);

    double loss = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double r = pred.data[i] - targets.data[i];
        loss += r * r;
    }
    loss *= inv_n;

    if (grad_flat) {
        Matrix upstream(pred.rows, pred.cols);
        const double c = 2.0 * inv_n * grad_scale;
        for (std::size_t i = 0; i < pred.data.size(); ++i)
            upstream.data[i] = c * (pred.data[i] - targets.data[i]);
        mlp_backward(params, cache, upstream, *grad_flat);
    }
    return loss;
}

double w1_tail_loss(const MlpParams& params, const Observable& g, const IndexSets& index_sets,
                    const std::vector<double>& ref_values, const Matrix& pool,
                    std::vector<double>* grad_flat, double grad_scale) {
    const std::size_t n_q = index_sets.input_indices.size();
    if (n_q == 0) throw std::invalid_argument("empty index set");
    if (ref_values.size() != n_q)
        throw std::invalid_argument("reference values not aligned with index set");
    if (index_sets.component_indices && index_sets.component_indices->size() != n_q)
        throw std::invalid_argument("component indices not aligned with input indices");

    Matrix selected(n_q, pool.cols);
    for (std::size_t i = 0; i < n_q; ++i) {
        const std::size_t idx = index_sets.input_indices[i];
        if (idx >= pool.rows) throw std::invalid_argument("pool index out of range");
        for (std::size_t k = 0; k < pool.cols; ++k) selected.at(i, k) = pool.at(idx, k);
    }

    ForwardCache cache;
    const Matrix outs = mlp_forward_cached(params, selected, cache);
    const std::size_t m = outs.cols;
    const double inv_q = 1.0 / static_cast<double>(n_q);
    const bool frozen_component =
        index_sets.component_indices.has_value() && g.component_replaces_value();

    Matrix upstream(n_q, m);
    std::vector<double> du(m, 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n_q; ++i) {
        double value;
        std::fill(du.begin(), du.end(), 0.0);
        if (frozen_component) {
            const std::size_t j = (*index_sets.component_indices)[i];
            if (j >= m) throw std::invalid_argument("component index out of range");
            value = outs.at(i, j);
            du[j] = 1.0;
        } else {
            value = g.value({outs.row(i), m});
            g.grad({outs.row(i), m}, du);
        }
        const double diff = value - ref_values[i];
        loss += std::abs(diff);
        if (grad_flat) {
            const double c = grad_scale * inv_q * sign_or_zero(diff);
            for (std::size_t j = 0; j < m; ++j) upstream.at(i, j) = c * du[j];
        }
    }
    loss *= inv_q;

    if (grad_flat) mlp_backward(params, cache, upstream, *grad_flat);
    return loss;
}

IndexSets update_index(const MlpParams& params, const Observable& g, const QuantileSet& q_set,
                       const Matrix& pool) {
    if (pool.rows == 0) throw std::invalid_argument("empty pool");
    const Matrix outs = mlp_forward(params, pool);
    const std::size_t n = pool.rows;

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = g.value({outs.row(i), outs.cols});

    // ascending sort, ties broken by pool index
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });

    const bool track_components =
        g.triggering_component({outs.row(0), outs.cols}).has_value();

    IndexSets sets;
    sets.input_indices.reserve(q_set.probs.size());
    if (track_components) sets.component_indices.emplace();
    for (double q : q_set.probs) {
        std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
        if (rank < 1) rank = 1;
        if (rank > n) rank = n;
        const std::size_t idx = order[rank - 1];
        sets.input_indices.push_back(idx);
        if (track_components) {
            sets.component_indices->push_back(
                *g.triggering_component({outs.row(idx), outs.cols}));
        }
    }
    return sets;
}

namespace {

// Deterministic mini-batch schedule: a reshuffled index cycle per epoch.
class BatchSchedule {
public:
    BatchSchedule(std::size_t n, std::size_t batch, std::uint64_t seed)
        : n_(n), batch_(batch == 0 || batch >= n ? 0 : batch), rng_(seed) {
        if (batch_ > 0) {
            indices_.resize(n_);
            std::iota(indices_.begin(), indices_.end(), std::size_t{0});
        }
    }

    bool full_batch() const { return batch_ == 0; }

    // Gathers the next mini-batch out of (inputs, targets).
    void next(const Matrix& inputs, const Matrix& targets, Matrix& bx, Matrix& bt) {
        if (cursor_ + batch_ > n_) cursor_ = 0;
        if (cursor_ == 0) shuffle();
        bx = Matrix(batch_, inputs.cols);
        bt = Matrix(batch_, targets.cols);
        for (std::size_t i = 0; i < batch_; ++i) {
            const std::size_t src = indices_[cursor_ + i];
            for (std::size_t k = 0; k < inputs.cols; ++k) bx.at(i, k) = inputs.at(src, k);
            for (std::size_t k = 0; k < targets.cols; ++k) bt.at(i, k) = targets.at(src, k);
        }
        cursor_ += batch_;
    }

private:
    void shuffle() {
        for (std::size_t i = n_; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng_.below(i));
            std::swap(indices_[i - 1], indices_[j]);
        }
    }

    std::size_t n_;
    std::size_t batch_;
    Rng rng_;
    std::vector<std::size_t> indices_;
    std::size_t cursor_ = 0;
};

}  // namespace

MlpParams train_erm(const Dataset& data, MlpParams init, const OptimizerConfig& opt,
                    std::size_t steps, const StepHook& hook) {
    if (data.inputs.rows == 0) throw std::invalid_argument("empty dataset");
    MlpParams params = std::move(init);
    AdamState state(params.param_count(), opt.lr);
    state.beta1 = opt.beta1;
    state.beta2 = opt.beta2;
    state.eps = opt.eps;

    BatchSchedule schedule(data.inputs.rows, opt.batch, opt.shuffle_seed);
    std::vector<double> grad(params.param_count());
    Matrix bx, bt;
    for (std::size_t k = 0; k < steps; ++k) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss;
        if (schedule.full_batch()) {
            loss = erm_loss(params, data.inputs, data.states, &grad);
        } else {
            schedule.next(data.inputs, data.states, bx, bt);
            loss = erm_loss(params, bx, bt, &grad);
        }
        require_finite_loss(loss);
        adam_step(params, grad, state);
        if (hook) {
            TrainStepInfo info;
            info.step = k + 1;
            info.erm = loss;
            info.tail = 0.0;
            info.total = loss;
            info.refreshed = false;
            info.params = &params;
            hook(info);
        }
    }
    return params;
}

MlpParams train_iict(const Dataset& data, const Matrix& pool, const QuantileSet& q_set,
                     const QuantileFn& nu0_quantile, const EtaConfig& config,
                     MlpParams pretrained, const Observable& g, const StepHook& hook,
                     const RefreshHook& on_refresh) {
    if (config.omega < 1) throw std::invalid_argument("omega must be >= 1");
    if (config.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

    // The regularizer vanishes identically at lambda = 0: continued ERM
    // training with the same seed, step for step.
    if (config.lambda == 0.0) {
        OptimizerConfig opt;
        opt.lr = config.lr;
        opt.batch = config.batch;
        opt.shuffle_seed = config.seed;
        return train_erm(data, std::move(pretrained), opt, config.steps, hook);
    }

    if (q_set.probs.empty()) throw std::invalid_argument("empty quantile set");
    std::vector<double> ref_values;
    ref_values.reserve(q_set.probs.size());
    for (double q : q_set.probs) ref_values.push_back(nu0_quantile(q));

    MlpParams params = std::move(pretrained);
    AdamState state(params.param_count(), config.lr);

    IndexSets index_sets = update_index(params, g, q_set, pool);
    if (on_refresh) on_refresh(index_sets, params, 0);

    BatchSchedule schedule(data.inputs.rows, config.batch, config.seed);
    std::vector<double> grad(params.param_count());
    Matrix bx, bt;
    for (std::size_t k = 0; k < config.steps; ++k) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double erm;
        if (schedule.full_batch()) {
            erm = erm_loss(params, data.inputs, data.states, &grad);
        } else {
            schedule.next(data.inputs, data.states, bx, bt);
            erm = erm_loss(params, bx, bt, &grad);
        }
        const double tail =
            w1_tail_loss(params, g, index_sets, ref_values, pool, &grad, config.lambda);
        const double total = erm + config.lambda * tail;
        require_finite_loss(total);
        adam_step(params, grad, state);

        const std::size_t next = k + 1;
        const bool refresh_now = (next % config.omega) == 0;
        if (refresh_now) {
            index_sets = update_index(params, g, q_set, pool);
            if (on_refresh) on_refresh(index_sets, params, next);
        }
        if (hook) {
            TrainStepInfo info;
            info.step = next;
            info.erm = erm;
            info.tail = tail;
            info.total = total;
            info.refreshed = refresh_now;
            info.params = &params;
            hook(info);
        }
    }
    return params;
}

}  // namespace eta
