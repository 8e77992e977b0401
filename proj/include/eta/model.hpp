#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eta/random.hpp"

namespace eta {

// Dense row-major matrix; just enough linear algebra for the MLP.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Smoothed ReLU x / (1 + e^{-4x}); saturates for |x| > 30 to avoid exp
// overflow.
double smoothed_relu(double x);
double smoothed_relu_derivative(double x);

// Feedforward network parameters stored as one flat vector
// [W0 row-major | b0 | W1 | b1 | ...]; weights[l] maps dims[l] -> dims[l+1].
class MlpParams {
public:
    MlpParams() = default;
    explicit MlpParams(std::vector<std::size_t> layer_dims);

    static MlpParams glorot_init(std::vector<std::size_t> layer_dims, Rng& rng);

    const std::vector<std::size_t>& layer_dims() const { return dims_; }
    std::size_t input_dim() const { return dims_.front(); }
    std::size_t output_dim() const { return dims_.back(); }
    std::size_t num_affine_layers() const { return dims_.size() - 1; }

    std::span<double> weight(std::size_t layer);
    std::span<const double> weight(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;
    std::size_t weight_offset(std::size_t layer) const { return weight_offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const { return bias_offsets_[layer]; }

    std::vector<double>& flat() { return data_; }
    const std::vector<double>& flat() const { return data_; }
    std::size_t param_count() const { return data_.size(); }

    bool finite() const;

    void save_json(const std::string& path) const;
    static MlpParams load_json(const std::string& path);

private:
    std::vector<std::size_t> dims_;
    std::vector<double> data_;
    std::vector<std::size_t> weight_offsets_;
    std::vector<std::size_t> bias_offsets_;

    void build_offsets();
};

// Per-layer activations kept around for the backward pass.
struct ForwardCache {
    std::vector<Matrix> acts;  // acts[0] = input, acts[L] = output
    std::vector<Matrix> pre;   // pre-activations per affine layer
};

// Batched forward pass; rows of x are samples.
Matrix mlp_forward(const MlpParams& params, const Matrix& x);
Matrix mlp_forward_cached(const MlpParams& params, const Matrix& x, ForwardCache& cache);
std::vector<double> mlp_forward_one(const MlpParams& params, std::span<const double> x);

// Accumulates d/dtheta of sum_i <upstream_i, forward(x_i)> into grad_flat
// (sized like params.flat()).
void mlp_backward(const MlpParams& params, const ForwardCache& cache, const Matrix& upstream,
                  std::vector<double>& grad_flat);

struct AdamState {
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
    std::size_t step_count = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t param_count, double lr_in)
        : m(param_count, 0.0), v(param_count, 0.0), lr(lr_in) {}
};

// One bias-corrected Adam update in place; throws on non-finite gradients.
void adam_step(MlpParams& params, const std::vector<double>& grad_flat, AdamState& state);

}  // namespace eta
