#include "eta/model.hpp"

#include <cmath>
#include <stdexcept>

#include "eta/csv.hpp"
#include "json.hpp"

namespace eta {

double smoothed_relu(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return 0.0;
    return x / (1.0 + std::exp(-4.0 * x));
}

double smoothed_relu_derivative(double x) {
    if (x > 30.0) return 1.0;
    if (x < -30.0) return 0.0;
    const double s = 1.0 / (1.0 + std::exp(-4.0 * x));
    return s + 4.0 * x * s * (1.0 - s);
}

MlpParams::MlpParams(std::vector<std::size_t> layer_dims) : dims_(std::move(layer_dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("need at least input and output dims");
    for (std::size_t d : dims_) {
        if (d == 0) throw std::invalid_argument("layer dimension must be positive");
    }
    build_offsets();
}

void MlpParams::build_offsets() {
    weight_offsets_.clear();
    bias_offsets_.clear();
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        weight_offsets_.push_back(offset);
        offset += dims_[l + 1] * dims_[l];
        bias_offsets_.push_back(offset);
        offset += dims_[l + 1];
    }
    data_.assign(offset, 0.0);
}

MlpParams MlpParams::glorot_init(std::vector<std::size_t> layer_dims, Rng& rng) {
    MlpParams p(std::move(layer_dims));
    for (std::size_t l = 0; l < p.num_affine_layers(); ++l) {
        const double fan_in = static_cast<double>(p.dims_[l]);
        const double fan_out = static_cast<double>(p.dims_[l + 1]);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& w : p.weight(l)) w = rng.uniform(-bound, bound);
        // biases start at zero
    }
    return p;
}

std::span<double> MlpParams::weight(std::size_t layer) {
    return {data_.data() + weight_offsets_[layer], dims_[layer + 1] * dims_[layer]};
}
std::span<const double> MlpParams::weight(std::size_t layer) const {
    return {data_.data() + weight_offsets_[layer], dims_[layer + 1] * dims_[layer]};
}
std::span<double> MlpParams::bias(std::size_t layer) {
    return {data_.data() + bias_offsets_[layer], dims_[layer + 1]};
}
std::span<const double> MlpParams::bias(std::size_t layer) const {
    return {data_.data() + bias_offsets_[layer], dims_[layer + 1]};
}

bool MlpParams::finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

// out(B x N) = x(B x K) * W^T + b, W row-major N x K.
void affine_forward(const Matrix& x, std::span<const double> w, std::span<const double> b,
                    Matrix& out) {
    const std::size_t batch = x.rows;
    const std::size_t in_dim = x.cols;
    const std::size_t out_dim = b.size();
    out = Matrix(batch, out_dim);
    for (std::size_t i = 0; i < batch; ++i) {
        const double* xi = x.row(i);
        double* oi = out.row(i);
        for (std::size_t j = 0; j < out_dim; ++j) {
            const double* wj = w.data() + j * in_dim;
            double acc = b[j];
            for (std::size_t k = 0; k < in_dim; ++k) acc += xi[k] * wj[k];
            oi[j] = acc;
        }
    }
}

}  // namespace

Matrix mlp_forward_cached(const MlpParams& params, const Matrix& x, ForwardCache& cache) {
    if (x.cols != params.input_dim())
        throw std::invalid_argument("input dimension mismatch");
    const std::size_t layers = params.num_affine_layers();
    cache.acts.assign(layers + 1, Matrix{});
    cache.pre.assign(layers, Matrix{});
    cache.acts[0] = x;
    for (std::size_t l = 0; l < layers; ++l) {
        affine_forward(cache.acts[l], params.weight(l), params.bias(l), cache.pre[l]);
        if (l + 1 < layers) {
            Matrix a(cache.pre[l].rows, cache.pre[l].cols);
            for (std::size_t i = 0; i < a.data.size(); ++i)
                a.data[i] = smoothed_relu(cache.pre[l].data[i]);
            cache.acts[l + 1] = std::move(a);
        } else {
            cache.acts[l + 1] = cache.pre[l];  // linear output layer
        }
    }
    return cache.acts[layers];
}

Matrix mlp_forward(const MlpParams& params, const Matrix& x) {
    if (x.cols != params.input_dim())
        throw std::invalid_argument("input dimension mismatch");
    const std::size_t layers = params.num_affine_layers();
    // Chunked to keep intermediate activations small on big batches; chunks
    // are independent, so the result is identical regardless of scheduling.
    constexpr std::size_t kChunk = 512;
    Matrix out(x.rows, params.output_dim());
    const std::size_t n_chunks = (x.rows + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(n_chunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        const std::size_t end = std::min(begin + kChunk, x.rows);
        Matrix cur(end - begin, x.cols);
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t k = 0; k < x.cols; ++k) cur.at(i - begin, k) = x.at(i, k);
        Matrix next;
        for (std::size_t l = 0; l < layers; ++l) {
            affine_forward(cur, params.weight(l), params.bias(l), next);
            if (l + 1 < layers) {
                for (double& v : next.data) v = smoothed_relu(v);
            }
            cur = std::move(next);
        }
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) = cur.at(i - begin, j);
    }
    return out;
}

std::vector<double> mlp_forward_one(const MlpParams& params, std::span<const double> x) {
    Matrix m(1, x.size());
    for (std::size_t k = 0; k < x.size(); ++k) m.at(0, k) = x[k];
    const Matrix out = mlp_forward(params, m);
    return out.data;
}

void mlp_backward(const MlpParams& params, const ForwardCache& cache, const Matrix& upstream,
                  std::vector<double>& grad_flat) {
    const std::size_t layers = params.num_affine_layers();
    if (cache.acts.size() != layers + 1)
        throw std::invalid_argument("forward cache does not match params");
    if (upstream.rows != cache.acts[layers].rows || upstream.cols != cache.acts[layers].cols)
        throw std::invalid_argument("upstream gradient shape mismatch");
    if (grad_flat.size() != params.param_count())
        throw std::invalid_argument("gradient buffer size mismatch");

    Matrix d_out = upstream;
    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& act_in = cache.acts[l];
        const std::size_t batch = act_in.rows;
        const std::size_t in_dim = act_in.cols;
        const std::size_t out_dim = d_out.cols;

        Matrix d_pre = std::move(d_out);
        if (l + 1 < layers) {
            const Matrix& pre = cache.pre[l];
            for (std::size_t i = 0; i < d_pre.data.size(); ++i)
                d_pre.data[i] *= smoothed_relu_derivative(pre.data[i]);
        }

        // dW[j][k] += sum_i d_pre[i][j] * act_in[i][k];  db[j] += sum_i d_pre[i][j]
        double* dw = grad_flat.data() + params.weight_offset(l);
        double* db = grad_flat.data() + params.bias_offset(l);
        for (std::size_t i = 0; i < batch; ++i) {
            const double* gi = d_pre.row(i);
            const double* ai = act_in.row(i);
            for (std::size_t j = 0; j < out_dim; ++j) {
                const double g = gi[j];
                double* dwj = dw + j * in_dim;
                for (std::size_t k = 0; k < in_dim; ++k) dwj[k] += g * ai[k];
                db[j] += g;
            }
        }

        if (l > 0) {
            // d_out[i][k] = sum_j d_pre[i][j] * W[j][k]
            const auto w = params.weight(l);
            d_out = Matrix(batch, in_dim);
            for (std::size_t i = 0; i < batch; ++i) {
                const double* gi = d_pre.row(i);
                double* oi = d_out.row(i);
                for (std::size_t j = 0; j < out_dim; ++j) {
                    const double g = gi[j];
                    const double* wj = w.data() + j * in_dim;
                    for (std::size_t k = 0; k < in_dim; ++k) oi[k] += g * wj[k];
                }
            }
        }
    }
}

void adam_step(MlpParams& params, const std::vector<double>& grad_flat, AdamState& state) {
    if (grad_flat.size() != params.param_count() || state.m.size() != params.param_count() ||
        state.v.size() != params.param_count())
        throw std::invalid_argument("adam state/gradient size mismatch");
    for (double g : grad_flat) {
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient");
    }
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    auto& theta = params.flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad_flat[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        theta[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

namespace {
constexpr const char* kCheckpointTag = "etalearn-mlp-v1";
}

void MlpParams::save_json(const std::string& path) const {
    nlohmann::json j;
    j["format"] = kCheckpointTag;
    j["layer_dims"] = dims_;
    std::vector<std::vector<double>> weights, biases;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const auto w = weight(l);
        const auto b = bias(l);
        weights.emplace_back(w.begin(), w.end());
        biases.emplace_back(b.begin(), b.end());
    }
    j["weights"] = weights;
    j["biases"] = biases;
    csv::write_text(path, j.dump() + "\n");
}

MlpParams MlpParams::load_json(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(csv::read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != kCheckpointTag)
        throw std::runtime_error("unsupported checkpoint format in " + path);
    MlpParams p(j.at("layer_dims").get<std::vector<std::size_t>>());
    const auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto biases = j.at("biases").get<std::vector<std::vector<double>>>();
    if (weights.size() != p.num_affine_layers() || biases.size() != p.num_affine_layers())
        throw std::runtime_error("checkpoint layer count mismatch in " + path);
    for (std::size_t l = 0; l < p.num_affine_layers(); ++l) {
        auto w = p.weight(l);
        auto b = p.bias(l);
        if (weights[l].size() != w.size() || biases[l].size() != b.size())
            throw std::runtime_error("checkpoint tensor shape mismatch in " + path);
        std::copy(weights[l].begin(), weights[l].end(), w.begin());
        std::copy(biases[l].begin(), biases[l].end(), b.begin());
    }
    if (!p.finite()) throw std::runtime_error("checkpoint contains non-finite values: " + path);
    return p;
}

}  // namespace eta
