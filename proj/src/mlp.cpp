#include "lrbench/mlp.hpp"

#include <atomic>
#include <cmath>

#include "lrbench/errors.hpp"
#include "lrbench/loss.hpp"
#include "lrbench/rng.hpp"

namespace lrbench {
namespace {

std::uint64_t next_model_identity() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

Model::Model(std::vector<std::size_t> layer_sizes)
    : sizes_(std::move(layer_sizes)), identity_(next_model_identity()) {
    if (sizes_.size() < 2) throw ConfigError("Model: need at least an input and an output size");
    for (auto s : sizes_) {
        if (s == 0) throw ConfigError("Model: layer sizes must be positive");
    }
    const std::size_t n = sizes_.size() - 1;
    slots_.reserve(2 * n);
    for (std::size_t l = 0; l < n; ++l) {
        const double depth = n == 1 ? 0.0 : static_cast<double>(l) / static_cast<double>(n - 1);
        const std::string suffix = std::to_string(l);
        slots_.push_back({"w" + suffix, SlotKind::weight, Matrix(sizes_[l], sizes_[l + 1]),
                          Matrix(sizes_[l], sizes_[l + 1]), l, depth});
        slots_.push_back({"b" + suffix, SlotKind::bias, Matrix(1, sizes_[l + 1]),
                          Matrix(1, sizes_[l + 1]), l, depth});
    }
}

std::size_t Model::parameter_count() const noexcept {
    std::size_t total = 0;
    for (const auto& s : slots_) total += s.values.size();
    return total;
}

void Model::zero_grad() {
    for (auto& s : slots_) s.grad.fill(0.0);
}

Model init_model(std::uint64_t seed, std::vector<std::size_t> layer_sizes) {
    Model model(std::move(layer_sizes));
    RngStream rng = RngStream(seed).derive("init");
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        auto& w = model.weight(l).values;
        const double bound = std::sqrt(6.0 / static_cast<double>(w.rows()));
        for (auto& v : w.flat()) v = rng.uniform(-bound, bound);
    }
    model.mark_updated();
    return model;
}

ForwardResult forward(const Model& model, const Matrix& x) {
    if (x.cols() != model.layer_sizes().front()) {
        throw ConfigError("forward: input width " + std::to_string(x.cols()) + ", model expects " +
                          std::to_string(model.layer_sizes().front()));
    }
    ForwardResult out;
    out.cache.model_identity = model.identity();
    out.cache.model_version = model.version();
    const std::size_t n = model.n_layers();
    out.cache.inputs.reserve(n);
    out.cache.pre_activations.reserve(n);

    Matrix activation = x;
    for (std::size_t l = 0; l < n; ++l) {
        Matrix z = matmul(activation, model.weight(l).values);
        add_row_vector(z, model.bias(l).values);
        out.cache.inputs.push_back(std::move(activation));
        if (l + 1 < n) {
            activation = z;
            for (auto& v : activation.flat()) v = v > 0.0 ? v : 0.0;
        } else {
            out.logits = z;
        }
        out.cache.pre_activations.push_back(std::move(z));
    }
    return out;
}

void backward(Model& model, const ForwardCache& cache, const Matrix& dlogits) {
    if (cache.model_identity != model.identity() || cache.model_version != model.version()) {
        throw ContractError("backward: cache is stale (model changed since forward)");
    }
    const std::size_t n = model.n_layers();
    if (cache.inputs.size() != n || !dlogits.same_shape(cache.pre_activations.back())) {
        throw ContractError("backward: cache does not match dlogits");
    }
    Matrix delta = dlogits;
    for (std::size_t l = n; l-- > 0;) {
        model.weight(l).grad = matmul_tn(cache.inputs[l], delta);
        model.bias(l).grad = column_sums(delta);
        if (l == 0) break;
        Matrix upstream = matmul_nt(delta, model.weight(l).values);
        const auto& z = cache.pre_activations[l - 1];
        auto up = upstream.flat();
        const auto zf = z.flat();
        for (std::size_t i = 0; i < up.size(); ++i) {
            if (zf[i] <= 0.0) up[i] = 0.0;
        }
        delta = std::move(upstream);
    }
}

double accuracy(const Matrix& logits, std::span<const std::size_t> y) {
    if (logits.rows() == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        if (argmax(logits.row(i)) == y[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

Evaluation evaluate(const Model& model, const Matrix& x, std::span<const std::size_t> y) {
    if (x.rows() != y.size()) throw ConfigError("evaluate: sample/label count mismatch");
    const auto fwd = forward(model, x);
    return {softmax_xent(fwd.logits, y).loss, accuracy(fwd.logits, y)};
}

}  // namespace lrbench
