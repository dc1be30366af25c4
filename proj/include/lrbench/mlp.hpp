#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrbench/matrix.hpp"

namespace lrbench {

enum class SlotKind { weight, bias };

/// One optimizer-visible parameter group: the weight or bias of one linear layer.
struct LayerSlot {
    std::string id;
    SlotKind kind = SlotKind::weight;
    Matrix values;
    Matrix grad;
    std::size_t layer_index = 0;  ///< 0 = bottom linear layer
    double depth_ratio = 0.0;     ///< layer_index / (L - 1); 0 when L == 1
};

/// Fully connected ReLU network. Layer i maps sizes[i] -> sizes[i+1]; the last
/// layer has no activation. Slots are ordered w0, b0, w1, b1, ...
class Model {
public:
    /// Zero-initialized network. Needs at least two sizes.
    explicit Model(std::vector<std::size_t> layer_sizes);

    const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
    std::size_t n_layers() const noexcept { return sizes_.size() - 1; }

    std::span<LayerSlot> slots() noexcept { return slots_; }
    std::span<const LayerSlot> slots() const noexcept { return slots_; }
    LayerSlot& weight(std::size_t layer) { return slots_[2 * layer]; }
    const LayerSlot& weight(std::size_t layer) const { return slots_[2 * layer]; }
    LayerSlot& bias(std::size_t layer) { return slots_[2 * layer + 1]; }
    const LayerSlot& bias(std::size_t layer) const { return slots_[2 * layer + 1]; }

    std::size_t parameter_count() const noexcept;

    /// Anything that writes slot values must call this so cached activations
    /// from earlier forward passes are recognized as stale.
    void mark_updated() noexcept { ++version_; }
    std::uint64_t version() const noexcept { return version_; }
    std::uint64_t identity() const noexcept { return identity_; }

    void zero_grad();

private:
    std::vector<std::size_t> sizes_;
    std::vector<LayerSlot> slots_;
    std::uint64_t identity_;
    std::uint64_t version_ = 0;
};

/// The benchmark network: 64 -> 128 -> 128 -> 10.
inline const std::vector<std::size_t> kBenchmarkLayerSizes{64, 128, 128, 10};

/// He-uniform weights in [-sqrt(6/fan_in), sqrt(6/fan_in)], zero biases.
Model init_model(std::uint64_t seed, std::vector<std::size_t> layer_sizes = kBenchmarkLayerSizes);

struct ForwardCache {
    std::uint64_t model_identity = 0;
    std::uint64_t model_version = 0;
    /// inputs[i] is the input to layer i (inputs[0] is x).
    std::vector<Matrix> inputs;
    /// pre_activations[i] is inputs[i] * W_i + b_i.
    std::vector<Matrix> pre_activations;
};

struct ForwardResult {
    Matrix logits;
    ForwardCache cache;
};

ForwardResult forward(const Model& model, const Matrix& x);

/// Writes d(loss)/d(slot) into every slot's grad given d(loss)/d(logits).
/// Throws ContractError when the cache was produced for other model values.
void backward(Model& model, const ForwardCache& cache, const Matrix& dlogits);

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

Evaluation evaluate(const Model& model, const Matrix& x, std::span<const std::size_t> y);

/// Fraction of rows whose argmax (lowest index on ties) equals the label.
double accuracy(const Matrix& logits, std::span<const std::size_t> y);

}  // namespace lrbench
