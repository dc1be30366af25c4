#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lrbench/matrix.hpp"

namespace lrbench {

/// Gaussian-mixture classification task. Defaults are the benchmark protocol:
/// 8000 samples in R^64, 10 signal dimensions scaled by 3, noise sigma 0.1,
/// 6400/1600 split, seed 42.
struct DataConfig {
    std::size_t n_samples = 8000;
    std::size_t dim = 64;
    std::size_t signal_dims = 10;
    double signal_scale = 3.0;
    double noise_sigma = 0.1;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    std::size_t n_classes = 10;

    /// Throws ConfigError on an inconsistent configuration.
    void validate() const;
};

struct Dataset {
    Matrix train_x;
    std::vector<std::size_t> train_y;
    Matrix test_x;
    std::vector<std::size_t> test_y;
};

/// Draws a class uniformly per sample, fills the signal block with N(0,1) plus
/// signal_scale on the drawn class coordinate and the rest with
/// N(0, noise_sigma^2), then labels each sample by the argmax of its signal
/// block. The first floor(train_fraction * n) samples form the train split.
Dataset generate(const DataConfig& config);

/// One sample per row, features then the integer label. Train rows first.
void write_csv(const Dataset& data, std::ostream& out);

}  // namespace lrbench
