#include "lrbench/synthdata.hpp"

#include <cmath>
#include <ostream>
#include <span>

#include "lrbench/errors.hpp"
#include "lrbench/rng.hpp"

namespace lrbench {

void DataConfig::validate() const {
    if (n_samples < 2) throw ConfigError("DataConfig: need at least two samples");
    if (signal_dims != n_classes) {
        throw ConfigError("DataConfig: signal_dims must equal n_classes for argmax labels");
    }
    if (n_classes < 2) throw ConfigError("DataConfig: need at least two classes");
    if (signal_dims > dim) throw ConfigError("DataConfig: signal_dims exceeds dim");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("DataConfig: train_fraction must lie in (0, 1)");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ConfigError("DataConfig: noise_sigma must be finite and non-negative");
    }
    if (std::isnan(signal_scale)) throw ConfigError("DataConfig: signal_scale is NaN");
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n_samples)));
    if (n_train == 0 || n_train == n_samples) {
        throw ConfigError("DataConfig: split leaves an empty train or test set");
    }
}

Dataset generate(const DataConfig& config) {
    config.validate();
    RngStream rng = RngStream(config.seed).derive("synthdata");

    Matrix x(config.n_samples, config.dim);
    std::vector<std::size_t> y(config.n_samples);
    for (std::size_t i = 0; i < config.n_samples; ++i) {
        const std::size_t drawn = rng.uniform_index(config.n_classes);
        auto row = x.row(i);
        for (std::size_t j = 0; j < config.signal_dims; ++j) row[j] = rng.normal();
        row[drawn] += config.signal_scale;
        for (std::size_t j = config.signal_dims; j < config.dim; ++j) {
            row[j] = config.noise_sigma * rng.normal();
        }
        y[i] = argmax(row.first(config.signal_dims));
    }

    const auto n_train = static_cast<std::size_t>(
        std::floor(config.train_fraction * static_cast<double>(config.n_samples)));
    const std::size_t n_test = config.n_samples - n_train;

    Dataset data;
    data.train_x = Matrix(n_train, config.dim,
                          std::vector<double>(x.data(), x.data() + n_train * config.dim));
    data.test_x = Matrix(n_test, config.dim,
                         std::vector<double>(x.data() + n_train * config.dim, x.data() + x.size()));
    data.train_y.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_train));
    data.test_y.assign(y.begin() + static_cast<std::ptrdiff_t>(n_train), y.end());
    return data;
}

void write_csv(const Dataset& data, std::ostream& out) {
    const auto precision = out.precision(17);
    auto emit = [&out](const Matrix& xs, const std::vector<std::size_t>& ys) {
        for (std::size_t i = 0; i < xs.rows(); ++i) {
            for (double v : xs.row(i)) out << v << ',';
            out << ys[i] << '\n';
        }
    };
    emit(data.train_x, data.train_y);
    emit(data.test_x, data.test_y);
    out.precision(precision);
}

}  // namespace lrbench
