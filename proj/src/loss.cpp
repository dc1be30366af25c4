#include "lrbench/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrbench/errors.hpp"

namespace lrbench {

Matrix softmax(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const auto z = logits.row(i);
        auto out = p.row(i);
        const double zmax = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            out[j] = std::exp(z[j] - zmax);
            total += out[j];
        }
        for (auto& x : out) x /= total;
    }
    return p;
}

XentResult softmax_xent(const Matrix& logits, std::span<const std::size_t> labels) {
    if (labels.size() != logits.rows()) {
        throw ConfigError("softmax_xent: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(logits.rows()) + " rows");
    }
    const std::size_t batch = logits.rows();
    XentResult result{0.0, Matrix(batch, logits.cols())};
    if (batch == 0) return result;
    const double inv_batch = 1.0 / static_cast<double>(batch);
    double total = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
        const auto z = logits.row(i);
        const std::size_t y = labels[i];
        if (y >= z.size()) throw ConfigError("softmax_xent: label out of range");
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - zmax);
        const double log_sum = std::log(sum);
        // -log softmax[y] = log(sum exp(z - zmax)) - (z[y] - zmax)
        total += log_sum - (z[y] - zmax);
        auto g = result.dlogits.row(i);
        for (std::size_t j = 0; j < z.size(); ++j) {
            g[j] = std::exp(z[j] - zmax - log_sum) * inv_batch;
        }
        g[y] -= inv_batch;
    }
    result.loss = total * inv_batch;
    return result;
}

}  // namespace lrbench
