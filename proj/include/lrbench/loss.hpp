#pragma once

#include <cstddef>
#include <span>

#include "lrbench/matrix.hpp"

namespace lrbench {

/// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);

struct XentResult {
    double loss = 0.0;  ///< mean over the batch of -log p[label]
    Matrix dlogits;     ///< (softmax - onehot) / batch
};

/// Mean softmax cross-entropy and its gradient with respect to the logits.
XentResult softmax_xent(const Matrix& logits, std::span<const std::size_t> labels);

}  // namespace lrbench
