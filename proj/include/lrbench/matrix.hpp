#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lrbench {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }
    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    void fill(double value);
    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b. Throws ConfigError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b, without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * transpose(b), without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// Adds the 1 x cols row vector `bias` to every row of m.
void add_row_vector(Matrix& m, const Matrix& bias);
/// Column sums as a 1 x cols matrix.
Matrix column_sums(const Matrix& m);

double l2_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// Index of the largest entry; the lowest index wins ties.
std::size_t argmax(std::span<const double> v);

}  // namespace lrbench
