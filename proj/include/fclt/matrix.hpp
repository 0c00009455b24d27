#ifndef FCLT_MATRIX_HPP
#define FCLT_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace fclt {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    Matrix transposed() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

/// Largest |a(i,j) - a(j,i)|.
double asymmetry(const Matrix& a);

struct EigenResult {
    std::vector<double> values; ///< ascending
    std::size_t sweeps = 0;
    bool converged = false;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Stops when the off-diagonal
/// Frobenius norm falls below `tol` times the Frobenius norm of the input, or
/// after `max_sweeps` full sweeps.
EigenResult symmetric_eigenvalues(const Matrix& a, double tol, std::size_t max_sweeps);

} // namespace fclt

#endif
