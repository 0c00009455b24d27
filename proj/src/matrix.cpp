#include "fclt/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fclt {

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const
{
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        throw std::invalid_argument("multiply: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

double asymmetry(const Matrix& a)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument("asymmetry: matrix is not square");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    return worst;
}

EigenResult symmetric_eigenvalues(const Matrix& input, double tol, std::size_t max_sweeps)
{
    if (input.rows() != input.cols())
        throw std::invalid_argument("symmetric_eigenvalues: matrix is not square");
    const std::size_t n = input.rows();
    Matrix a = input;

    double total = 0.0;
    for (double x : a.data())
        total += x * x;
    const double scale = std::sqrt(total);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    EigenResult result;
    while (true) {
        if (scale == 0.0 || off_norm() <= tol * scale) {
            result.converged = true;
            break;
        }
        if (result.sweeps >= max_sweeps)
            break;
        ++result.sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    result.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        result.values[i] = a(i, i);
    std::sort(result.values.begin(), result.values.end());
    return result;
}

} // namespace fclt
