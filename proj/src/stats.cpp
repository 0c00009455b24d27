#include "fclt/stats.hpp"

#include <cmath>
#include <utility>

namespace fclt {

double VarianceEstimate::t(std::size_t k) const
{
    if (k > 1)
        throw std::out_of_range("VarianceEstimate::t: component index");
    if (!t_stats[k])
        throw DegenerateVarianceError(k == Linear ? "linear component has zero estimated variance"
                                                  : "quadratic component has zero estimated variance");
    return *t_stats[k];
}

WeightFn product_weights(std::vector<double> v)
{
    return [v = std::move(v)](std::size_t s, std::size_t t) { return v[s] * v[t]; };
}

WeightFn symmetrized_product_weights(std::vector<double> v1, std::vector<double> v2)
{
    if (v1.size() != v2.size())
        throw std::invalid_argument("symmetrized_product_weights: length mismatch");
    return [v1 = std::move(v1), v2 = std::move(v2)](std::size_t s, std::size_t t) {
        return v1[s] * v2[t] + v1[t] * v2[s];
    };
}

XiKernel::XiKernel(const FactorPanel& panel)
    : XiKernel(panel.v, panel.e, panel.params.gamma)
{
}

XiKernel::XiKernel(std::span<const double> v, const Matrix& e, std::span<const double> gamma)
    : n_(e.rows()), t_(e.cols()), b_(e.rows() * e.cols()), gamma_(gamma.begin(), gamma.end()),
      prefix_(e.rows()), comp_()
{
    if (v.size() != t_)
        throw std::invalid_argument("XiKernel: common variable length differs from panel periods");
    if (gamma.size() != n_)
        throw std::invalid_argument("XiKernel: weight count differs from panel units");
    for (std::size_t i = 0; i < n_; ++i) {
        const auto row = e.row(i);
        for (std::size_t t = 0; t < t_; ++t)
            b_[t * n_ + i] = v[t] * row[t];
    }
}

template <bool Compensated>
void XiKernel::accumulate(std::span<const double> sign, XiSample& out) const
{
    double* lin = out.xi_linear.data();
    double* quad = out.xi_quadratic.data();
    double* prefix = prefix_.data();
    const double* gamma = gamma_.data();
    std::fill(prefix_.begin(), prefix_.end(), 0.0);

    // Neumaier compensation terms: [lin | quad | prefix].
    double* c_lin = nullptr;
    double* c_quad = nullptr;
    double* c_pre = nullptr;
    if constexpr (Compensated) {
        comp_.assign(3 * n_, 0.0);
        c_lin = comp_.data();
        c_quad = c_lin + n_;
        c_pre = c_quad + n_;
    }
    auto add = [](double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    };

    for (std::size_t s = 0; s < t_; ++s) {
        const double d = sign.empty() ? 1.0 : sign[s];
        const double* row = b_.data() + s * n_;
        if constexpr (Compensated) {
            for (std::size_t i = 0; i < n_; ++i) {
                const double x = d * row[i];
                add(lin[i], c_lin[i], gamma[i] * x);
                add(quad[i], c_quad[i], x * (prefix[i] + c_pre[i]));
                add(prefix[i], c_pre[i], x);
            }
        } else {
            for (std::size_t i = 0; i < n_; ++i) {
                const double x = d * row[i];
                lin[i] += gamma[i] * x;
                quad[i] += x * prefix[i];
                prefix[i] += x;
            }
        }
    }
    if constexpr (Compensated) {
        for (std::size_t i = 0; i < n_; ++i) {
            lin[i] += c_lin[i];
            quad[i] += c_quad[i];
        }
    }
}

void XiKernel::evaluate(std::span<const double> sign, XiSample& out) const
{
    if (!sign.empty() && sign.size() != t_)
        throw std::invalid_argument("XiKernel::evaluate: sign vector length differs from panel periods");
    out.xi_linear.assign(n_, 0.0);
    out.xi_quadratic.assign(n_, 0.0);
    if (t_ > kCompensatedPeriods)
        accumulate<true>(sign, out);
    else
        accumulate<false>(sign, out);

    const double lin_scale = 1.0 / std::sqrt(static_cast<double>(t_));
    const double quad_scale = 1.0 / static_cast<double>(t_);
    double lin_sum = 0.0;
    double quad_sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        out.xi_linear[i] *= lin_scale;
        out.xi_quadratic[i] *= quad_scale;
        lin_sum += out.xi_linear[i];
        quad_sum += out.xi_quadratic[i];
    }
    const double agg_scale = 1.0 / std::sqrt(static_cast<double>(n_));
    out.aggregate = {lin_sum * agg_scale, quad_sum * agg_scale};
}

XiSample XiKernel::evaluate(std::span<const double> sign) const
{
    XiSample out;
    evaluate(sign, out);
    return out;
}

std::vector<double> xi_linear(const FactorPanel& panel)
{
    return XiKernel(panel).evaluate().xi_linear;
}

std::vector<double> xi_quadratic_factored(const FactorPanel& panel)
{
    return XiKernel(panel).evaluate().xi_quadratic;
}

std::vector<double> xi_quadratic_direct(const FactorPanel& panel, const WeightFn& w)
{
    const std::size_t n = panel.n_units();
    const std::size_t t_len = panel.n_periods();
    std::vector<double> out(n, 0.0);
    if (t_len == 0)
        return out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = panel.e.row(i);
        double sum = 0.0;
        for (std::size_t s = 1; s < t_len; ++s)
            for (std::size_t t = 0; t < s; ++t)
                sum += w(s, t) * e[t] * e[s];
        out[i] = sum / static_cast<double>(t_len);
    }
    return out;
}

XiSample aggregate_xi(std::vector<double> lin, std::vector<double> quad)
{
    if (lin.size() != quad.size())
        throw std::invalid_argument("aggregate_xi: component lengths differ");
    if (lin.empty())
        throw std::invalid_argument("aggregate_xi: no units");
    XiSample s;
    s.xi_linear = std::move(lin);
    s.xi_quadratic = std::move(quad);
    double lin_sum = 0.0;
    double quad_sum = 0.0;
    for (std::size_t i = 0; i < s.xi_linear.size(); ++i) {
        lin_sum += s.xi_linear[i];
        quad_sum += s.xi_quadratic[i];
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.xi_linear.size()));
    s.aggregate = {lin_sum * scale, quad_sum * scale};
    return s;
}

XiSample compute_xi(const FactorPanel& panel)
{
    return XiKernel(panel).evaluate();
}

VarianceEstimate variance_estimate(const XiSample& sample)
{
    const std::size_t n = sample.n_units();
    if (n == 0 || sample.xi_quadratic.size() != n)
        throw std::invalid_argument("variance_estimate: empty or inconsistent sample");
    double s11 = 0.0;
    double s12 = 0.0;
    double s22 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = sample.xi_linear[i];
        const double b = sample.xi_quadratic[i];
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    VarianceEstimate est;
    est.sigma_hat = {{{s11 * inv_n, s12 * inv_n}, {s12 * inv_n, s22 * inv_n}}};
    for (std::size_t k = 0; k < 2; ++k) {
        const double var = est.sigma_hat[k][k];
        if (var > 0.0)
            est.t_stats[k] = sample.aggregate[k] / std::sqrt(var);
    }
    return est;
}

} // namespace fclt
