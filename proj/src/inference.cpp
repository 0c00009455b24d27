#include "fclt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fclt {

std::string_view method_name(Method m) noexcept
{
    switch (m) {
    case Method::AsymptoticT:
        return "asy-t";
    case Method::BootstrapXi:
        return "bootstrap-xi";
    case Method::BootstrapT:
        return "bootstrap-t";
    }
    return "unknown";
}

RademacherWeights rademacher_weights(std::size_t n_periods, Rng& stream)
{
    if (n_periods < 1)
        throw std::invalid_argument("rademacher_weights: need at least one period");
    RademacherWeights w;
    w.delta.resize(n_periods);
    std::uint64_t bits = 0;
    for (std::size_t t = 0; t < n_periods; ++t) {
        if (t % 64 == 0)
            bits = stream();
        w.delta[t] = (bits & 1u) ? 1.0 : -1.0;
        bits >>= 1;
    }
    return w;
}

XiSample bootstrap_replicate(const XiKernel& kernel, const RademacherWeights& delta)
{
    if (delta.delta.size() != kernel.n_periods())
        throw std::invalid_argument("bootstrap_replicate: weight length differs from panel periods");
    return kernel.evaluate(delta.delta);
}

XiSample bootstrap_replicate(const FactorPanel& panel, const RademacherWeights& delta)
{
    return bootstrap_replicate(XiKernel(panel), delta);
}

BootstrapDraws run_bootstrap(const XiKernel& kernel, std::size_t b_reps, std::uint64_t stream_seed, bool with_t)
{
    if (b_reps < 1)
        throw std::invalid_argument("run_bootstrap: need at least one replicate");
    BootstrapDraws draws;
    draws.b_reps = b_reps;
    draws.xi_star.resize(b_reps);
    if (with_t)
        draws.t_star.resize(b_reps);

    XiSample scratch;
    for (std::size_t b = 0; b < b_reps; ++b) {
        Rng stream(mix_seed(stream_seed, b));
        const RademacherWeights delta = rademacher_weights(kernel.n_periods(), stream);
        kernel.evaluate(delta.delta, scratch);
        draws.xi_star[b] = scratch.aggregate;
        if (with_t) {
            const VarianceEstimate est = variance_estimate(scratch);
            for (std::size_t k = 0; k < 2; ++k) {
                if (est.t_stats[k]) {
                    draws.t_star[b][k] = *est.t_stats[k];
                } else {
                    draws.t_star[b][k] = std::numeric_limits<double>::quiet_NaN();
                    ++draws.t_excluded[k];
                }
            }
        }
    }
    for (std::size_t k = 0; k < 2 && with_t; ++k) {
        if (static_cast<double>(draws.t_excluded[k]) > kMaxExcludedFraction * static_cast<double>(b_reps))
            throw DegenerateVarianceError("run_bootstrap: " + std::to_string(draws.t_excluded[k]) + " of "
                                          + std::to_string(b_reps) + " bootstrap-t replicates of component "
                                          + std::to_string(k) + " have zero variance");
    }
    return draws;
}

BootstrapDraws run_bootstrap(const FactorPanel& panel, std::size_t b_reps, std::uint64_t stream_seed, bool with_t)
{
    return run_bootstrap(XiKernel(panel), b_reps, stream_seed, with_t);
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: probability must lie in (0, 1)");

    // Acklam's rational approximation (relative error ~1.2e-9) ...
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // ... polished by one Halley step against erfc.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

TestDecision test_asymptotic(double t, double level)
{
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("test_asymptotic: level must lie in (0, 1)");
    TestDecision d;
    d.method = Method::AsymptoticT;
    d.statistic = t;
    d.level = level;
    d.critical_value = normal_quantile(1.0 - level / 2.0);
    d.reject = std::abs(t) > d.critical_value;
    return d;
}

namespace {

// ceil(x) that ignores representation noise: (1 - 0.05) * 20 must give 19.
std::size_t robust_ceil(double x)
{
    return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

} // namespace

std::size_t min_bootstrap_reps(double level)
{
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("min_bootstrap_reps: level must lie in (0, 1)");
    return robust_ceil(1.0 / level) - 1;
}

double bootstrap_critical_value(std::span<const double> values, double level)
{
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_critical_value: level must lie in (0, 1)");
    const std::size_t b = values.size();
    const std::size_t rank = robust_ceil((1.0 - level) * static_cast<double>(b + 1));
    if (b == 0 || rank < 1 || rank > b)
        throw std::invalid_argument("bootstrap_critical_value: " + std::to_string(b)
                                    + " bootstrap replicates cannot attain the quantile for level "
                                    + std::to_string(level) + " (need at least "
                                    + std::to_string(min_bootstrap_reps(level)) + ")");
    std::vector<double> abs_values(b);
    std::transform(values.begin(), values.end(), abs_values.begin(), [](double x) { return std::abs(x); });
    std::nth_element(abs_values.begin(), abs_values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     abs_values.end());
    return abs_values[rank - 1];
}

TestDecision test_bootstrap(double observed, std::span<const double> values, double level, Method method)
{
    std::vector<double> kept;
    kept.reserve(values.size());
    for (double x : values)
        if (!std::isnan(x))
            kept.push_back(x);
    TestDecision d;
    d.method = method;
    d.statistic = observed;
    d.level = level;
    d.critical_value = bootstrap_critical_value(kept, level);
    d.reject = std::abs(observed) > d.critical_value;
    return d;
}

std::vector<double> column(const std::vector<std::array<double, 2>>& rows, std::size_t k)
{
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[i] = rows[i][k];
    return out;
}

} // namespace fclt
