#include "fclt/twostep.hpp"

#include "fclt/inference.hpp"
#include "fclt/rng.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fclt {

std::pair<PeriodMask, PeriodMask> split_masks(std::size_t n_periods, std::size_t split_at)
{
    if (split_at == 0 || split_at >= n_periods)
        throw std::invalid_argument("split_masks: split point must lie strictly inside the sample");
    PeriodMask first(n_periods, 0);
    PeriodMask second(n_periods, 0);
    for (std::size_t t = 0; t < n_periods; ++t)
        (t < split_at ? first : second)[t] = 1;
    return {std::move(first), std::move(second)};
}

namespace {

struct MaskedFactor {
    std::vector<std::size_t> periods;
    double mean = 0.0;
    double denom = 0.0; ///< sum F^2, or sum (F - mean)^2 with an intercept
};

MaskedFactor prepare_factor(const AssetPanel& panel, const std::optional<PeriodMask>& mask, bool intercept)
{
    const std::size_t t_len = panel.n_periods();
    if (panel.F.size() != t_len)
        throw std::invalid_argument("first_pass: factor length differs from panel periods");
    if (mask && mask->size() != t_len)
        throw std::invalid_argument("first_pass: mask length differs from panel periods");

    MaskedFactor mf;
    for (std::size_t t = 0; t < t_len; ++t)
        if (!mask || (*mask)[t])
            mf.periods.push_back(t);
    if (mf.periods.size() < 2)
        throw DegenerateRegressorError("first_pass: fewer than two periods selected");

    const double first = panel.F[mf.periods.front()];
    bool constant = true;
    double sum = 0.0;
    for (std::size_t t : mf.periods) {
        constant = constant && panel.F[t] == first;
        sum += panel.F[t];
    }
    if (constant)
        throw DegenerateRegressorError("first_pass: factor has zero variance on the selected periods");
    mf.mean = intercept ? sum / static_cast<double>(mf.periods.size()) : 0.0;
    for (std::size_t t : mf.periods) {
        const double x = panel.F[t] - mf.mean;
        mf.denom += x * x;
    }
    return mf;
}

} // namespace

std::vector<double> first_pass(const AssetPanel& panel, const std::optional<PeriodMask>& mask, bool intercept)
{
    const MaskedFactor mf = prepare_factor(panel, mask, intercept);
    std::vector<double> slopes(panel.n_units());
    for (std::size_t i = 0; i < panel.n_units(); ++i) {
        const auto r = panel.r.row(i);
        double r_mean = 0.0;
        if (intercept) {
            for (std::size_t t : mf.periods)
                r_mean += r[t];
            r_mean /= static_cast<double>(mf.periods.size());
        }
        double cross = 0.0;
        for (std::size_t t : mf.periods)
            cross += (panel.F[t] - mf.mean) * (r[t] - r_mean);
        slopes[i] = cross / mf.denom;
    }
    return slopes;
}

std::vector<double> mean_returns(const AssetPanel& panel)
{
    const std::size_t t_len = panel.n_periods();
    if (t_len == 0)
        throw std::invalid_argument("mean_returns: no periods");
    std::vector<double> out(panel.n_units());
    for (std::size_t i = 0; i < panel.n_units(); ++i) {
        double s = 0.0;
        for (double x : panel.r.row(i))
            s += x;
        out[i] = s / static_cast<double>(t_len);
    }
    return out;
}

FirstPassEstimates estimate_first_pass(const AssetPanel& panel, const FirstPassOptions& options)
{
    FirstPassEstimates est;
    est.intercept = options.intercept;
    est.beta1 = mean_returns(panel);
    if (!options.split) {
        est.beta2 = first_pass(panel, std::nullopt, options.intercept);
        return est;
    }
    const std::size_t split_at = options.split_at == 0 ? panel.n_periods() / 2 : options.split_at;
    auto [first, second] = split_masks(panel.n_periods(), split_at);
    est.beta2 = first_pass(panel, first, options.intercept);
    est.beta3 = first_pass(panel, second, options.intercept);
    return est;
}

double weighted_average_estimator(std::span<const double> gamma, std::span<const double> beta_hat)
{
    if (gamma.size() != beta_hat.size())
        throw std::invalid_argument("weighted_average_estimator: length mismatch");
    if (gamma.empty())
        throw std::invalid_argument("weighted_average_estimator: no units");
    double s = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i)
        s += gamma[i] * beta_hat[i];
    return s / static_cast<double>(gamma.size());
}

double fama_macbeth(std::span<const double> beta1, std::span<const double> beta2)
{
    if (beta1.size() != beta2.size())
        throw std::invalid_argument("fama_macbeth: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < beta1.size(); ++i) {
        num += beta1[i] * beta2[i];
        den += beta2[i] * beta2[i];
    }
    if (den == 0.0)
        throw DegenerateRegressorError("fama_macbeth: estimated betas are all zero");
    return num / den;
}

double split_sample_iv(std::span<const double> beta1, std::span<const double> beta2, std::span<const double> beta3)
{
    if (beta1.size() != beta2.size() || beta1.size() != beta3.size())
        throw std::invalid_argument("split_sample_iv: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < beta1.size(); ++i) {
        num += beta3[i] * beta2[i];
        den += beta3[i] * beta1[i];
    }
    if (den == 0.0)
        throw DegenerateRegressorError("split_sample_iv: instrument is orthogonal to mean returns");
    return num / den;
}

NoiseDecomposition noise_decomposition(const AssetPanel& panel, const FirstPassEstimates& estimates)
{
    const std::size_t n = panel.n_units();
    const std::size_t t_len = panel.n_periods();
    if (panel.true_beta.size() != n || panel.error_var.size() != n)
        throw std::invalid_argument("noise_decomposition: panel carries no simulation truth");
    if (estimates.beta3)
        throw std::invalid_argument("noise_decomposition: needs full-sample first-pass estimates");
    if (estimates.beta1.size() != n || estimates.beta2.size() != n)
        throw std::invalid_argument("noise_decomposition: estimate length differs from panel units");

    // Conditional on F: with no intercept, eps2_i = beta_i lambda S1/S2 + sum F_t e_it / S2
    // and eps1_i = beta_i Fbar + ebar_i; with an intercept the cross moment vanishes.
    double s1 = 0.0;
    double s2 = 0.0;
    for (double x : panel.F) {
        s1 += x;
        s2 += x * x;
    }
    const double f_bar = s1 / static_cast<double>(t_len);
    const double lambda = panel.true_lambda;

    NoiseDecomposition out;
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = panel.true_beta[i];
        const double b1 = lambda * beta;
        const double b2 = beta;
        const double eps1 = estimates.beta1[i] - b1;
        const double eps2 = estimates.beta2[i] - b2;
        const double centering
            = estimates.intercept ? 0.0 : f_bar * (beta * beta * lambda * s1 + panel.error_var[i]) / s2;
        out.linear += b1 * eps2 + b2 * eps1;
        out.quadratic += eps1 * eps2 - centering;
        out.total += estimates.beta1[i] * estimates.beta2[i] - b1 * b2 - centering;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    out.linear *= scale;
    out.quadratic *= scale;
    out.total *= scale;
    return out;
}

AssetPanel simulate_asset_panel(const SimConfig& config, double lambda, std::uint64_t rep_index)
{
    const FactorPanel errors = simulate_panel(config, rep_index);
    const std::uint64_t seed = replication_seed(config, rep_index);
    const std::size_t n = config.n_units;
    const std::size_t t_len = config.n_periods;

    AssetPanel panel;
    panel.true_lambda = lambda;
    panel.F.resize(t_len);
    panel.true_beta.resize(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    {
        Rng rng = make_stream(seed, Stream::AssetFactor);
        for (double& x : panel.F)
            x = normal(rng);
    }
    {
        std::normal_distribution<double> beta_draw(1.0, 1.0);
        Rng rng = make_stream(seed, Stream::AssetBeta);
        for (double& x : panel.true_beta)
            x = beta_draw(rng);
    }
    panel.error_var.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pi = errors.params.pi[i];
        const double omega = errors.params.omega[i];
        panel.error_var[i] = pi * pi + omega * omega;
    }
    panel.r = Matrix(n, t_len);
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = errors.e.row(i);
        auto r = panel.r.row(i);
        for (std::size_t t = 0; t < t_len; ++t)
            r[t] = panel.true_beta[i] * (lambda + panel.F[t]) + e[t];
    }
    return panel;
}

const char* estimator_name(Estimator e) noexcept
{
    switch (e) {
    case Estimator::WeightedAverage:
        return "weighted_average";
    case Estimator::FamaMacBeth:
        return "fama_macbeth";
    case Estimator::SplitSampleIV:
        return "split_sample_iv";
    }
    return "unknown";
}

double LambdaEstimates::get(Estimator e) const noexcept
{
    switch (e) {
    case Estimator::WeightedAverage:
        return weighted_average;
    case Estimator::FamaMacBeth:
        return fama_macbeth;
    case Estimator::SplitSampleIV:
        return split_sample_iv;
    }
    return 0.0;
}

LambdaEstimates estimate_lambda(const AssetPanel& panel, bool intercept)
{
    const std::size_t n = panel.n_units();
    if (panel.true_beta.size() != n)
        throw std::invalid_argument("estimate_lambda: weighted average needs the true betas");

    const FirstPassEstimates full = estimate_first_pass(panel, {.split = false, .intercept = intercept});
    const FirstPassEstimates split = estimate_first_pass(panel, {.split = true, .intercept = intercept});

    double beta_sq = 0.0;
    for (double b : panel.true_beta)
        beta_sq += b * b;
    beta_sq /= static_cast<double>(n);
    if (beta_sq == 0.0)
        throw DegenerateRegressorError("estimate_lambda: true betas are all zero");
    std::vector<double> gamma(n);
    for (std::size_t i = 0; i < n; ++i)
        gamma[i] = panel.true_beta[i] / beta_sq;

    LambdaEstimates out;
    out.weighted_average = weighted_average_estimator(gamma, full.beta1);
    out.fama_macbeth = fama_macbeth(full.beta1, full.beta2);
    out.split_sample_iv = split_sample_iv(split.beta1, split.beta2, *split.beta3);
    return out;
}

std::vector<std::pair<Estimator, BootstrapInterval>>
bootstrap_intervals(const AssetPanel& panel, std::size_t b_reps, double level, std::uint64_t stream_seed,
                    bool intercept)
{
    const std::size_t n = panel.n_units();
    const std::size_t t_len = panel.n_periods();
    const LambdaEstimates point = estimate_lambda(panel, intercept);

    // Intercept fit used to rebuild returns.
    const std::vector<double> slope = first_pass(panel, std::nullopt, true);
    double f_mean = 0.0;
    for (double x : panel.F)
        f_mean += x;
    f_mean /= static_cast<double>(t_len);
    const std::vector<double> r_mean = mean_returns(panel);
    Matrix fitted(n, t_len);
    Matrix resid(n, t_len);
    for (std::size_t i = 0; i < n; ++i) {
        const double alpha = r_mean[i] - slope[i] * f_mean;
        for (std::size_t t = 0; t < t_len; ++t) {
            fitted(i, t) = alpha + slope[i] * panel.F[t];
            resid(i, t) = panel.r(i, t) - fitted(i, t);
        }
    }

    constexpr Estimator kAll[] = {Estimator::WeightedAverage, Estimator::FamaMacBeth, Estimator::SplitSampleIV};
    std::vector<std::vector<double>> deviations(3, std::vector<double>(b_reps));
    AssetPanel star = panel;
    for (std::size_t b = 0; b < b_reps; ++b) {
        Rng stream(mix_seed(stream_seed, b));
        const RademacherWeights delta = rademacher_weights(t_len, stream);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < t_len; ++t)
                star.r(i, t) = fitted(i, t) + delta.delta[t] * resid(i, t);
        const LambdaEstimates est = estimate_lambda(star, intercept);
        for (std::size_t k = 0; k < 3; ++k)
            deviations[k][b] = est.get(kAll[k]) - point.get(kAll[k]);
    }

    std::vector<std::pair<Estimator, BootstrapInterval>> out;
    for (std::size_t k = 0; k < 3; ++k) {
        BootstrapInterval ci;
        ci.estimate = point.get(kAll[k]);
        ci.half_width = bootstrap_critical_value(deviations[k], level);
        ci.lower = ci.estimate - ci.half_width;
        ci.upper = ci.estimate + ci.half_width;
        ci.level = level;
        ci.b_reps = b_reps;
        out.emplace_back(kAll[k], ci);
    }
    return out;
}

} // namespace fclt
