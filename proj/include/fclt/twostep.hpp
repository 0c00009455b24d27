#ifndef FCLT_TWOSTEP_HPP
#define FCLT_TWOSTEP_HPP

#include "fclt/dgp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fclt {

class DegenerateRegressorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Excess returns on N assets priced by one factor.
struct AssetPanel {
    Matrix r;                ///< N x T returns
    std::vector<double> F;   ///< risk factor
    double true_lambda = 0.0;
    std::vector<double> true_beta;
    /// var(e_it) per unit; needed for the conditional centering in noise_decomposition.
    std::vector<double> error_var;

    std::size_t n_units() const noexcept { return r.rows(); }
    std::size_t n_periods() const noexcept { return r.cols(); }
};

/// Period selector for sub-sample regressions; mask[t] != 0 keeps period t.
using PeriodMask = std::vector<char>;

struct FirstPassEstimates {
    std::vector<double> beta1; ///< mean returns
    std::vector<double> beta2; ///< slopes, full sample or first sub-sample
    std::optional<std::vector<double>> beta3; ///< second sub-sample slopes
    bool intercept = false; ///< slopes came from regressions with an intercept
};

struct FirstPassOptions {
    bool split = false;     ///< estimate beta2/beta3 on complementary sub-samples
    std::size_t split_at = 0; ///< first period of the second sub-sample; 0 means T/2
    bool intercept = false;
};

/// Masks [0, split_at) and [split_at, T).
std::pair<PeriodMask, PeriodMask> split_masks(std::size_t n_periods, std::size_t split_at);

/// Per-unit OLS slope of r_it on F_t over the masked periods.
std::vector<double> first_pass(const AssetPanel& panel, const std::optional<PeriodMask>& mask = std::nullopt,
                               bool intercept = false);

std::vector<double> mean_returns(const AssetPanel& panel);

FirstPassEstimates estimate_first_pass(const AssetPanel& panel, const FirstPassOptions& options = {});

/// (1/N) sum gamma_i beta_hat_i
double weighted_average_estimator(std::span<const double> gamma, std::span<const double> beta_hat);

/// sum beta1 beta2 / sum beta2^2
double fama_macbeth(std::span<const double> beta1, std::span<const double> beta2);

/// sum beta3 beta2 / sum beta3 beta1
double split_sample_iv(std::span<const double> beta1, std::span<const double> beta2, std::span<const double> beta3);

/// Splits the centered sample covariance of (beta1_hat, beta2_hat) into the part
/// linear in the estimation noise and the part quadratic in it. Requires the
/// simulation truth. The centering E[eps1 eps2] is taken conditionally on the
/// realized factor path.
struct NoiseDecomposition {
    double linear = 0.0;
    double quadratic = 0.0;
    double total = 0.0;
};

NoiseDecomposition noise_decomposition(const AssetPanel& panel, const FirstPassEstimates& estimates);

/// r_it = beta_i (lambda + F_t) + e_it with beta_i ~ 1 + N(0,1), F_t ~ N(0,1) and
/// e drawn from simulate_panel(config, rep_index).
AssetPanel simulate_asset_panel(const SimConfig& config, double lambda, std::uint64_t rep_index);

enum class Estimator { WeightedAverage, FamaMacBeth, SplitSampleIV };

const char* estimator_name(Estimator e) noexcept;

/// All three second-step estimates on one panel. The weighted average uses the
/// true-beta weights gamma_i = beta_i / mean(beta^2) applied to mean returns.
struct LambdaEstimates {
    double weighted_average = 0.0;
    double fama_macbeth = 0.0;
    double split_sample_iv = 0.0;

    double get(Estimator e) const noexcept;
};

LambdaEstimates estimate_lambda(const AssetPanel& panel, bool intercept = false);

struct BootstrapInterval {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double half_width = 0.0;
    double level = 0.0;
    std::size_t b_reps = 0;
};

/// Symmetric wild-bootstrap interval for each estimator. Returns are rebuilt as
/// a_i + b_i F_t + delta_t u_it from the intercept first-pass fit, and the
/// half-width is the bootstrap critical value of |lambda* - lambda_hat|.
std::vector<std::pair<Estimator, BootstrapInterval>>
bootstrap_intervals(const AssetPanel& panel, std::size_t b_reps, double level, std::uint64_t stream_seed,
                    bool intercept = false);

} // namespace fclt

#endif
