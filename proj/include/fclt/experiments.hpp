#ifndef FCLT_EXPERIMENTS_HPP
#define FCLT_EXPERIMENTS_HPP

#include "fclt/dgp.hpp"
#include "fclt/inference.hpp"
#include "fclt/stats.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fclt {

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    SimConfig base;
    std::vector<double> c_pi_grid{0.5, 1.0, 2.0};
    std::vector<double> c_fv_grid{0.0, 0.1, 0.2};
    std::size_t n_reps = 2000;
    std::size_t n_boot = 400;
    std::vector<double> levels{0.01, 0.05, 0.10};
    bool freeze_units = false;
    double lambda = 1.0; ///< risk premium of the two-step demo design

    /// N = T = 200, R = 2000, B = 400.
    static ExperimentConfig desk_scale();
    /// N = T = 500, B = 600, R = 10000 for the distribution study, 2000 otherwise.
    static ExperimentConfig full_scale(bool distribution_study);

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// Simulation design of grid cell (c_pi_grid[pi_index], c_fv_grid[fv_index]),
    /// with a master seed derived from (master_seed, cell id).
    SimConfig cell_config(std::size_t pi_index, double c_pi, std::size_t fv_index, double c_fv) const;

    bool operator==(const ExperimentConfig&) const = default;
};

struct RunOptions {
    std::size_t threads = 0; ///< 0 = all hardware threads
    std::function<void(std::string_view)> progress;
};

struct DistributionSummary {
    double mean = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    double right_quantile_5pct = 0.0;
    double std_dev = 0.0; ///< normalizing scale (divisor n - 1)
    std::size_t n_samples = 0;
};

/// Summary of samples / sd: mean, skewness m3/m2^1.5, raw kurtosis m4/m2^2 and
/// the linearly interpolated 95th percentile.
DistributionSummary summarize_moments(std::span<const double> samples);

/// Linear interpolation between order statistics at position (n - 1) p.
double empirical_quantile(std::span<const double> samples, double p);

struct DistributionRow {
    double c_pi = 0.0;
    DistributionSummary linear;
    DistributionSummary quadratic;
};

struct VarianceCheckRow {
    double c_pi = 0.0;
    std::size_t n_reps = 0;
    std::array<double, 2> empirical_var{};  ///< across-replication variance of each aggregate
    std::array<double, 2> mean_sigma_hat{}; ///< MC mean of the plug-in diagonal
    double target_sigma_v = 0.0;            ///< MC mean of Gamma^2 Sigma_fv + Gamma_omega Omega_v
    double target_sigma_w = 0.0;            ///< MC mean of omega^4 Omega_w
    double finite_n_sigma_w = 0.0;          ///< MC mean of (tr(E^2)/N) Omega_w
    double mean_gamma_pi_gamma = 0.0;

    double linear_ratio() const noexcept { return empirical_var[0] / mean_sigma_hat[0]; }
};

struct NullStudy {
    std::vector<DistributionRow> distribution;
    std::vector<VarianceCheckRow> variance;
};

/// One pass over the c_pi grid at c_fv = 0 feeding both the distribution table
/// and the variance check.
NullStudy run_null_study(const ExperimentConfig& config, const RunOptions& options = {});
std::vector<DistributionRow> run_distribution_study(const ExperimentConfig& config, const RunOptions& options = {});
std::vector<VarianceCheckRow> run_variance_check(const ExperimentConfig& config, const RunOptions& options = {});

std::string_view component_name(std::size_t component) noexcept;

struct RejectionCell {
    double c_pi = 0.0;
    double c_fv = 0.0;
    std::size_t component = Linear;
    Method method = Method::AsymptoticT;
    double level = 0.0;
    std::size_t rejections = 0;
    std::size_t n_reps = 0;
    double rate = 0.0;
    double mc_stderr = 0.0; ///< sqrt(rate (1 - rate) / R)
};

struct RejectionTable {
    std::vector<RejectionCell> cells;
    /// Bootstrap-t replicates dropped for zero variance, summed over the study.
    std::size_t t_star_excluded = 0;

    const RejectionCell& at(double c_pi, double c_fv, std::size_t component, Method method, double level) const;
};

RejectionTable run_size_power_study(const ExperimentConfig& config, const RunOptions& options = {});

} // namespace fclt

#endif
