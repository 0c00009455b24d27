#ifndef FCLT_DGP_HPP
#define FCLT_DGP_HPP

#include "fclt/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fclt {

/// Design of one simulated factor panel.
struct SimConfig {
    std::size_t n_units = 200;
    std::size_t n_periods = 200;
    double c_pi = 0.5;  ///< strength of the latent error factor
    double c_fv = 0.0;  ///< dependence between the common variable and the factor
    std::uint64_t master_seed = 20200401;
    std::size_t n_factors = 1;
    /// Draw the unit parameters (tau) once from the master seed instead of per replication.
    bool freeze_units = false;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

struct UnitParams {
    std::vector<double> tau;
    std::vector<double> omega; ///< idiosyncratic standard deviations
    std::vector<double> pi;    ///< factor loadings
    std::vector<double> gamma; ///< aggregation weights
    double c_omega = 1.0;

    std::size_t size() const noexcept { return tau.size(); }
};

/// One simulated dataset. Immutable once built; share freely across threads.
struct FactorPanel {
    Matrix e;   ///< N x T idiosyncratic errors, e(i,t) = pi[i] f[t] + eta(i,t)
    Matrix eta; ///< N x T
    std::vector<double> v;     ///< common variable
    std::vector<double> f;     ///< latent factor
    std::vector<double> eps_v; ///< shock entering v
    UnitParams params;
    SimConfig config;

    std::size_t n_units() const noexcept { return e.rows(); }
    std::size_t n_periods() const noexcept { return e.cols(); }
};

enum class Regime { Independence, ConditionalHeteroskedasticity };

/// Limit quantities of the linear/quadratic CLT, in the scalar case.
struct TheoreticalMoments {
    double gamma_pi_gamma = 0.0; ///< (1/sqrt N) sum pi_i gamma_i
    double gamma_omega = 0.0;    ///< (1/N) sum omega_i^2 gamma_i^2
    double omega4 = 0.0;         ///< (1/N) sum omega_i^4
    double omega_v = 0.0;
    double omega_w = 0.0;
    double sigma_fv = 0.0;
    double sigma_v = 0.0;
    double sigma_w = 0.0;
    Regime regime = Regime::ConditionalHeteroskedasticity;
};

struct IndependenceDiagnostics {
    Matrix cov_matrix;
    double gamma_sigma = 0.0;    ///< gamma' E gamma / N
    double a_trace = 0.0;        ///< tr(E^2) / N
    double max_eigenvalue = 0.0;
    double offdiag_norm = 0.0;   ///< operator norm of E - dg(E)
    bool near_diagonal = false;  ///< offdiag_norm < caller threshold
};

/// Scale making the cross-sectional average of omega_i^2 exactly one.
double tune_c_omega(std::span<const double> tau);

/// Loadings pi_i = (c_pi + tau_i)/sqrt(N), omega_i = c_omega (1 + |tau_i|), gamma_i = 1.
UnitParams make_unit_params(std::span<const double> tau, double c_pi);

/// Seed of replication `rep_index`; every draw of that replication descends from it.
std::uint64_t replication_seed(const SimConfig& config, std::uint64_t rep_index) noexcept;

FactorPanel simulate_panel(const SimConfig& config, std::uint64_t rep_index);

/// Finite-N moments from the unit parameters plus the design's closed forms for
/// the common-variable moments.
TheoreticalMoments theoretical_targets(const UnitParams& params, const SimConfig& config);

/// Targets under the independence regime: Sigma_V = Gamma_sigma Omega_v and
/// Sigma_W = a Omega_w, with Gamma_sigma and a taken from the diagnostics.
TheoreticalMoments independence_targets(const IndependenceDiagnostics& diag, double omega_v, double omega_w);

/// Cross-sectional covariance pi pi' + diag(omega^2) implied by the factor design.
Matrix factor_error_covariance(const UnitParams& params);

/// tr(E^2)/N for E = pi pi' + diag(omega^2), in O(N).
double factor_design_a_trace(const UnitParams& params);

IndependenceDiagnostics independence_diagnostics(const Matrix& cov_matrix,
                                                 std::span<const double> gamma,
                                                 double offdiag_threshold = 0.1);

} // namespace fclt

#endif
