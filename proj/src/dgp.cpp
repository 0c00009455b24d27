#include "fclt/dgp.hpp"

#include "fclt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace fclt {

void SimConfig::validate() const
{
    if (n_units < 1)
        throw std::invalid_argument("n_units must be at least 1");
    if (n_periods < 2)
        throw std::invalid_argument("n_periods must be at least 2");
    if (!(c_pi >= 0.0) || !std::isfinite(c_pi))
        throw std::invalid_argument("c_pi must be a finite value >= 0");
    if (!(std::abs(c_fv) <= 1.0))
        throw std::invalid_argument("c_fv must lie in [-1, 1]");
    if (n_factors < 1)
        throw std::invalid_argument("n_factors must be at least 1");
}

double tune_c_omega(std::span<const double> tau)
{
    if (tau.empty())
        throw std::invalid_argument("tune_c_omega: empty tau sequence");
    double sum = 0.0;
    for (double t : tau) {
        const double s = 1.0 + std::abs(t);
        sum += s * s;
    }
    return std::sqrt(static_cast<double>(tau.size()) / sum);
}

UnitParams make_unit_params(std::span<const double> tau, double c_pi)
{
    const std::size_t n = tau.size();
    UnitParams p;
    p.tau.assign(tau.begin(), tau.end());
    p.c_omega = tune_c_omega(tau);
    p.omega.resize(n);
    p.pi.resize(n);
    p.gamma.assign(n, 1.0);
    const double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        p.omega[i] = p.c_omega * (1.0 + std::abs(tau[i]));
        p.pi[i] = (c_pi + tau[i]) / root_n;
    }
    return p;
}

std::uint64_t replication_seed(const SimConfig& config, std::uint64_t rep_index) noexcept
{
    return mix_seed(config.master_seed, rep_index);
}

namespace {

void fill_normal(Rng rng, std::span<double> out)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : out)
        x = normal(rng);
}

} // namespace

FactorPanel simulate_panel(const SimConfig& config, std::uint64_t rep_index)
{
    config.validate();
    if (config.n_factors != 1)
        throw std::invalid_argument("simulate_panel: only the single-factor design is implemented");

    const std::size_t n = config.n_units;
    const std::size_t t_len = config.n_periods;
    const std::uint64_t seed = replication_seed(config, rep_index);

    FactorPanel panel;
    panel.config = config;

    std::vector<double> tau(n);
    const std::uint64_t unit_seed = config.freeze_units ? config.master_seed : seed;
    fill_normal(make_stream(unit_seed, Stream::Tau), tau);
    panel.params = make_unit_params(tau, config.c_pi);

    panel.f.resize(t_len);
    panel.eps_v.resize(t_len);
    fill_normal(make_stream(seed, Stream::Factor), panel.f);
    fill_normal(make_stream(seed, Stream::CommonShock), panel.eps_v);

    const double load_f = config.c_fv;
    const double load_eps = std::sqrt(1.0 - config.c_fv * config.c_fv);
    panel.v.resize(t_len);
    for (std::size_t t = 0; t < t_len; ++t)
        panel.v[t] = load_f * panel.f[t] + load_eps * panel.eps_v[t];

    panel.eta = Matrix(n, t_len);
    fill_normal(make_stream(seed, Stream::Eta), panel.eta.data());
    panel.e = Matrix(n, t_len);
    for (std::size_t i = 0; i < n; ++i) {
        const double omega = panel.params.omega[i];
        const double pi = panel.params.pi[i];
        auto eta = panel.eta.row(i);
        auto e = panel.e.row(i);
        for (std::size_t t = 0; t < t_len; ++t) {
            eta[t] *= omega;
            e[t] = pi * panel.f[t] + eta[t];
        }
    }
    return panel;
}

TheoreticalMoments theoretical_targets(const UnitParams& params, const SimConfig& config)
{
    const std::size_t n = params.size();
    if (n == 0 || params.pi.size() != n || params.omega.size() != n || params.gamma.size() != n)
        throw std::invalid_argument("theoretical_targets: inconsistent unit parameters");
    if (n != config.n_units)
        throw std::invalid_argument("theoretical_targets: parameter count differs from n_units");

    const double dn = static_cast<double>(n);
    double pi_gamma = 0.0;
    double omega_gamma = 0.0;
    double omega4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w2 = params.omega[i] * params.omega[i];
        pi_gamma += params.pi[i] * params.gamma[i];
        omega_gamma += w2 * params.gamma[i] * params.gamma[i];
        omega4 += w2 * w2;
    }

    TheoreticalMoments m;
    m.regime = Regime::ConditionalHeteroskedasticity;
    m.gamma_pi_gamma = pi_gamma / std::sqrt(dn);
    m.gamma_omega = omega_gamma / dn;
    m.omega4 = omega4 / dn;
    // v_t has unit variance and is iid over t, so E v_s^2 v_t^2 = 1 for s != t.
    m.omega_v = 1.0;
    m.omega_w = (1.0 - 1.0 / static_cast<double>(config.n_periods)) / 2.0;
    // E f^2 v^2 with v = c f + sqrt(1-c^2) eps: c^2 E f^4 + (1-c^2) = 1 + 2c^2.
    m.sigma_fv = 1.0 + 2.0 * config.c_fv * config.c_fv;
    m.sigma_v = m.gamma_pi_gamma * m.gamma_pi_gamma * m.sigma_fv + m.gamma_omega * m.omega_v;
    m.sigma_w = m.omega4 * m.omega_w;
    return m;
}

TheoreticalMoments independence_targets(const IndependenceDiagnostics& diag, double omega_v, double omega_w)
{
    TheoreticalMoments m;
    m.regime = Regime::Independence;
    m.omega_v = omega_v;
    m.omega_w = omega_w;
    m.sigma_v = diag.gamma_sigma * omega_v;
    m.sigma_w = diag.a_trace * omega_w;
    return m;
}

Matrix factor_error_covariance(const UnitParams& params)
{
    const std::size_t n = params.size();
    Matrix cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            cov(i, j) = params.pi[i] * params.pi[j];
        cov(i, i) += params.omega[i] * params.omega[i];
    }
    return cov;
}

double factor_design_a_trace(const UnitParams& params)
{
    const std::size_t n = params.size();
    if (n == 0)
        throw std::invalid_argument("factor_design_a_trace: no units");
    // tr((pp' + W)^2) = (p'p)^2 + 2 p'Wp + tr(W^2), W = diag(omega^2).
    double pp = 0.0;
    double pwp = 0.0;
    double w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p2 = params.pi[i] * params.pi[i];
        const double o2 = params.omega[i] * params.omega[i];
        pp += p2;
        pwp += p2 * o2;
        w2 += o2 * o2;
    }
    return (pp * pp + 2.0 * pwp + w2) / static_cast<double>(n);
}

IndependenceDiagnostics independence_diagnostics(const Matrix& cov_matrix,
                                                 std::span<const double> gamma,
                                                 double offdiag_threshold)
{
    const std::size_t n = cov_matrix.rows();
    if (n == 0 || cov_matrix.cols() != n)
        throw std::invalid_argument("independence_diagnostics: covariance must be square and non-empty");
    if (gamma.size() != n)
        throw std::invalid_argument("independence_diagnostics: gamma length differs from matrix size");

    double max_abs = 0.0;
    for (double x : cov_matrix.data())
        max_abs = std::max(max_abs, std::abs(x));
    if (asymmetry(cov_matrix) > 1e-12 * std::max(1.0, max_abs))
        throw std::invalid_argument("independence_diagnostics: covariance matrix is not symmetric");

    IndependenceDiagnostics d;
    d.cov_matrix = cov_matrix;
    const double dn = static_cast<double>(n);

    double quad = 0.0;
    double trace_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            quad += gamma[i] * cov_matrix(i, j) * gamma[j];
            // E symmetric, so tr(E^2) = sum_ij E_ij^2.
            trace_sq += cov_matrix(i, j) * cov_matrix(i, j);
        }
    d.gamma_sigma = quad / dn;
    d.a_trace = trace_sq / dn;

    constexpr double tol = 1e-10;
    const std::size_t max_sweeps = 10 * n;
    const EigenResult full = symmetric_eigenvalues(cov_matrix, tol, max_sweeps);
    d.max_eigenvalue = full.values.back();

    Matrix off = cov_matrix;
    for (std::size_t i = 0; i < n; ++i)
        off(i, i) = 0.0;
    const EigenResult off_eig = symmetric_eigenvalues(off, tol, max_sweeps);
    d.offdiag_norm = std::max(std::abs(off_eig.values.front()), std::abs(off_eig.values.back()));
    d.near_diagonal = d.offdiag_norm < offdiag_threshold;
    return d;
}

} // namespace fclt
