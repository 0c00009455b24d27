#include "fclt/dgp.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace fclt;

TEST_CASE("tune_c_omega")
{
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    CHECK(tune_c_omega(zeros) == doctest::Approx(1.0).epsilon(1e-15));
    // sum (1 + |tau|)^2 = 8, sqrt(2 / 8) = 0.5
    const std::vector<double> pm{1.0, -1.0};
    CHECK(tune_c_omega(pm) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(tune_c_omega(std::vector<double>{}), std::invalid_argument);

    SUBCASE("tuning target holds for arbitrary draws")
    {
        Rng rng(99);
        std::normal_distribution<double> normal(0.0, 3.0);
        for (std::size_t n : {1u, 2u, 17u, 500u}) {
            std::vector<double> tau(n);
            for (double& t : tau)
                t = normal(rng);
            const UnitParams p = make_unit_params(tau, 1.5);
            double mean_sq = 0.0;
            for (double w : p.omega)
                mean_sq += w * w;
            mean_sq /= static_cast<double>(n);
            CHECK(std::abs(mean_sq - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("unit parameters follow the factor design")
{
    const std::vector<double> tau{0.3, -1.2, 2.0, 0.0};
    const double c_pi = 0.75;
    const UnitParams p = make_unit_params(tau, c_pi);
    const double root_n = 2.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        CHECK(p.omega[i] == doctest::Approx(p.c_omega * (1.0 + std::abs(tau[i]))).epsilon(1e-15));
        CHECK(p.pi[i] * root_n - tau[i] == doctest::Approx(c_pi).epsilon(1e-14));
        CHECK(p.gamma[i] == 1.0);
    }
}

TEST_CASE("simulate_panel shape, determinism and construction identities")
{
    SimConfig cfg;
    cfg.n_units = 2;
    cfg.n_periods = 3;
    cfg.master_seed = 7;
    cfg.c_fv = 0.3;
    const FactorPanel a = simulate_panel(cfg, 0);
    CHECK(a.e.rows() == 2);
    CHECK(a.e.cols() == 3);
    CHECK(a.v.size() == 3);

    const FactorPanel b = simulate_panel(cfg, 0);
    CHECK(a.e == b.e);
    CHECK(a.v == b.v);
    CHECK(a.params.tau == b.params.tau);

    const FactorPanel c = simulate_panel(cfg, 1);
    CHECK(a.e != c.e);

    cfg.n_units = 13;
    cfg.n_periods = 11;
    const FactorPanel p = simulate_panel(cfg, 3);
    const double load = std::sqrt(1.0 - cfg.c_fv * cfg.c_fv);
    for (std::size_t t = 0; t < p.n_periods(); ++t)
        CHECK(p.v[t] == cfg.c_fv * p.f[t] + load * p.eps_v[t]);
    for (std::size_t i = 0; i < p.n_units(); ++i)
        for (std::size_t t = 0; t < p.n_periods(); ++t)
            CHECK(p.e(i, t) == p.params.pi[i] * p.f[t] + p.eta(i, t));
}

TEST_CASE("replication order never changes a panel")
{
    SimConfig cfg;
    cfg.n_units = 5;
    cfg.n_periods = 6;
    std::vector<Matrix> forward;
    for (std::uint64_t r = 0; r < 8; ++r)
        forward.push_back(simulate_panel(cfg, r).e);
    for (std::uint64_t r = 8; r-- > 0;)
        CHECK(simulate_panel(cfg, r).e == forward[r]);
}

TEST_CASE("freeze_units keeps tau fixed across replications")
{
    SimConfig cfg;
    cfg.n_units = 10;
    cfg.n_periods = 4;
    cfg.freeze_units = true;
    CHECK(simulate_panel(cfg, 0).params.tau == simulate_panel(cfg, 1).params.tau);
    CHECK(simulate_panel(cfg, 0).f != simulate_panel(cfg, 1).f);
    cfg.freeze_units = false;
    CHECK(simulate_panel(cfg, 0).params.tau != simulate_panel(cfg, 1).params.tau);
}

TEST_CASE("invalid designs are rejected")
{
    SimConfig cfg;
    cfg.c_fv = 1.5;
    CHECK_THROWS_AS(simulate_panel(cfg, 0), std::invalid_argument);
    cfg.c_fv = 0.0;
    cfg.n_periods = 1;
    CHECK_THROWS_AS(simulate_panel(cfg, 0), std::invalid_argument);
    cfg.n_periods = 5;
    cfg.n_factors = 2;
    CHECK_THROWS_AS(simulate_panel(cfg, 0), std::invalid_argument);
}

TEST_CASE("v and f are uncorrelated when c_fv = 0")
{
    SimConfig cfg;
    cfg.n_units = 200;
    cfg.n_periods = 200;
    cfg.c_fv = 0.0;
    cfg.master_seed = 5;
    double corr_sum = 0.0;
    const int reps = 500;
    for (int r = 0; r < reps; ++r) {
        const FactorPanel p = simulate_panel(cfg, static_cast<std::uint64_t>(r));
        const double n = static_cast<double>(p.n_periods());
        const double mv = std::accumulate(p.v.begin(), p.v.end(), 0.0) / n;
        const double mf = std::accumulate(p.f.begin(), p.f.end(), 0.0) / n;
        double svf = 0.0;
        double svv = 0.0;
        double sff = 0.0;
        for (std::size_t t = 0; t < p.n_periods(); ++t) {
            svf += (p.v[t] - mv) * (p.f[t] - mf);
            svv += (p.v[t] - mv) * (p.v[t] - mv);
            sff += (p.f[t] - mf) * (p.f[t] - mf);
        }
        corr_sum += svf / std::sqrt(svv * sff);
    }
    CHECK(std::abs(corr_sum / reps) <= 0.02);
}

TEST_CASE("theoretical targets")
{
    SUBCASE("degenerate draws")
    {
        const std::vector<double> tau(4, 0.0);
        const UnitParams p = make_unit_params(tau, 0.0);
        SimConfig cfg;
        cfg.n_units = 4;
        cfg.n_periods = 10;
        cfg.c_pi = 0.0;
        const TheoreticalMoments m = theoretical_targets(p, cfg);
        CHECK(m.gamma_pi_gamma == 0.0);
        CHECK(m.gamma_omega == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(m.omega4 == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(m.omega_w == doctest::Approx(0.45).epsilon(1e-15));
        CHECK(m.sigma_fv == 1.0);
    }

    SUBCASE("Gamma_pi_gamma approaches c_pi for large N")
    {
        const std::size_t n = 1000000;
        Rng rng(11);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> tau(n);
        for (double& t : tau)
            t = normal(rng);
        SimConfig cfg;
        cfg.n_units = n;
        cfg.c_pi = 1.0;
        const TheoreticalMoments m = theoretical_targets(make_unit_params(tau, cfg.c_pi), cfg);
        // Gamma = c_pi + mean(tau); sd of mean(tau) is 1e-3.
        CHECK(std::abs(m.gamma_pi_gamma - 1.0) < 5e-3);
    }

    SUBCASE("scalar heteroskedastic assembly")
    {
        SimConfig cfg;
        cfg.n_units = 50;
        cfg.n_periods = 40;
        cfg.c_pi = 2.0;
        cfg.c_fv = 0.2;
        const FactorPanel panel = simulate_panel(cfg, 2);
        const TheoreticalMoments m = theoretical_targets(panel.params, cfg);
        CHECK(m.regime == Regime::ConditionalHeteroskedasticity);
        CHECK(m.sigma_fv == doctest::Approx(1.08).epsilon(1e-14));
        CHECK(m.sigma_w == doctest::Approx(m.omega4 * m.omega_w).epsilon(1e-15));
        CHECK(m.sigma_v
              == doctest::Approx(m.gamma_pi_gamma * m.gamma_pi_gamma * m.sigma_fv + m.gamma_omega * m.omega_v)
                     .epsilon(1e-15));
        CHECK(m.sigma_v > 0.0);
        CHECK(m.sigma_w > 0.0);
    }

    SUBCASE("c_fv = 0: Sigma_V = Gamma^2 + Gamma_omega")
    {
        SimConfig cfg;
        cfg.n_units = 30;
        cfg.c_pi = 1.0;
        const FactorPanel panel = simulate_panel(cfg, 0);
        const TheoreticalMoments m = theoretical_targets(panel.params, cfg);
        CHECK(m.sigma_fv == 1.0);
        CHECK(m.sigma_v == doctest::Approx(m.gamma_pi_gamma * m.gamma_pi_gamma + m.gamma_omega).epsilon(1e-15));
    }
}

// Monte Carlo confirmation of the closed forms Sigma_fv = 1 + 2 c_fv^2 and
// Omega_w = (1 - 1/T)/2 before anything downstream relies on them.
TEST_CASE("common-variable moments match their closed forms")
{
    for (double c_fv : {0.0, 0.5}) {
        SimConfig cfg;
        cfg.n_units = 1;
        cfg.n_periods = 200;
        cfg.c_fv = c_fv;
        cfg.master_seed = 2024;
        const int draws = 10000;
        double fv_sum = 0.0;
        double w_sum = 0.0;
        for (int r = 0; r < draws; ++r) {
            const FactorPanel p = simulate_panel(cfg, static_cast<std::uint64_t>(r));
            const double t_len = static_cast<double>(p.n_periods());
            double fv = 0.0;
            double prefix_sq = 0.0;
            double w = 0.0;
            for (std::size_t s = 0; s < p.n_periods(); ++s) {
                const double v2 = p.v[s] * p.v[s];
                fv += p.f[s] * p.f[s] * v2;
                w += v2 * prefix_sq; // sum over t < s of v_s^2 v_t^2
                prefix_sq += v2;
            }
            fv_sum += fv / t_len;
            w_sum += w / (t_len * t_len);
        }
        const TheoreticalMoments m
            = theoretical_targets(simulate_panel(cfg, 0).params, cfg);
        CHECK(std::abs(fv_sum / draws / m.sigma_fv - 1.0) < 0.02);
        CHECK(std::abs(w_sum / draws / m.omega_w - 1.0) < 0.02);
    }
}

TEST_CASE("independence diagnostics")
{
    SUBCASE("identity")
    {
        const Matrix e = Matrix::identity(3);
        const std::vector<double> g{1.0, 1.0, 1.0};
        const IndependenceDiagnostics d = independence_diagnostics(e, g);
        CHECK(d.gamma_sigma == doctest::Approx(1.0));
        CHECK(d.a_trace == doctest::Approx(1.0));
        CHECK(d.max_eigenvalue == doctest::Approx(1.0));
        CHECK(d.offdiag_norm == 0.0);
        CHECK(d.near_diagonal);
    }
    SUBCASE("diag(1, 4)")
    {
        Matrix e(2, 2);
        e(0, 0) = 1.0;
        e(1, 1) = 4.0;
        const std::vector<double> g{1.0, 1.0};
        const IndependenceDiagnostics d = independence_diagnostics(e, g);
        CHECK(d.gamma_sigma == doctest::Approx(2.5));
        CHECK(d.a_trace == doctest::Approx(8.5));
        CHECK(d.max_eigenvalue == doctest::Approx(4.0));
    }
    SUBCASE("single off-diagonal pair")
    {
        Matrix e = Matrix::identity(2);
        e(0, 1) = e(1, 0) = 0.5;
        const std::vector<double> g{1.0, 1.0};
        const IndependenceDiagnostics d = independence_diagnostics(e, g, 0.4);
        // eigenvalues of [[0, rho], [rho, 0]] are +-rho
        CHECK(d.offdiag_norm == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d.max_eigenvalue == doctest::Approx(1.5).epsilon(1e-12));
        CHECK_FALSE(d.near_diagonal);
    }
    SUBCASE("asymmetric input")
    {
        Matrix e = Matrix::identity(2);
        e(0, 1) = 0.3;
        const std::vector<double> g{1.0, 1.0};
        CHECK_THROWS_AS(independence_diagnostics(e, g), std::invalid_argument);
    }
}

TEST_CASE("known spectrum is recovered from Q D Q'")
{
    const std::size_t n = 30;
    Rng rng(31);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Orthonormal Q by modified Gram-Schmidt on a random matrix.
    Matrix q(n, n);
    for (double& x : q.data())
        x = normal(rng);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                dot += q(i, j) * q(i, k);
            for (std::size_t i = 0; i < n; ++i)
                q(i, j) -= dot * q(i, k);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i)
            q(i, j) /= norm;
    }
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        d(i, i) = 0.1 + 0.2 * static_cast<double>(i);
    Matrix e = multiply(multiply(q, d), q.transposed());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            e(i, j) = e(j, i);
    const std::vector<double> g(n, 1.0);
    const IndependenceDiagnostics diag = independence_diagnostics(e, g);
    CHECK(std::abs(diag.max_eigenvalue - d(n - 1, n - 1)) < 1e-8);

    double diag_sq = 0.0;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag_sq += e(i, i) * e(i, i);
        max_diag = std::max(max_diag, e(i, i));
    }
    CHECK(diag.a_trace >= diag_sq / static_cast<double>(n));
    CHECK(diag.max_eigenvalue >= max_diag - 1e-12);
    CHECK(asymmetry(diag.cov_matrix) <= 1e-12);
}

TEST_CASE("factor design trace matches the dense diagnostics")
{
    SimConfig cfg;
    cfg.n_units = 40;
    cfg.c_pi = 2.0;
    const FactorPanel p = simulate_panel(cfg, 4);
    const Matrix cov = factor_error_covariance(p.params);
    const IndependenceDiagnostics d = independence_diagnostics(cov, p.params.gamma);
    CHECK(factor_design_a_trace(p.params) == doctest::Approx(d.a_trace).epsilon(1e-12));
    // gamma = 1: gamma' E gamma / N = (sum pi)^2 / N + mean omega^2 = Gamma^2 + 1
    const TheoreticalMoments m = theoretical_targets(p.params, cfg);
    CHECK(d.gamma_sigma == doctest::Approx(m.gamma_pi_gamma * m.gamma_pi_gamma + 1.0).epsilon(1e-12));

    const TheoreticalMoments ind = independence_targets(d, 1.0, 0.5);
    CHECK(ind.regime == Regime::Independence);
    CHECK(ind.sigma_v == doctest::Approx(d.gamma_sigma));
    CHECK(ind.sigma_w == doctest::Approx(0.5 * d.a_trace));
}
