#include "fclt/inference.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace fclt;
using fclt::testing::max_relative_deviation;
using fclt::testing::random_panel;

TEST_CASE("rademacher weights")
{
    Rng rng(1);
    const RademacherWeights w = rademacher_weights(100000, rng);
    double sum = 0.0;
    for (double d : w.delta) {
        CHECK((d == 1.0 || d == -1.0));
        sum += d;
    }
    CHECK(std::abs(sum / 100000.0) <= 0.02);

    Rng a(9);
    Rng b(9);
    CHECK(rademacher_weights(333, a).delta == rademacher_weights(333, b).delta);

    Rng c(3);
    CHECK_THROWS_AS(rademacher_weights(0, c), std::invalid_argument);
}

TEST_CASE("bootstrap replicate")
{
    const FactorPanel p = random_panel(12, 21, 4);
    const XiSample original = compute_xi(p);

    SUBCASE("all plus one is bit-identical")
    {
        const XiSample s = bootstrap_replicate(p, RademacherWeights{std::vector<double>(21, 1.0)});
        CHECK(s.xi_linear == original.xi_linear);
        CHECK(s.xi_quadratic == original.xi_quadratic);
        CHECK(s.aggregate == original.aggregate);
    }
    SUBCASE("all minus one negates only the linear part")
    {
        const XiSample s = bootstrap_replicate(p, RademacherWeights{std::vector<double>(21, -1.0)});
        for (std::size_t i = 0; i < s.n_units(); ++i) {
            CHECK(s.xi_linear[i] == -original.xi_linear[i]);
            CHECK(s.xi_quadratic[i] == original.xi_quadratic[i]);
        }
    }
    SUBCASE("random signs match the materialized panel")
    {
        Rng rng(15);
        for (int trial = 0; trial < 10; ++trial) {
            const RademacherWeights w = rademacher_weights(21, rng);
            FactorPanel star = p;
            for (std::size_t i = 0; i < star.n_units(); ++i)
                for (std::size_t t = 0; t < star.n_periods(); ++t)
                    star.e(i, t) *= w.delta[t];
            const XiSample folded = bootstrap_replicate(p, w);
            CHECK(max_relative_deviation(folded.xi_linear, xi_linear(star)) <= 1e-12);
            CHECK(max_relative_deviation(folded.xi_quadratic, xi_quadratic_direct(star, product_weights(star.v)))
                  <= 1e-12);
        }
    }
    SUBCASE("length mismatch")
    {
        CHECK_THROWS_AS(bootstrap_replicate(p, RademacherWeights{std::vector<double>(20, 1.0)}),
                        std::invalid_argument);
    }
}

TEST_CASE("run_bootstrap")
{
    const FactorPanel p = random_panel(30, 40, 6);
    const XiKernel kernel(p);

    const BootstrapDraws one = run_bootstrap(kernel, 1, 77, true);
    CHECK(one.xi_star.size() == 1);
    CHECK(one.t_star.size() == 1);
    CHECK_THROWS_AS(run_bootstrap(kernel, 0, 77, false), std::invalid_argument);

    const BootstrapDraws a = run_bootstrap(kernel, 50, 123, true);
    const BootstrapDraws b = run_bootstrap(kernel, 50, 123, true);
    CHECK(a.xi_star == b.xi_star);
    CHECK(column(a.t_star, 0) == column(b.t_star, 0));
    const BootstrapDraws c = run_bootstrap(kernel, 50, 124, false);
    CHECK(c.xi_star != a.xi_star);
    CHECK(c.t_star.empty());

    // Replicate b depends only on (seed, b).
    const BootstrapDraws longer = run_bootstrap(kernel, 80, 123, false);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(longer.xi_star[i] == a.xi_star[i]);
}

TEST_CASE("bootstrap draws are centred with the conditional variance of the linear part")
{
    const FactorPanel p = random_panel(25, 60, 8);
    const std::size_t reps = 4000;
    const BootstrapDraws d = run_bootstrap(p, reps, 99, false);

    // Var*(Xi*_lin) = (1/(N T)) sum_t (sum_i gamma_i v_t e_it)^2
    double target = 0.0;
    for (std::size_t t = 0; t < p.n_periods(); ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.n_units(); ++i)
            s += p.params.gamma[i] * p.v[t] * p.e(i, t);
        target += s * s;
    }
    target /= static_cast<double>(p.n_units() * p.n_periods());

    for (std::size_t k = 0; k < 2; ++k) {
        const std::vector<double> x = column(d.xi_star, k);
        double mean = 0.0;
        for (double v : x)
            mean += v;
        mean /= static_cast<double>(reps);
        double var = 0.0;
        for (double v : x)
            var += (v - mean) * (v - mean);
        var /= static_cast<double>(reps - 1);
        CHECK(std::abs(mean) <= 4.0 * std::sqrt(var / static_cast<double>(reps)));
        if (k == Linear)
            CHECK(var == doctest::Approx(target).epsilon(0.1));
    }
}

TEST_CASE("normal quantile and asymptotic test")
{
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.575829303548901).epsilon(1e-10));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.001) == doctest::Approx(-3.090232306167813).epsilon(1e-10));
    for (double p : {1e-10, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-10}) {
        const double x = normal_quantile(p);
        CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-8));
    }

    CHECK(test_asymptotic(2.0, 0.05).reject);
    CHECK_FALSE(test_asymptotic(1.9, 0.05).reject);
    CHECK_FALSE(test_asymptotic(2.0, 0.01).reject);
    CHECK(test_asymptotic(-3.0, 0.01).reject);
    CHECK(test_asymptotic(0.0, 0.05).critical_value == doctest::Approx(1.95996).epsilon(1e-5));
    CHECK_THROWS_AS(test_asymptotic(1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(test_asymptotic(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("bootstrap critical values")
{
    const std::vector<double> four{1.0, 2.0, 3.0, 4.0};
    const TestDecision d = test_bootstrap(5.0, four, 0.25);
    CHECK(d.critical_value == 4.0);
    CHECK(d.reject);

    const TestDecision zero = test_bootstrap(0.0, four, 0.25);
    CHECK_FALSE(zero.reject);

    std::vector<double> nineteen(19);
    for (std::size_t i = 0; i < 19; ++i)
        nineteen[i] = -static_cast<double>(i + 1);
    CHECK(bootstrap_critical_value(nineteen, 0.05) == 19.0);

    CHECK(min_bootstrap_reps(0.05) == 19);
    CHECK(min_bootstrap_reps(0.01) == 99);
    CHECK(min_bootstrap_reps(0.10) == 9);
    const std::vector<double> eighteen(18, 1.0);
    CHECK_THROWS_AS(bootstrap_critical_value(eighteen, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_critical_value({}, 0.05), std::invalid_argument);

    // NaN entries are dropped before ranking.
    std::vector<double> with_nan = four;
    with_nan.push_back(std::numeric_limits<double>::quiet_NaN());
    CHECK(test_bootstrap(5.0, with_nan, 0.25).critical_value == 4.0);
}

TEST_CASE("critical value is non-increasing in the level")
{
    Rng rng(31);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> draws(399);
    for (double& x : draws)
        x = normal(rng);
    double previous = std::numeric_limits<double>::infinity();
    for (double level : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5}) {
        const double c = bootstrap_critical_value(draws, level);
        CHECK(c <= previous);
        previous = c;
    }
}

TEST_CASE("method names")
{
    CHECK(method_name(Method::AsymptoticT) == "asy-t");
    CHECK(method_name(Method::BootstrapXi) == "bootstrap-xi");
    CHECK(method_name(Method::BootstrapT) == "bootstrap-t");
}
