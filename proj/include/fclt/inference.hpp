#ifndef FCLT_INFERENCE_HPP
#define FCLT_INFERENCE_HPP

#include "fclt/rng.hpp"
#include "fclt/stats.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fclt {

struct RademacherWeights {
    std::vector<double> delta; ///< each entry exactly -1.0 or +1.0
};

struct BootstrapDraws {
    std::vector<std::array<double, 2>> xi_star;
    /// Studentized replicates; NaN marks an excluded (degenerate-variance) replicate.
    /// Empty unless requested.
    std::vector<std::array<double, 2>> t_star;
    std::size_t b_reps = 0;
    std::array<std::size_t, 2> t_excluded{};
};

enum class Method { AsymptoticT, BootstrapXi, BootstrapT };

std::string_view method_name(Method m) noexcept;

struct TestDecision {
    double statistic = 0.0;
    double critical_value = 0.0;
    double level = 0.0;
    bool reject = false;
    Method method = Method::AsymptoticT;
};

RademacherWeights rademacher_weights(std::size_t n_periods, Rng& stream);

/// Wild-bootstrap analog of the statistics with e*_it = delta_t e_it. The sign
/// is folded into the kernel's period terms; e* is never materialized.
XiSample bootstrap_replicate(const XiKernel& kernel, const RademacherWeights& delta);
XiSample bootstrap_replicate(const FactorPanel& panel, const RademacherWeights& delta);

/// Fraction of degenerate bootstrap-t replicates tolerated before run_bootstrap throws.
inline constexpr double kMaxExcludedFraction = 0.01;

/// B replicates, replicate b drawing its signs from mix_seed(stream_seed, b).
BootstrapDraws run_bootstrap(const XiKernel& kernel, std::size_t b_reps, std::uint64_t stream_seed, bool with_t);
BootstrapDraws run_bootstrap(const FactorPanel& panel, std::size_t b_reps, std::uint64_t stream_seed, bool with_t);

/// Inverse of the standard normal CDF, |error| < 1e-8 on (0, 1).
double normal_quantile(double p);

TestDecision test_asymptotic(double t, double level);

/// Smallest B for which the bootstrap critical value exists at `level`.
std::size_t min_bootstrap_reps(double level);

/// The ceil((1 - level)(B + 1))-th smallest |value|.
double bootstrap_critical_value(std::span<const double> values, double level);

/// Two-sided test of |observed| against the bootstrap critical value. NaN
/// entries in `values` (excluded replicates) are dropped first.
TestDecision test_bootstrap(double observed, std::span<const double> values, double level,
                            Method method = Method::BootstrapXi);

/// Column k of a B x 2 draw matrix.
std::vector<double> column(const std::vector<std::array<double, 2>>& rows, std::size_t k);

} // namespace fclt

#endif
