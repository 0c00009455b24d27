#ifndef FCLT_STATS_HPP
#define FCLT_STATS_HPP

#include "fclt/dgp.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fclt {

/// Component index into the two-element statistic.
enum Component : std::size_t { Linear = 0, Quadratic = 1 };

class DegenerateVarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-unit statistics and their cross-sectional aggregate.
struct XiSample {
    std::vector<double> xi_linear;
    std::vector<double> xi_quadratic;
    std::array<double, 2> aggregate{}; ///< (1/sqrt N) * column sums

    std::size_t n_units() const noexcept { return xi_linear.size(); }
};

struct VarianceEstimate {
    std::array<std::array<double, 2>, 2> sigma_hat{}; ///< (1/N) sum xi_i xi_i'
    /// Studentized aggregates; empty where the matching diagonal entry is zero.
    std::array<std::optional<double>, 2> t_stats{};

    /// Throws DegenerateVarianceError when component k has zero estimated variance.
    double t(std::size_t k) const;
};

/// w(s, t) for t < s. Only called with strictly ordered indices.
using WeightFn = std::function<double(std::size_t s, std::size_t t)>;

WeightFn product_weights(std::vector<double> v);
/// w_st = v1_s v2_t + v1_t v2_s, the cross-covariance weights of a two-estimator product.
WeightFn symmetrized_product_weights(std::vector<double> v1, std::vector<double> v2);

/// Period-major view of the panel, b(t, i) = v_t e_it, shared by the original
/// statistic and every wild-bootstrap replicate. Both components come out of a
/// single pass: the quadratic one uses the running prefix P_i = sum_{t<s} b(t, i).
class XiKernel {
public:
    explicit XiKernel(const FactorPanel& panel);
    XiKernel(std::span<const double> v, const Matrix& e, std::span<const double> gamma);

    std::size_t n_units() const noexcept { return n_; }
    std::size_t n_periods() const noexcept { return t_; }

    /// Statistics after multiplying period t of every unit by sign[t]. An empty
    /// `sign` means all +1. Writes into `out`, reusing its storage.
    void evaluate(std::span<const double> sign, XiSample& out) const;
    XiSample evaluate(std::span<const double> sign = {}) const;

private:
    template <bool Compensated>
    void accumulate(std::span<const double> sign, XiSample& out) const;

    std::size_t n_ = 0;
    std::size_t t_ = 0;
    std::vector<double> b_; ///< t_ x n_, period-major
    std::vector<double> gamma_;
    mutable std::vector<double> prefix_;
    mutable std::vector<double> comp_;
};

/// Above this many periods the kernel switches to compensated accumulation.
inline constexpr std::size_t kCompensatedPeriods = 10000;

std::vector<double> xi_linear(const FactorPanel& panel);
/// O(N T^2) evaluation of the quadratic component for arbitrary weights.
std::vector<double> xi_quadratic_direct(const FactorPanel& panel, const WeightFn& w);
/// O(N T) evaluation for product weights w_st = v_s v_t.
std::vector<double> xi_quadratic_factored(const FactorPanel& panel);

XiSample aggregate_xi(std::vector<double> xi_linear, std::vector<double> xi_quadratic);
/// Both components and the aggregate, through XiKernel.
XiSample compute_xi(const FactorPanel& panel);

VarianceEstimate variance_estimate(const XiSample& sample);

} // namespace fclt

#endif
