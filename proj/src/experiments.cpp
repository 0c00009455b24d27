#include "fclt/experiments.hpp"

#include "fclt/parallel.hpp"
#include "fclt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fclt {

ExperimentConfig ExperimentConfig::desk_scale()
{
    ExperimentConfig c;
    c.base.n_units = 200;
    c.base.n_periods = 200;
    c.n_reps = 2000;
    c.n_boot = 400;
    return c;
}

ExperimentConfig ExperimentConfig::full_scale(bool distribution_study)
{
    ExperimentConfig c;
    c.base.n_units = 500;
    c.base.n_periods = 500;
    c.n_reps = distribution_study ? 10000 : 2000;
    c.n_boot = 600;
    return c;
}

void ExperimentConfig::validate() const
{
    base.validate();
    if (c_pi_grid.empty())
        throw std::invalid_argument("c_pi grid must not be empty");
    if (c_fv_grid.empty())
        throw std::invalid_argument("c_fv grid must not be empty");
    for (double c : c_pi_grid)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument("c_pi values must be finite and >= 0");
    for (double c : c_fv_grid)
        if (!(std::abs(c) <= 1.0))
            throw std::invalid_argument("c_fv values must lie in [-1, 1]");
    if (n_reps < 1)
        throw std::invalid_argument("reps must be at least 1");
    if (n_boot < 1)
        throw std::invalid_argument("boot_reps must be at least 1");
    if (levels.empty())
        throw std::invalid_argument("levels must not be empty");
    for (double l : levels)
        if (!(l > 0.0 && l < 1.0))
            throw std::invalid_argument("levels must lie in (0, 1)");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw std::invalid_argument("levels must be sorted ascending");
    const std::size_t need = min_bootstrap_reps(levels.front());
    if (n_boot < need) {
        std::ostringstream msg;
        msg << "boot_reps = " << n_boot << " is too small: the bootstrap quantile at level " << levels.front()
            << " needs boot_reps >= ceil(1/level) - 1 = " << need;
        throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(lambda))
        throw std::invalid_argument("lambda must be finite");
}

SimConfig ExperimentConfig::cell_config(std::size_t pi_index, double c_pi, std::size_t fv_index, double c_fv) const
{
    SimConfig s = base;
    s.c_pi = c_pi;
    s.c_fv = c_fv;
    s.freeze_units = freeze_units;
    s.master_seed = mix_seed(mix_seed(base.master_seed, pi_index), fv_index);
    return s;
}

double empirical_quantile(std::span<const double> samples, double p)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("empirical_quantile: probability outside [0, 1]");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistributionSummary summarize_moments(std::span<const double> samples)
{
    const std::size_t n = samples.size();
    if (n < 4)
        throw std::invalid_argument("summarize_moments: need at least 4 samples");
    const double dn = static_cast<double>(n);

    double mean = 0.0;
    for (double x : samples)
        mean += x;
    mean /= dn;
    double ss = 0.0;
    for (double x : samples)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (dn - 1.0));
    if (!(sd > 0.0))
        throw DegenerateVarianceError("summarize_moments: sample has zero spread");

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = samples[i] / sd;
    const double z_mean = mean / sd;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double x : z) {
        const double d = x - z_mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;

    DistributionSummary s;
    s.n_samples = n;
    s.std_dev = sd;
    s.mean = z_mean;
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    s.right_quantile_5pct = empirical_quantile(z, 0.95);
    return s;
}

std::string_view component_name(std::size_t component) noexcept
{
    return component == Linear ? "linear" : "quadratic";
}

namespace {

std::string cell_label(double c_pi, double c_fv)
{
    std::ostringstream os;
    os << "c_pi=" << c_pi << " c_fv=" << c_fv;
    return os.str();
}

void report(const RunOptions& options, const std::string& message)
{
    if (options.progress)
        options.progress(message);
}

struct NullReplication {
    std::array<double, 2> aggregate{};
    std::array<double, 2> sigma_hat{};
    double sigma_v = 0.0;
    double sigma_w = 0.0;
    double finite_sigma_w = 0.0;
    double gamma_pi_gamma = 0.0;
};

double sample_variance(const std::vector<NullReplication>& reps, std::size_t k)
{
    const double n = static_cast<double>(reps.size());
    double mean = 0.0;
    for (const auto& r : reps)
        mean += r.aggregate[k];
    mean /= n;
    double ss = 0.0;
    for (const auto& r : reps)
        ss += (r.aggregate[k] - mean) * (r.aggregate[k] - mean);
    return ss / (n - 1.0);
}

} // namespace

NullStudy run_null_study(const ExperimentConfig& config, const RunOptions& options)
{
    config.validate();
    if (config.n_reps < 4)
        throw std::invalid_argument("the distribution study needs reps >= 4");

    NullStudy study;
    for (std::size_t ci = 0; ci < config.c_pi_grid.size(); ++ci) {
        const double c_pi = config.c_pi_grid[ci];
        const SimConfig cell = config.cell_config(ci, c_pi, 0, 0.0);
        const std::string label = cell_label(c_pi, 0.0);
        report(options, "null study " + label + ": " + std::to_string(config.n_reps) + " replications");

        std::vector<NullReplication> reps(config.n_reps);
        try {
            parallel_for(config.n_reps, options.threads, [&](std::size_t r) {
                const FactorPanel panel = simulate_panel(cell, r);
                const XiSample sample = compute_xi(panel);
                const VarianceEstimate est = variance_estimate(sample);
                const TheoreticalMoments m = theoretical_targets(panel.params, cell);
                NullReplication& out = reps[r];
                out.aggregate = sample.aggregate;
                out.sigma_hat = {est.sigma_hat[0][0], est.sigma_hat[1][1]};
                out.sigma_v = m.sigma_v;
                out.sigma_w = m.sigma_w;
                out.finite_sigma_w = factor_design_a_trace(panel.params) * m.omega_w;
                out.gamma_pi_gamma = m.gamma_pi_gamma;
            });
        } catch (const std::exception& ex) {
            throw ExperimentError("null study cell " + label + " aborted: " + ex.what());
        }

        DistributionRow row;
        row.c_pi = c_pi;
        std::vector<double> lin(reps.size());
        std::vector<double> quad(reps.size());
        for (std::size_t r = 0; r < reps.size(); ++r) {
            lin[r] = reps[r].aggregate[0];
            quad[r] = reps[r].aggregate[1];
        }
        row.linear = summarize_moments(lin);
        row.quadratic = summarize_moments(quad);
        study.distribution.push_back(row);

        VarianceCheckRow v;
        v.c_pi = c_pi;
        v.n_reps = reps.size();
        v.empirical_var = {sample_variance(reps, 0), sample_variance(reps, 1)};
        const double n = static_cast<double>(reps.size());
        for (const auto& r : reps) {
            v.mean_sigma_hat[0] += r.sigma_hat[0];
            v.mean_sigma_hat[1] += r.sigma_hat[1];
            v.target_sigma_v += r.sigma_v;
            v.target_sigma_w += r.sigma_w;
            v.finite_n_sigma_w += r.finite_sigma_w;
            v.mean_gamma_pi_gamma += r.gamma_pi_gamma;
        }
        v.mean_sigma_hat[0] /= n;
        v.mean_sigma_hat[1] /= n;
        v.target_sigma_v /= n;
        v.target_sigma_w /= n;
        v.finite_n_sigma_w /= n;
        v.mean_gamma_pi_gamma /= n;
        study.variance.push_back(v);
    }
    return study;
}

std::vector<DistributionRow> run_distribution_study(const ExperimentConfig& config, const RunOptions& options)
{
    return run_null_study(config, options).distribution;
}

std::vector<VarianceCheckRow> run_variance_check(const ExperimentConfig& config, const RunOptions& options)
{
    return run_null_study(config, options).variance;
}

const RejectionCell& RejectionTable::at(double c_pi, double c_fv, std::size_t component, Method method,
                                        double level) const
{
    for (const auto& c : cells)
        if (c.c_pi == c_pi && c.c_fv == c_fv && c.component == component && c.method == method && c.level == level)
            return c;
    throw std::out_of_range("RejectionTable::at: no such cell");
}

namespace {

constexpr Method kMethods[] = {Method::AsymptoticT, Method::BootstrapXi, Method::BootstrapT};

/// Decisions of one replication, indexed [component][method][level].
struct SizePowerReplication {
    std::vector<unsigned char> reject;
    std::size_t t_excluded = 0;
};

std::size_t decision_index(std::size_t component, std::size_t method, std::size_t level, std::size_t n_levels)
{
    return (component * 3 + method) * n_levels + level;
}

SizePowerReplication size_power_replication(const SimConfig& cell, std::uint64_t rep, const ExperimentConfig& config)
{
    const FactorPanel panel = simulate_panel(cell, rep);
    const XiKernel kernel(panel);
    const XiSample sample = kernel.evaluate();
    const VarianceEstimate est = variance_estimate(sample);
    const std::uint64_t boot_seed
        = mix_seed(replication_seed(cell, rep), static_cast<std::uint64_t>(Stream::Bootstrap));
    const BootstrapDraws draws = run_bootstrap(kernel, config.n_boot, boot_seed, true);

    const std::size_t n_levels = config.levels.size();
    SizePowerReplication out;
    out.reject.assign(2 * 3 * n_levels, 0);
    out.t_excluded = draws.t_excluded[0] + draws.t_excluded[1];
    for (std::size_t k = 0; k < 2; ++k) {
        const double t = est.t(k);
        const std::vector<double> xi_star = column(draws.xi_star, k);
        const std::vector<double> t_star = column(draws.t_star, k);
        for (std::size_t l = 0; l < n_levels; ++l) {
            const double level = config.levels[l];
            out.reject[decision_index(k, 0, l, n_levels)] = test_asymptotic(t, level).reject;
            out.reject[decision_index(k, 1, l, n_levels)]
                = test_bootstrap(sample.aggregate[k], xi_star, level, Method::BootstrapXi).reject;
            out.reject[decision_index(k, 2, l, n_levels)]
                = test_bootstrap(t, t_star, level, Method::BootstrapT).reject;
        }
    }
    return out;
}

} // namespace

RejectionTable run_size_power_study(const ExperimentConfig& config, const RunOptions& options)
{
    config.validate();
    const std::size_t n_levels = config.levels.size();
    RejectionTable table;

    for (std::size_t ci = 0; ci < config.c_pi_grid.size(); ++ci) {
        for (std::size_t fi = 0; fi < config.c_fv_grid.size(); ++fi) {
            const double c_pi = config.c_pi_grid[ci];
            const double c_fv = config.c_fv_grid[fi];
            const SimConfig cell = config.cell_config(ci, c_pi, fi, c_fv);
            const std::string label = cell_label(c_pi, c_fv);
            report(options, "size/power " + label + ": " + std::to_string(config.n_reps) + " replications x "
                                + std::to_string(config.n_boot) + " bootstrap draws");

            std::vector<SizePowerReplication> reps(config.n_reps);
            try {
                parallel_for(config.n_reps, options.threads,
                             [&](std::size_t r) { reps[r] = size_power_replication(cell, r, config); });
            } catch (const std::exception& ex) {
                throw ExperimentError("size/power cell " + label + " aborted: " + ex.what());
            }

            const double n = static_cast<double>(config.n_reps);
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t m = 0; m < 3; ++m) {
                    for (std::size_t l = 0; l < n_levels; ++l) {
                        RejectionCell c;
                        c.c_pi = c_pi;
                        c.c_fv = c_fv;
                        c.component = k;
                        c.method = kMethods[m];
                        c.level = config.levels[l];
                        c.n_reps = config.n_reps;
                        for (const auto& rep : reps)
                            c.rejections += rep.reject[decision_index(k, m, l, n_levels)];
                        c.rate = static_cast<double>(c.rejections) / n;
                        c.mc_stderr = std::sqrt(c.rate * (1.0 - c.rate) / n);
                        table.cells.push_back(c);
                    }
                }
            }
            for (const auto& rep : reps)
                table.t_star_excluded += rep.t_excluded;
        }
    }
    return table;
}

} // namespace fclt
