#include "fclt/report.hpp"

#include "fclt/config.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace fclt {

std::string format_number(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

namespace {

std::string n17(double x)
{
    return format_number(x, 17);
}

std::string n6(double x)
{
    return format_number(x, 6);
}

} // namespace

std::string distribution_csv(const std::vector<DistributionRow>& rows)
{
    std::ostringstream os;
    os << "c_pi,component,mean,skewness,kurtosis,quant,std_dev,n_samples\n";
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < 2; ++k) {
            const DistributionSummary& s = k == 0 ? r.linear : r.quadratic;
            os << n17(r.c_pi) << ',' << component_name(k) << ',' << n17(s.mean) << ',' << n17(s.skewness) << ','
               << n17(s.kurtosis) << ',' << n17(s.right_quantile_5pct) << ',' << n17(s.std_dev) << ','
               << s.n_samples << '\n';
        }
    }
    return os.str();
}

std::string rejection_csv(const RejectionTable& table)
{
    std::ostringstream os;
    os << "c_pi,c_fv,component,method,level,rate,mc_stderr\n";
    for (const auto& c : table.cells)
        os << n17(c.c_pi) << ',' << n17(c.c_fv) << ',' << component_name(c.component) << ','
           << method_name(c.method) << ',' << n17(c.level) << ',' << n17(c.rate) << ',' << n17(c.mc_stderr) << '\n';
    return os.str();
}

std::string variance_csv(const std::vector<VarianceCheckRow>& rows)
{
    std::ostringstream os;
    os << "c_pi,n_reps,var_linear,mean_sigma_hat_linear,target_sigma_v,ratio_linear,"
          "var_quadratic,mean_sigma_hat_quadratic,target_sigma_w,finite_n_sigma_w,mean_gamma_pi_gamma\n";
    for (const auto& r : rows)
        os << n17(r.c_pi) << ',' << r.n_reps << ',' << n17(r.empirical_var[0]) << ',' << n17(r.mean_sigma_hat[0])
           << ',' << n17(r.target_sigma_v) << ',' << n17(r.linear_ratio()) << ',' << n17(r.empirical_var[1]) << ','
           << n17(r.mean_sigma_hat[1]) << ',' << n17(r.target_sigma_w) << ',' << n17(r.finite_n_sigma_w) << ','
           << n17(r.mean_gamma_pi_gamma) << '\n';
    return os.str();
}

std::string panel_csv(const FactorPanel& panel)
{
    std::ostringstream os;
    os << "unit";
    for (std::size_t t = 0; t < panel.n_periods(); ++t)
        os << ",t" << t;
    os << '\n';
    for (std::size_t i = 0; i < panel.n_units(); ++i) {
        os << i;
        for (double x : panel.e.row(i))
            os << ',' << n17(x);
        os << '\n';
    }
    return os.str();
}

std::string common_csv(const FactorPanel& panel)
{
    std::ostringstream os;
    os << "period,v,f\n";
    for (std::size_t t = 0; t < panel.n_periods(); ++t)
        os << t << ',' << n17(panel.v[t]) << ',' << n17(panel.f[t]) << '\n';
    return os.str();
}

std::string xi_csv(const XiSample& sample)
{
    std::ostringstream os;
    os << "unit,xi_linear,xi_quadratic\n";
    for (std::size_t i = 0; i < sample.n_units(); ++i)
        os << i << ',' << n17(sample.xi_linear[i]) << ',' << n17(sample.xi_quadratic[i]) << '\n';
    return os.str();
}

std::string render_distribution_table(const std::vector<DistributionRow>& rows)
{
    std::ostringstream os;
    os << std::left << std::setw(8) << "" << std::setw(56) << "linear" << "quadratic\n";
    os << std::setw(8) << "c_pi";
    for (int k = 0; k < 2; ++k)
        for (const char* h : {"mean", "skew", "kurt", "quant"})
            os << std::setw(14) << h;
    os << '\n';
    for (const auto& r : rows) {
        os << std::setw(8) << n6(r.c_pi);
        for (const DistributionSummary* s : {&r.linear, &r.quadratic})
            for (double x : {s->mean, s->skewness, s->kurtosis, s->right_quantile_5pct})
                os << std::setw(14) << n6(x);
        os << '\n';
    }
    if (!rows.empty())
        os << "(" << rows.front().linear.n_samples << " replications; components normalized by their sd)\n";
    return os.str();
}

std::string render_rejection_table(const RejectionTable& table, const ExperimentConfig& config)
{
    constexpr Method methods[] = {Method::AsymptoticT, Method::BootstrapXi, Method::BootstrapT};
    constexpr const char* short_names[] = {"asy", "b-xi", "b-t"};
    const int col = 9;
    std::ostringstream os;
    os << std::left;
    os << "rejection rates, percent (" << config.n_reps << " replications, " << config.n_boot
       << " bootstrap draws)\n";
    os << std::setw(8) << "";
    for (std::size_t k = 0; k < 2; ++k)
        os << std::setw(static_cast<int>(col * 3 * config.levels.size())) << component_name(k);
    os << '\n' << std::setw(8) << "";
    for (std::size_t k = 0; k < 2; ++k)
        for (double l : config.levels)
            os << std::setw(col * 3) << (n6(100.0 * l) + "%");
    os << '\n' << std::setw(8) << "c_pi";
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < config.levels.size(); ++l)
            for (const char* m : short_names)
                os << std::setw(col) << m;
    os << '\n';
    for (double c_fv : config.c_fv_grid) {
        os << (c_fv == 0.0 ? "size" : "power") << ": c_fv = " << n6(c_fv) << '\n';
        for (double c_pi : config.c_pi_grid) {
            os << std::setw(8) << n6(c_pi);
            for (std::size_t k = 0; k < 2; ++k)
                for (double l : config.levels)
                    for (Method m : methods)
                        os << std::setw(col) << n6(100.0 * table.at(c_pi, c_fv, k, m, l).rate);
            os << '\n';
        }
    }
    return os.str();
}

std::string render_variance_table(const std::vector<VarianceCheckRow>& rows)
{
    std::ostringstream os;
    os << std::left << std::setw(8) << "c_pi" << std::setw(14) << "var(lin)" << std::setw(14) << "Sigma_V"
       << std::setw(14) << "mean S11" << std::setw(14) << "ratio" << std::setw(14) << "var(quad)" << std::setw(14)
       << "Sigma_W" << std::setw(14) << "finite-N W" << "mean S22\n";
    for (const auto& r : rows)
        os << std::setw(8) << n6(r.c_pi) << std::setw(14) << n6(r.empirical_var[0]) << std::setw(14)
           << n6(r.target_sigma_v) << std::setw(14) << n6(r.mean_sigma_hat[0]) << std::setw(14)
           << n6(r.linear_ratio()) << std::setw(14) << n6(r.empirical_var[1]) << std::setw(14)
           << n6(r.target_sigma_w) << std::setw(14) << n6(r.finite_n_sigma_w) << n6(r.mean_sigma_hat[1]) << '\n';
    return os.str();
}

nlohmann::json config_json(const ExperimentConfig& c)
{
    return {
        {"n", c.base.n_units},
        {"t", c.base.n_periods},
        {"c_pi", c.c_pi_grid},
        {"c_fv", c.c_fv_grid},
        {"reps", c.n_reps},
        {"boot_reps", c.n_boot},
        {"seed", c.base.master_seed},
        {"levels", c.levels},
        {"freeze_units", c.freeze_units},
        {"lambda", c.lambda},
        {"config_text", serialize_config(c)},
    };
}

nlohmann::json distribution_json(const std::vector<DistributionRow>& rows)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        auto summary = [](const DistributionSummary& s) {
            return nlohmann::json{{"mean", s.mean},         {"skewness", s.skewness},
                                  {"kurtosis", s.kurtosis}, {"quant", s.right_quantile_5pct},
                                  {"std_dev", s.std_dev},   {"n_samples", s.n_samples}};
        };
        out.push_back({{"c_pi", r.c_pi}, {"linear", summary(r.linear)}, {"quadratic", summary(r.quadratic)}});
    }
    return out;
}

nlohmann::json rejection_json(const RejectionTable& table)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : table.cells)
        cells.push_back({{"c_pi", c.c_pi},
                         {"c_fv", c.c_fv},
                         {"component", component_name(c.component)},
                         {"method", method_name(c.method)},
                         {"level", c.level},
                         {"rejections", c.rejections},
                         {"rate", c.rate},
                         {"mc_stderr", c.mc_stderr}});
    return {{"cells", cells}, {"t_star_excluded", table.t_star_excluded}};
}

nlohmann::json variance_json(const std::vector<VarianceCheckRow>& rows)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"c_pi", r.c_pi},
                       {"n_reps", r.n_reps},
                       {"empirical_var", r.empirical_var},
                       {"mean_sigma_hat", r.mean_sigma_hat},
                       {"target_sigma_v", r.target_sigma_v},
                       {"target_sigma_w", r.target_sigma_w},
                       {"finite_n_sigma_w", r.finite_n_sigma_w},
                       {"mean_gamma_pi_gamma", r.mean_gamma_pi_gamma},
                       {"linear_ratio", r.linear_ratio()}});
    return out;
}

} // namespace fclt
