#ifndef FCLT_REPORT_HPP
#define FCLT_REPORT_HPP

#include "fclt/experiments.hpp"
#include "fclt/twostep.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fclt {

/// printf("%.{digits}g").
std::string format_number(double x, int digits);

std::string distribution_csv(const std::vector<DistributionRow>& rows);
/// Columns: c_pi, c_fv, component, method, level, rate, mc_stderr.
std::string rejection_csv(const RejectionTable& table);
std::string variance_csv(const std::vector<VarianceCheckRow>& rows);
/// Row = unit, column = period.
std::string panel_csv(const FactorPanel& panel);
std::string common_csv(const FactorPanel& panel);
/// Columns: unit, xi_linear, xi_quadratic.
std::string xi_csv(const XiSample& sample);

std::string render_distribution_table(const std::vector<DistributionRow>& rows);
std::string render_rejection_table(const RejectionTable& table, const ExperimentConfig& config);
std::string render_variance_table(const std::vector<VarianceCheckRow>& rows);

/// Resolved configuration, including the key=value text that reproduces the run.
nlohmann::json config_json(const ExperimentConfig& config);
nlohmann::json distribution_json(const std::vector<DistributionRow>& rows);
nlohmann::json rejection_json(const RejectionTable& table);
nlohmann::json variance_json(const std::vector<VarianceCheckRow>& rows);

} // namespace fclt

#endif
