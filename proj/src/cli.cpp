#include "fclt/cli.hpp"

#include "fclt/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fclt {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << contents;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

void prepare_output_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw UsageError("output directory " + dir.string() + " cannot be created");
    const auto probe = dir / ".fclt-write-probe";
    {
        std::ofstream test(probe);
        if (!test)
            throw UsageError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

const char* command_name(Command c)
{
    switch (c) {
    case Command::Simulate:
        return "simulate";
    case Command::DistTable:
        return "dist-table";
    case Command::SizePower:
        return "size-power";
    case Command::VarianceCheck:
        return "variance-check";
    case Command::TwoStep:
        return "two-step";
    }
    return "unknown";
}

nlohmann::json base_report(const CliInvocation& inv, const ExperimentConfig& cfg)
{
    return {{"command", command_name(inv.command)}, {"master_seed", cfg.base.master_seed}, {"config", config_json(cfg)}};
}

std::string dump(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

void run_simulate(const CliInvocation& inv, const ExperimentConfig& cfg, std::ostream& out)
{
    const SimConfig cell = cfg.cell_config(0, cfg.c_pi_grid.front(), 0, cfg.c_fv_grid.front());
    const FactorPanel panel = simulate_panel(cell, inv.rep);
    const XiSample sample = compute_xi(panel);
    write_file(inv.output_dir / "panel.csv", panel_csv(panel));
    write_file(inv.output_dir / "common.csv", common_csv(panel));
    write_file(inv.output_dir / "xi.csv", xi_csv(sample));

    nlohmann::json rep = base_report(inv, cfg);
    rep["rep"] = inv.rep;
    rep["c_pi"] = cell.c_pi;
    rep["c_fv"] = cell.c_fv;
    rep["aggregate"] = sample.aggregate;
    const VarianceEstimate est = variance_estimate(sample);
    rep["sigma_hat"] = est.sigma_hat;
    write_file(inv.output_dir / "report.json", dump(rep));
    out << "panel " << panel.n_units() << " x " << panel.n_periods() << " (c_pi=" << format_number(cell.c_pi, 6)
        << ", c_fv=" << format_number(cell.c_fv, 6) << ", rep " << inv.rep << ")\n"
        << "Xi = (" << format_number(sample.aggregate[0], 6) << ", " << format_number(sample.aggregate[1], 6)
        << ")\n";
}

void run_dist_table(const CliInvocation& inv, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out)
{
    const auto rows = run_distribution_study(cfg, opts);
    write_file(inv.output_dir / "table1.csv", distribution_csv(rows));
    nlohmann::json rep = base_report(inv, cfg);
    rep["distribution"] = distribution_json(rows);
    write_file(inv.output_dir / "report.json", dump(rep));
    out << render_distribution_table(rows);
}

void run_size_power(const CliInvocation& inv, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out)
{
    const RejectionTable table = run_size_power_study(cfg, opts);
    write_file(inv.output_dir / "table2.csv", rejection_csv(table));
    nlohmann::json rep = base_report(inv, cfg);
    rep["rejection"] = rejection_json(table);
    write_file(inv.output_dir / "report.json", dump(rep));
    out << render_rejection_table(table, cfg);
}

void run_variance_check_cmd(const CliInvocation& inv, const ExperimentConfig& cfg, const RunOptions& opts,
                            std::ostream& out)
{
    const auto rows = run_variance_check(cfg, opts);
    write_file(inv.output_dir / "variance.csv", variance_csv(rows));
    nlohmann::json rep = base_report(inv, cfg);
    rep["variance"] = variance_json(rows);
    write_file(inv.output_dir / "report.json", dump(rep));
    out << render_variance_table(rows);
}

void run_two_step(const CliInvocation& inv, const ExperimentConfig& cfg, std::ostream& out)
{
    const SimConfig cell = cfg.cell_config(0, cfg.c_pi_grid.front(), 0, cfg.c_fv_grid.front());
    const AssetPanel panel = simulate_asset_panel(cell, cfg.lambda, inv.rep);
    const LambdaEstimates point = estimate_lambda(panel);
    const FirstPassEstimates full = estimate_first_pass(panel);
    const NoiseDecomposition noise = noise_decomposition(panel, full);

    nlohmann::json rep = base_report(inv, cfg);
    rep["rep"] = inv.rep;
    rep["true_lambda"] = cfg.lambda;
    rep["noise_decomposition"] = {{"linear", noise.linear}, {"quadratic", noise.quadratic}, {"total", noise.total}};
    nlohmann::json estimators = nlohmann::json::object();
    for (Estimator e : {Estimator::WeightedAverage, Estimator::FamaMacBeth, Estimator::SplitSampleIV})
        estimators[estimator_name(e)] = {{"lambda_hat", point.get(e)}, {"intervals", nlohmann::json::array()}};

    const std::uint64_t seed
        = mix_seed(replication_seed(cell, inv.rep), static_cast<std::uint64_t>(Stream::Bootstrap));
    out << "lambda_hat (true " << format_number(cfg.lambda, 6) << "), " << cfg.n_boot << " wild-bootstrap draws\n";
    for (double level : cfg.levels) {
        for (const auto& [e, ci] : bootstrap_intervals(panel, cfg.n_boot, level, seed)) {
            estimators[estimator_name(e)]["intervals"].push_back(
                {{"level", level}, {"lower", ci.lower}, {"upper", ci.upper}, {"half_width", ci.half_width}});
            out << "  " << estimator_name(e) << " " << format_number(ci.estimate, 6) << "  "
                << format_number(100.0 * (1.0 - level), 6) << "% CI [" << format_number(ci.lower, 6) << ", "
                << format_number(ci.upper, 6) << "]\n";
        }
    }
    rep["estimators"] = estimators;
    write_file(inv.output_dir / "twostep.json", dump(rep));
}

} // namespace

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err)
{
    ExperimentConfig cfg;
    try {
        const ExperimentConfig defaults = inv.full_scale
                                              ? ExperimentConfig::full_scale(inv.command == Command::DistTable)
                                              : ExperimentConfig::desk_scale();
        cfg = parse_config(inv.config_path, inv.overrides, defaults);
        prepare_output_dir(inv.output_dir);
    } catch (const ConfigError& ex) {
        err << "fclt: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& ex) {
        err << "fclt: " << ex.what() << '\n';
        return kExitUsage;
    }

    RunOptions opts;
    opts.threads = inv.threads.value_or(0);
    if (!inv.quiet)
        opts.progress = [&err](std::string_view msg) { err << "[fclt] " << msg << '\n'; };

    try {
        switch (inv.command) {
        case Command::Simulate:
            run_simulate(inv, cfg, out);
            break;
        case Command::DistTable:
            run_dist_table(inv, cfg, opts, out);
            break;
        case Command::SizePower:
            run_size_power(inv, cfg, opts, out);
            break;
        case Command::VarianceCheck:
            run_variance_check_cmd(inv, cfg, opts, out);
            break;
        case Command::TwoStep:
            run_two_step(inv, cfg, out);
            break;
        }
    } catch (const std::exception& ex) {
        err << "fclt " << command_name(inv.command) << ": " << ex.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Monte Carlo engine for linear/quadratic panel statistics and wild-bootstrap inference"};
    app.require_subcommand(1);

    CliInvocation inv;
    std::vector<std::string> sets;
    std::string output_dir;
    std::size_t threads = 0;

    struct Sub {
        Command command;
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {Command::Simulate, "simulate", "Simulate one panel and dump it as CSV"},
        {Command::DistTable, "dist-table", "Null distribution of both components (table1.csv)"},
        {Command::SizePower, "size-power", "Rejection rates of asymptotic and bootstrap tests (table2.csv)"},
        {Command::VarianceCheck, "variance-check", "Empirical vs theoretical variance of both components"},
        {Command::TwoStep, "two-step", "Second-step risk-premium estimates with bootstrap intervals"},
    };
    std::vector<std::pair<CLI::App*, Command>> registered;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("-c,--config", inv.config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", sets, "Override one key, e.g. --set reps=500");
        sub->add_option("-o,--output-dir", output_dir, "Directory for CSV/JSON output");
        sub->add_option("-j,--threads", threads, "Worker thread cap (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--full-scale", inv.full_scale, "Start from N = T = 500, B = 600 defaults");
        sub->add_flag("-q,--quiet", inv.quiet, "No progress messages");
        if (s.command == Command::Simulate || s.command == Command::TwoStep)
            sub->add_option("--rep", inv.rep, "Replication index");
        registered.emplace_back(sub, s.command);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        if (ex.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "fclt: " << ex.what() << '\n';
        return kExitUsage;
    }

    for (const auto& [sub, command] : registered)
        if (sub->parsed())
            inv.command = command;
    if (threads > 0)
        inv.threads = threads;
    try {
        for (std::size_t i = 0; i < sets.size(); ++i)
            inv.overrides.push_back(split_override(sets[i], i + 1));
    } catch (const ConfigError& ex) {
        err << "fclt: " << ex.what() << '\n';
        return kExitUsage;
    }
    if (!output_dir.empty()) {
        inv.output_dir = output_dir;
    } else if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
        inv.output_dir = env;
    } else {
        inv.output_dir = "fclt-out";
    }
    return dispatch(inv, out, err);
}

} // namespace fclt
