#include "fclt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fclt {

ConfigError::ConfigError(std::string key, std::string where, const std::string& message)
    : std::runtime_error("config " + where + ", key '" + key + "': " + message), key_(std::move(key)),
      where_(std::move(where))
{
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string key;
    std::string value;
    std::string where;
};

class Parser {
public:
    explicit Parser(const Entry& e) : e_(e) {}

    [[noreturn]] void fail(const std::string& message) const { throw ConfigError(e_.key, e_.where, message); }

    double real(std::string_view text) const
    {
        text = trim(text);
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(x))
            fail("cannot parse '" + std::string(text) + "' as a real number");
        return x;
    }

    std::uint64_t unsigned_integer() const
    {
        const std::string_view text = trim(e_.value);
        std::uint64_t x = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
            fail("cannot parse '" + std::string(text) + "' as a non-negative integer");
        return x;
    }

    std::size_t positive(std::size_t minimum) const
    {
        const std::uint64_t x = unsigned_integer();
        if (x < minimum)
            fail("must be at least " + std::to_string(minimum));
        return static_cast<std::size_t>(x);
    }

    std::vector<double> real_list() const
    {
        std::vector<double> out;
        std::string_view rest = e_.value;
        while (true) {
            const auto comma = rest.find(',');
            out.push_back(real(rest.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

    bool boolean() const
    {
        std::string v(trim(e_.value));
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        fail("expected true/false, got '" + v + "'");
    }

private:
    const Entry& e_;
};

void apply(ExperimentConfig& cfg, const Entry& e)
{
    const Parser p(e);
    const std::string& k = e.key;
    if (k == "n") {
        cfg.base.n_units = p.positive(1);
    } else if (k == "t") {
        cfg.base.n_periods = p.positive(2);
    } else if (k == "reps") {
        cfg.n_reps = p.positive(1);
    } else if (k == "boot_reps") {
        cfg.n_boot = p.positive(1);
    } else if (k == "seed") {
        cfg.base.master_seed = p.unsigned_integer();
    } else if (k == "freeze_units") {
        cfg.freeze_units = p.boolean();
    } else if (k == "lambda") {
        cfg.lambda = p.real(e.value);
    } else if (k == "c_pi") {
        cfg.c_pi_grid = p.real_list();
        for (double c : cfg.c_pi_grid)
            if (c < 0.0)
                p.fail("value " + std::to_string(c) + " is negative; c_pi must be >= 0");
    } else if (k == "c_fv") {
        cfg.c_fv_grid = p.real_list();
        for (double c : cfg.c_fv_grid)
            if (std::abs(c) > 1.0)
                p.fail("value " + std::to_string(c) + " is outside the bound [-1, 1]");
    } else if (k == "levels") {
        cfg.levels = p.real_list();
        for (double l : cfg.levels)
            if (!(l > 0.0 && l < 1.0))
                p.fail("value " + std::to_string(l) + " is outside (0, 1)");
        std::sort(cfg.levels.begin(), cfg.levels.end());
    } else {
        p.fail("unknown key");
    }
}

} // namespace

std::pair<std::string, std::string> split_override(std::string_view text, std::size_t index)
{
    const auto eq = text.find('=');
    const std::string where = "override " + std::to_string(index);
    if (eq == std::string_view::npos)
        throw ConfigError(std::string(trim(text)), where, "expected key=value");
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

ExperimentConfig parse_config_text(std::string_view text, const Overrides& overrides, const ExperimentConfig& defaults)
{
    std::vector<Entry> entries;
    std::map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(line), where, "expected key = value");
        Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), where};
        if (seen.contains(e.key))
            throw ConfigError(e.key, where, "duplicate key (first set on line " + std::to_string(seen[e.key]) + ")");
        seen[e.key] = line_no;
        entries.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < overrides.size(); ++i)
        entries.push_back({overrides[i].first, overrides[i].second, "override " + std::to_string(i + 1)});

    ExperimentConfig cfg = defaults;
    std::map<std::string, std::string> last_where;
    for (const auto& e : entries) {
        apply(cfg, e);
        last_where[e.key] = e.where;
    }

    auto where_of = [&](const std::string& key) {
        const auto it = last_where.find(key);
        return it == last_where.end() ? std::string("default") : it->second;
    };
    const std::size_t need = min_bootstrap_reps(cfg.levels.front());
    if (cfg.n_boot < need) {
        std::ostringstream msg;
        msg << "boot_reps = " << cfg.n_boot << " cannot attain the bootstrap quantile at level " << cfg.levels.front()
            << "; the quantile precondition requires boot_reps >= ceil(1/level) - 1 = " << need;
        throw ConfigError("boot_reps", where_of("boot_reps"), msg.str());
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("(config)", "validation", ex.what());
    }
    return cfg;
}

ExperimentConfig parse_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides,
                              const ExperimentConfig& defaults)
{
    std::string text;
    if (path) {
        std::ifstream in(*path);
        if (!in)
            throw ConfigError("(file)", path->string(), "cannot open configuration file");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_config_text(text, overrides, defaults);
}

namespace {

std::string num17(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string list17(const std::vector<double>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += ',';
        out += num17(xs[i]);
    }
    return out;
}

} // namespace

std::string serialize_config(const ExperimentConfig& c)
{
    std::ostringstream os;
    os << "n = " << c.base.n_units << '\n'
       << "t = " << c.base.n_periods << '\n'
       << "c_pi = " << list17(c.c_pi_grid) << '\n'
       << "c_fv = " << list17(c.c_fv_grid) << '\n'
       << "reps = " << c.n_reps << '\n'
       << "boot_reps = " << c.n_boot << '\n'
       << "seed = " << c.base.master_seed << '\n'
       << "levels = " << list17(c.levels) << '\n'
       << "freeze_units = " << (c.freeze_units ? "true" : "false") << '\n'
       << "lambda = " << num17(c.lambda) << '\n';
    return os.str();
}

} // namespace fclt
