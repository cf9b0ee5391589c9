#pragma once

// Command-line front end. Each subcommand writes a CSV file whose leading
// comment block records the resolved configuration as `# key=value` lines.

#include "qbattery/sweeps.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qbattery::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kInvariantViolation = 3, kIoError = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    int n = 8;
    int m = 1;
    int start = 0;
    std::optional<double> f;
    std::string f_grid;  // lo:hi:steps
    std::string t_grid;
    double temp = 0.0;
    std::string branch = "plus";
    double tilt = 0.0;
    std::string phases = "zero";
    std::string theta;
    std::uint64_t seed = 1;
    long budget = kDefaultBudget;
    std::string out;
    int precision = 12;
    std::string source = "quadrature";
    std::string input;
    std::string column = "ergotropy";
    std::string quantity = "ergotropy";
    double window_lo = 0.45;
    double window_hi = 0.4999;
    int points = 30;
    std::string dump_coupling;
    unsigned workers = 0;
    std::string config_path;  // consumed before parsing
};

// ---- parsing helpers -------------------------------------------------------

inline std::vector<double> parse_grid(const std::string& spec, const char* field) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');)
        parts.push_back(item);
    if (parts.size() != 3)
        throw ConfigError(std::string(field) + ": expected lo:hi:steps, got '" + spec + "'");
    try {
        const double lo = std::stod(parts[0]);
        const double hi = std::stod(parts[1]);
        const int steps = std::stoi(parts[2]);
        if (steps < 1 || (steps > 1 && !(hi > lo)))
            throw ConfigError(std::string(field) + ": need steps >= 1 and hi > lo");
        return linear_grid(lo, hi, steps);
    } catch (const std::invalid_argument&) {
        throw ConfigError(std::string(field) + ": not numeric: '" + spec + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError(std::string(field) + ": out of range: '" + spec + "'");
    }
}

inline std::vector<double> parse_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ';')) {
        std::stringstream inner(token);
        for (std::string item; std::getline(inner, item, ',');) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (item.find_first_not_of(" \t", used) != std::string::npos)
                    throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError(std::string(field) + ": not numeric: '" + item + "'");
            }
        }
    }
    if (out.empty())
        throw ConfigError(std::string(field) + ": empty list");
    return out;
}

inline GroundBranch parse_branch(const std::string& s) {
    if (s == "plus") return GroundBranch::plus;
    if (s == "minus") return GroundBranch::minus;
    if (s == "raw") return GroundBranch::raw;
    if (s == "mixed") return GroundBranch::mixed;
    throw ConfigError("branch: expected plus|minus|raw|mixed, got '" + s + "'");
}

inline ChainSpec chain_spec(const RunConfig& c, double f) {
    ChainSpec s;
    s.n = c.n;
    s.f = f;
    s.temperature = c.temp;
    s.tilt = c.tilt;
    s.branch = parse_branch(c.branch);
    try {
        s.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    return s;
}

inline Partition partition(const RunConfig& c) {
    Partition p{c.start, c.m};
    try {
        p.validate(c.n);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    return p;
}

inline PhasePolicy phase_policy(const RunConfig& c) {
    if (c.budget < 1)
        throw ConfigError("budget: must be positive");
    if (c.m >= 1 && c.m < kMaxSites && c.budget < min_phase_budget(c.m))
        throw ConfigError("budget: must be at least " + std::to_string(min_phase_budget(c.m)) + " for m=" +
                          std::to_string(c.m));
    if (c.phases == "zero")
        return PhasePolicy::zero(c.seed, c.budget);
    if (c.phases == "min")
        return PhasePolicy::minimize(c.seed, c.budget);
    if (c.phases != "fixed")
        throw ConfigError("phases: expected zero|min|fixed, got '" + c.phases + "'");
    if (c.theta.empty())
        throw ConfigError("theta: required with --phases fixed");
    const std::vector<double> a = parse_list(c.theta, "theta");
    const Index dim = Index{1} << c.m;
    if (a.size() == 1 && c.m == 1)
        return PhasePolicy::fixed_at(PhaseVector::single_spin(a[0]), c.seed, c.budget);
    if (static_cast<Index>(a.size()) != dim)
        throw ConfigError("theta: expected " + std::to_string(dim) + " angles for m=" + std::to_string(c.m));
    return PhasePolicy::fixed_at(PhaseVector(Eigen::Map<const RealVector>(a.data(), dim)), c.seed, c.budget);
}

// Field grid from --f-grid or --f.
inline std::vector<double> f_values(const RunConfig& c) {
    std::vector<double> g;
    if (!c.f_grid.empty())
        g = parse_grid(c.f_grid, "f-grid");
    else if (c.f)
        g = {*c.f};
    else
        throw ConfigError("f: give --f or --f-grid");
    for (double v : g)
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError("f: values must lie in [0, 1]");
    return g;
}

// ---- CSV -------------------------------------------------------------------

using Field = std::variant<std::monostate, double, long long, std::string>;

inline std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + '"';
}

inline std::string format_fixed(double v, int precision) {
    if (!std::isfinite(v))
        return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    std::string s = os.str();
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

inline std::string format_angles(const PhaseVector& t, int precision) {
    std::string s;
    for (Index i = 0; i < t.size(); ++i) {
        if (i)
            s += ';';
        s += format_fixed(t[i], precision);
    }
    return s;
}

inline std::optional<double> opt(double v) { return v; }

class CsvWriter {
public:
    CsvWriter(std::ostream& os, int precision) : os_(os), precision_(precision) {}

    void comment(const std::string& line) { os_ << "# " << line << '\n'; }

    void row(const std::vector<Field>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i)
                os_ << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        os_ << format_fixed(v, precision_);
                    else if constexpr (std::is_same_v<T, long long>)
                        os_ << v;
                    else if constexpr (std::is_same_v<T, std::string>)
                        os_ << quote(v);
                },
                fields[i]);
        }
        os_ << '\n';
    }

    void header(const std::vector<std::string>& names) {
        std::vector<Field> f(names.begin(), names.end());
        row(f);
    }

private:
    std::ostream& os_;
    int precision_;
};

inline Field field(const std::optional<double>& v) { return v ? Field{*v} : Field{}; }

// ---- configuration echo ----------------------------------------------------

// Shortest text that reads back to the same double.
inline std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("version", kVersion);
    e.emplace_back("command", c.command);
    auto add = [&](const char* k, std::string v) { e.emplace_back(k, std::move(v)); };
    const std::string& cmd = c.command;
    const bool chain = cmd != "fit-exponent";
    if (chain) {
        add("n", std::to_string(c.n));
        if (cmd != "correlators") {
            add("m", std::to_string(c.m));
            add("start", std::to_string(c.start));
        }
        if (!c.f_grid.empty())
            add("f-grid", c.f_grid);
        else if (c.f)
            add("f", num(*c.f));
        if (!c.t_grid.empty())
            add("t-grid", c.t_grid);
        add("temp", num(c.temp));
        add("branch", c.branch);
        add("tilt", num(c.tilt));
    }
    if (cmd == "correlators")
        add("source", c.source);
    if (cmd == "cycle" || cmd == "sweep" || cmd == "optimize-phases") {
        add("phases", c.phases);
        if (!c.theta.empty())
            add("theta", c.theta);
        add("seed", std::to_string(c.seed));
        add("budget", std::to_string(c.budget));
    }
    if (cmd == "fit-exponent") {
        if (!c.input.empty()) {
            add("input", c.input);
            add("column", c.column);
        } else {
            add("quantity", c.quantity);
            add("theta", c.theta.empty() ? "0" : c.theta);
            add("n", std::to_string(c.n));
            add("points", std::to_string(c.points));
        }
        add("window-lo", num(c.window_lo));
        add("window-hi", num(c.window_hi));
    }
    if (!c.dump_coupling.empty())
        add("dump-coupling", c.dump_coupling);
    add("precision", std::to_string(c.precision));
    return e;
}

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_)
                throw IoError("cannot open output file: " + path);
        }
    }

    std::ostream& stream() { return path_.empty() ? std::cout : file_; }

    void close() {
        if (path_.empty()) {
            std::cout.flush();
            return;
        }
        file_.close();
        if (!file_)
            throw IoError("failed writing output file: " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
};

inline void write_header(CsvWriter& w, const RunConfig& c) {
    for (const auto& [k, v] : config_entries(c))
        w.comment(k + "=" + v);
}

// ---- subcommands -----------------------------------------------------------

inline int cmd_correlators(const RunConfig& c) {
    const auto grid = f_values(c);
    if (c.source != "quadrature" && c.source != "exact" && c.source != "both")
        throw ConfigError("source: expected quadrature|exact|both, got '" + c.source + "'");
    for (double f : grid)
        chain_spec(c, f);
    Output out(c.out);
    CsvWriter w(out.stream(), c.precision);
    write_header(w, c);
    w.header({"f", "T", "source", "sx", "sz", "cxx", "cyy", "czz", "cxz", "delta"});
    auto emit = [&](double f, const CorrelatorSet& s) {
        w.row({f, c.temp, std::string(to_string(s.source)), s.sx, s.sz, s.cxx, s.cyy, s.czz, field(s.cxz), s.delta});
    };
    for (double f : grid) {
        const ChainSpec spec = chain_spec(c, f);
        if (c.source != "exact") {
            if (c.temp > 0.0)
                emit(f, correlators_thermal(f, c.temp));
            else if (spec.branch == GroundBranch::mixed)
                emit(f, correlators_mixed_ground(f));
            else
                emit(f, correlators_ground(f));
        }
        if (c.source != "quadrature")
            emit(f, correlators_exact(spec));
    }
    out.close();
    return kOk;
}

inline int cmd_cycle(const RunConfig& c) {
    chain_spec(c, c.f.value_or(0.5));
    const Partition part = partition(c);
    const PhasePolicy policy = phase_policy(c);
    SweepAxis axis = SweepAxis::f;
    std::vector<double> grid;
    if (!c.t_grid.empty()) {
        axis = SweepAxis::temperature;
        grid = parse_grid(c.t_grid, "t-grid");
        if (!c.f)
            throw ConfigError("f: a temperature sweep needs a single --f");
        for (double t : grid)
            if (!(t >= 0.0))
                throw ConfigError("t-grid: temperatures must be >= 0");
    } else {
        grid = f_values(c);
    }
    if (c.command == "sweep" && c.f_grid.empty() && c.t_grid.empty())
        throw ConfigError("f-grid: sweep needs --f-grid or --t-grid");
    const ChainSpec base = chain_spec(c, axis == SweepAxis::f ? grid.front() : *c.f);
    for (double v : grid) {
        RunConfig probe = c;
        if (axis == SweepAxis::temperature)
            probe.temp = v;
        chain_spec(probe, axis == SweepAxis::f ? v : *c.f);
    }

    const SweepResult r = sweep(base, part, axis, grid, policy, c.seed, c.workers);

    Output out(c.out);
    CsvWriter w(out.stream(), c.precision);
    write_header(w, c);
    w.header({"f", "T", "N", "M", "E_d", "ergotropy", "E_c", "E_c_min", "E_th", "eta", "theta_star", "seed",
              "status"});
    bool clean = true;
    for (const auto& p : r.points) {
        const double f = axis == SweepAxis::f ? p.value : *c.f;
        const double t = axis == SweepAxis::temperature ? p.value : c.temp;
        const std::string seed = std::to_string(p.seed);
        if (!p.report) {
            clean = false;
            w.row({f, t, static_cast<long long>(c.n), static_cast<long long>(c.m), {}, {}, {}, {}, {}, {}, {}, seed,
                   "error: " + p.error});
            continue;
        }
        const CycleReport& q = *p.report;
        std::string status = "ok";
        if (!q.ok()) {
            clean = false;
            status = "violation:";
            for (const auto& v : q.violations)
                status += " " + v + ";";
        }
        w.row({f, t, static_cast<long long>(c.n), static_cast<long long>(c.m), q.disconnect, q.ergotropy, q.reconnect,
               q.reconnect_min, q.heat, field(q.efficiency), format_angles(q.theta_star, c.precision), seed, status});
    }
    out.close();
    return clean ? kOk : kInvariantViolation;
}

inline int cmd_optimize(const RunConfig& c) {
    if (!c.f)
        throw ConfigError("f: optimize-phases needs a single --f");
    const ChainSpec spec = chain_spec(c, *c.f);
    const Partition part = partition(c);
    const CycleSetup setup = prepare_cycle(spec, part);
    const PhaseOptimum best = minimize_reconnect(setup.coupling, c.seed, c.budget);

    Output out(c.out);
    CsvWriter w(out.stream(), c.precision);
    write_header(w, c);
    w.header({"f", "T", "N", "M", "E_c_min", "evolution_value", "restart_value", "lower_bound", "diagonal_sum",
              "max_offdiagonal", "evaluations", "theta_star"});
    const PhaseCoupling& pc = setup.coupling;
    w.row({spec.f, spec.temperature, static_cast<long long>(c.n), static_cast<long long>(c.m), best.value,
           best.evolution_value, best.restart_value, pc.lower_bound(), pc.diagonal_sum(), pc.max_offdiagonal(),
           static_cast<long long>(best.evaluations), format_angles(best.theta, c.precision)});
    out.close();

    if (!c.dump_coupling.empty()) {
        Output dump(c.dump_coupling);
        CsvWriter d(dump.stream(), c.precision);
        write_header(d, c);
        d.header({"alpha", "gamma", "magnitude", "phase", "re", "im"});
        for (Index a = 0; a < pc.size(); ++a)
            for (Index g = 0; g < pc.size(); ++g)
                d.row({static_cast<long long>(a), static_cast<long long>(g), pc.magnitude(a, g), pc.phase(a, g),
                       pc.coupling(a, g).real(), pc.coupling(a, g).imag()});
        dump.close();
    }
    const bool sound = best.value >= pc.lower_bound() - kCycleTol && best.value <= best.restart_value + kCycleTol;
    return sound ? kOk : kInvariantViolation;
}

inline Series read_series(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open input file: " + path);
    std::vector<std::string> names;
    Series s;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        if (names.empty()) {
            names = cells;
            continue;
        }
        const auto fi = std::find(names.begin(), names.end(), "f") - names.begin();
        const auto vi = std::find(names.begin(), names.end(), column) - names.begin();
        if (fi >= static_cast<long>(names.size()))
            throw ConfigError("input: no 'f' column in " + path);
        if (vi >= static_cast<long>(names.size()))
            throw ConfigError("column: no column '" + column + "' in " + path);
        if (vi >= static_cast<long>(cells.size()) || cells[static_cast<std::size_t>(vi)].empty())
            continue;
        s.x.push_back(std::stod(cells[static_cast<std::size_t>(fi)]));
        s.y.push_back(std::stod(cells[static_cast<std::size_t>(vi)]));
    }
    if (names.empty())
        throw ConfigError("input: no header row in " + path);
    return s;
}

inline int cmd_fit(const RunConfig& c) {
    if (!(c.window_lo > 0.0 && c.window_lo < c.window_hi && c.window_hi < kCriticalField))
        throw ConfigError("window: need 0 < window-lo < window-hi < 0.5");
    Series s;
    std::string quantity;
    if (!c.input.empty()) {
        s = read_series(c.input, c.column);
        quantity = c.column;
    } else {
        if (c.quantity != "ergotropy" && c.quantity != "eta")
            throw ConfigError("quantity: expected ergotropy|eta, got '" + c.quantity + "'");
        if (c.points < kMinFitPoints)
            throw ConfigError("points: need at least " + std::to_string(kMinFitPoints));
        const double theta = c.theta.empty() ? 0.0 : parse_list(c.theta, "theta").front();
        chain_spec(c, c.window_lo);
        const auto grid = critical_window_grid(c.window_lo, c.window_hi, c.points);
        const auto reports = single_spin_sweep(grid, theta, c.n);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& r = reports[i];
            const std::optional<double> v = c.quantity == "ergotropy" ? opt(r.ergotropy) : r.efficiency;
            if (v) {
                s.x.push_back(grid[i]);
                s.y.push_back(*v);
            }
        }
        quantity = c.quantity;
    }
    ExponentFit fit;
    try {
        fit = fit_exponent(s, c.window_lo, c.window_hi, quantity);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    std::cout << "quantity=" << fit.quantity << " exponent=" << format_fixed(fit.exponent, 6)
              << " stderr=" << format_fixed(fit.stderr_exponent, 6) << " window=[" << num(fit.window_lo) << ", "
              << num(fit.window_hi) << "] r2=" << format_fixed(fit.r_squared, 6) << " points=" << fit.points << '\n';
    if (!c.out.empty()) {
        Output out(c.out);
        CsvWriter w(out.stream(), c.precision);
        write_header(w, c);
        w.comment("# exponent=" + format_fixed(fit.exponent, c.precision) +
                  " stderr=" + format_fixed(fit.stderr_exponent, c.precision) +
                  " r2=" + format_fixed(fit.r_squared, c.precision));
        w.header({"f", quantity});
        for (std::size_t i = 0; i < s.x.size(); ++i)
            w.row({s.x[i], s.y[i]});
        out.close();
    }
    return kOk;
}

// ---- config file merge -----------------------------------------------------

// Reads `key=value` lines (blank lines and `#` comments skipped) and returns
// them as `--key value` arguments for keys not already given on the command line.
inline std::vector<std::string> config_arguments(const std::string& path, const std::vector<std::string>& given,
                                                 const std::string& command) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file: " + path);
    std::vector<std::string> out;
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        std::string key = line.substr(first, eq - first);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
            key.pop_back();
        std::string value = line.substr(eq + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key == "version")
            continue;
        if (key == "command") {
            if (value != command)
                throw ConfigError("config: file is for '" + value + "', not '" + command + "'");
            continue;
        }
        if (std::find(given.begin(), given.end(), "--" + key) != given.end())
            continue;
        out.push_back("--" + key);
        out.push_back(value);
    }
    return out;
}

// ---- entry point -----------------------------------------------------------

inline void add_chain_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--n", c.n, "ring size");
    sub->add_option("--f", c.f, "transverse-field mixing parameter");
    sub->add_option("--f-grid", c.f_grid, "field grid lo:hi:steps");
    sub->add_option("--temp", c.temp, "temperature (0 = ground state)");
    sub->add_option("--branch", c.branch, "ground branch plus|minus|raw|mixed");
    sub->add_option("--tilt", c.tilt, "longitudinal symmetry-breaking field");
    sub->add_option("--out", c.out, "output CSV path (default stdout)");
    sub->add_option("--precision", c.precision, "decimal places in CSV");
    sub->add_option("--config", c.config_path, "key=value file merged under flags");
}

inline void add_cycle_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--m", c.m, "battery size");
    sub->add_option("--start", c.start, "first battery site");
    sub->add_option("--phases", c.phases, "zero|min|fixed");
    sub->add_option("--theta", c.theta, "fixed phases: one angle (m=1) or 2^m angles separated by ';'");
    sub->add_option("--seed", c.seed, "global seed");
    sub->add_option("--budget", c.budget, "optimizer evaluation budget");
    sub->add_option("--workers", c.workers, "worker threads (0 = hardware)");
}

inline int run(int argc, const char* const* argv) {
    RunConfig c;
    CLI::App app{"Quantum battery cycle on a transverse-field Ising ring"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* corr = app.add_subcommand("correlators", "one- and two-site correlators");
    add_chain_options(corr, c);
    corr->add_option("--source", c.source, "quadrature|exact|both");

    auto* cyc = app.add_subcommand("cycle", "run the cycle at one field or over a grid");
    add_chain_options(cyc, c);
    add_cycle_options(cyc, c);
    cyc->add_option("--t-grid", c.t_grid, "temperature grid lo:hi:steps");

    auto* swp = app.add_subcommand("sweep", "cycle over --f-grid or --t-grid");
    add_chain_options(swp, c);
    add_cycle_options(swp, c);
    swp->add_option("--t-grid", c.t_grid, "temperature grid lo:hi:steps");

    auto* optp = app.add_subcommand("optimize-phases", "minimize the reconnection energy over phases");
    add_chain_options(optp, c);
    add_cycle_options(optp, c);
    optp->add_option("--dump-coupling", c.dump_coupling, "write the coupling matrix to this CSV");

    auto* fit = app.add_subcommand("fit-exponent", "power-law exponent near the critical field");
    fit->add_option("--input", c.input, "CSV with an 'f' column");
    fit->add_option("--column", c.column, "column to fit");
    fit->add_option("--quantity", c.quantity, "ergotropy|eta for the built-in one-spin series");
    fit->add_option("--theta", c.theta, "one-spin phase for the built-in series");
    fit->add_option("--n", c.n, "ring size for the xz correlator");
    fit->add_option("--points", c.points, "points in the built-in series");
    fit->add_option("--window-lo", c.window_lo, "lower end of the fit window");
    fit->add_option("--window-hi", c.window_hi, "upper end of the fit window");
    fit->add_option("--out", c.out, "CSV of the fitted series");
    fit->add_option("--precision", c.precision, "decimal places in CSV");
    fit->add_option("--config", c.config_path, "key=value file merged under flags");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        std::string command;
        for (const auto& a : args)
            if (!a.empty() && a[0] != '-') {
                command = a;
                break;
            }
        const auto cfg = std::find(args.begin(), args.end(), "--config");
        if (cfg != args.end()) {
            if (cfg + 1 == args.end())
                throw ConfigError("config: missing path");
            const std::string path = *(cfg + 1);
            args.erase(cfg, cfg + 2);
            const auto extra = config_arguments(path, args, command);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoError;
    }

    try {
        if (c.precision < 0 || c.precision > 17)
            throw ConfigError("precision: must lie in [0, 17]");
        if (corr->parsed()) {
            c.command = "correlators";
            return cmd_correlators(c);
        }
        if (cyc->parsed() || swp->parsed()) {
            c.command = cyc->parsed() ? "cycle" : "sweep";
            return cmd_cycle(c);
        }
        if (optp->parsed()) {
            c.command = "optimize-phases";
            return cmd_optimize(c);
        }
        c.command = "fit-exponent";
        return cmd_fit(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kInvariantViolation;
    }
}

}  // namespace qbattery::cli
