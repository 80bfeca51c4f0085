#include "bifurcation/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bifurcation::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
    throw UsageError(key + ": '" + value + "' " + why);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        bad_value(key, value, "is not a finite number");
    }
    return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        bad_value(key, value, "is not a nonnegative integer");
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_range(const std::string& key, double v, double lo, double hi, bool lo_open) {
    const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
    if (!ok) {
        std::ostringstream msg;
        msg << key << ": value " << v << " is out of range " << (lo_open ? "(" : "[") << lo
            << ", " << hi << "]";
        throw UsageError(msg.str());
    }
}

constexpr double kDefaultStepVariance = 0.01;

}  // namespace

std::string_view to_string(Command command) {
    switch (command) {
        case Command::closed_form: return "closed-form";
        case Command::trajectory: return "trajectory";
        case Command::ensemble: return "ensemble";
        case Command::sweep: return "sweep";
    }
    return "unknown";
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "command", "psi_plus_sq", "psi_phase", "xi",     "n_steps",      "eta_dist",
        "mode",    "proposal",    "trials",    "seed",   "g",            "sweep_xi",
        "output",  "bins",        "threads",   "kappa_sq_cap", "schedule", "y_min",
        "y_max",   "y_points",    "trial_id"};
    return keys;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("config: cannot open '" + path.string() + "'");
    }
    std::map<std::string, std::string> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string content = trim(std::string_view(line).substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config: line " + std::to_string(line_no) + " of '" +
                             path.string() + "' is not of the form key = value");
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty()) {
            throw UsageError("config: line " + std::to_string(line_no) + " has an empty key");
        }
        values[key] = value;
    }
    return values;
}

StepSchedule read_schedule_file(const std::filesystem::path& path, double kappa_sq_cap) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("schedule: cannot open '" + path.string() + "'");
    }
    std::vector<double> kappa_sq;
    std::vector<double> gains;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(std::string_view(line).substr(0, line.find('#')));
        if (content.empty() || content.rfind("kappa_sq", 0) == 0) continue;
        const auto comma = content.find(',');
        const std::string where = "schedule line " + std::to_string(line_no);
        if (comma == std::string::npos) {
            kappa_sq.push_back(parse_double(where, content));
            gains.push_back(1.0);
        } else {
            kappa_sq.push_back(parse_double(where, trim(content.substr(0, comma))));
            gains.push_back(parse_double(where, trim(content.substr(comma + 1))));
        }
    }
    try {
        return StepSchedule(std::move(kappa_sq), std::move(gains), kappa_sq_cap);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("schedule: ") + e.what());
    }
}

StepSchedule RunConfig::schedule() const {
    if (schedule_file) return read_schedule_file(*schedule_file, kappa_sq_cap);
    try {
        return StepSchedule::uniform(xi, n_steps, kappa_sq_cap);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("n_steps: ") + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> out = {
        {"command", std::string(to_string(command))},
        {"psi_plus_sq", format_double(psi_plus_sq)},
        {"psi_phase", format_double(psi_phase)},
        {"xi", format_double(xi)},
        {"n_steps", std::to_string(n_steps)},
        {"eta_dist", std::string(ensemble::to_string(eta_dist))},
        {"mode", std::string(ensemble::to_string(mode))},
        {"proposal", std::string(ensemble::to_string(proposal))},
        {"trials", std::to_string(trials)},
        {"seed", std::to_string(master_seed)},
        {"g", format_double(g)},
        {"bins", std::to_string(bins)},
        {"kappa_sq_cap", format_double(kappa_sq_cap)},
        {"y_min", format_double(y_min)},
        {"y_max", format_double(y_max)},
        {"y_points", std::to_string(y_points)},
        {"trial_id", std::to_string(trial_id)},
    };
    std::string sweep;
    for (std::size_t i = 0; i < sweep_xi.size(); ++i) {
        if (i) sweep += ';';
        sweep += format_double(sweep_xi[i]);
    }
    out.emplace_back("sweep_xi", sweep);
    out.emplace_back("schedule", schedule_file ? schedule_file->string() : "");
    return out;
}

RunConfig resolve_config(const std::map<std::string, std::string>& values) {
    const auto& keys = known_keys();
    for (const auto& [key, value] : values) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw UsageError(key + ": unknown key");
        }
    }
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    };
    auto require = [&](const std::string& key) -> std::string {
        auto v = get(key);
        if (!v) throw UsageError(key + ": missing required value");
        return *v;
    };

    RunConfig cfg;
    const std::string command = require("command");
    if (command == "closed-form" || command == "closed_form") {
        cfg.command = Command::closed_form;
    } else if (command == "trajectory") {
        cfg.command = Command::trajectory;
    } else if (command == "ensemble") {
        cfg.command = Command::ensemble;
    } else if (command == "sweep") {
        cfg.command = Command::sweep;
    } else {
        bad_value("command", command, "is not one of closed-form, trajectory, ensemble, sweep");
    }

    cfg.psi_plus_sq = parse_double("psi_plus_sq", require("psi_plus_sq"));
    require_range("psi_plus_sq", cfg.psi_plus_sq, 0.0, 1.0, false);
    if (auto v = get("psi_phase")) cfg.psi_phase = parse_double("psi_phase", *v);

    if (auto v = get("kappa_sq_cap")) {
        cfg.kappa_sq_cap = parse_double("kappa_sq_cap", *v);
        require_range("kappa_sq_cap", cfg.kappa_sq_cap, 0.0, 0.5, true);
    }
    if (auto v = get("schedule")) {
        if (!v->empty()) cfg.schedule_file = std::filesystem::path(*v);
    }

    if (cfg.schedule_file) {
        if (get("xi") || get("n_steps")) {
            throw UsageError("schedule: xi and n_steps are derived from the schedule file; "
                             "do not set them as well");
        }
        const StepSchedule schedule = read_schedule_file(*cfg.schedule_file, cfg.kappa_sq_cap);
        cfg.xi = schedule.xi();
        cfg.n_steps = schedule.size();
        if (!(cfg.xi > 0.0)) throw UsageError("schedule: total variance must be positive");
    } else {
        cfg.xi = parse_double("xi", require("xi"));
        require_range("xi", cfg.xi, 0.0, 1e6, true);
        if (auto v = get("n_steps")) {
            cfg.n_steps = parse_unsigned("n_steps", *v);
        } else {
            cfg.n_steps = static_cast<std::size_t>(
                std::max(1.0, std::ceil(cfg.xi / kDefaultStepVariance - 1e-9)));
        }
        if (cfg.n_steps < 1) throw UsageError("n_steps: value 0 is out of range [1, inf)");
        const double step = cfg.xi / static_cast<double>(cfg.n_steps);
        if (step > cfg.kappa_sq_cap) {
            std::ostringstream msg;
            msg << "n_steps: per-step variance xi / n_steps = " << step
                << " exceeds kappa_sq_cap = " << cfg.kappa_sq_cap << " (xi = " << cfg.xi
                << ", n_steps = " << cfg.n_steps << ")";
            throw UsageError(msg.str());
        }
    }

    try {
        if (auto v = get("eta_dist")) cfg.eta_dist = ensemble::parse_eta_kind(*v);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("eta_dist: ") + e.what());
    }
    try {
        if (auto v = get("mode")) cfg.mode = ensemble::parse_mode(*v);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("mode: ") + e.what());
    }
    try {
        if (auto v = get("proposal")) cfg.proposal = ensemble::parse_proposal(*v);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("proposal: ") + e.what());
    }

    if (auto v = get("trials")) cfg.trials = parse_unsigned("trials", *v);
    if (cfg.trials < 1) throw UsageError("trials: value 0 is out of range [1, inf)");
    if (auto v = get("seed")) cfg.master_seed = parse_unsigned("seed", *v);
    if (auto v = get("g")) {
        cfg.g = parse_double("g", *v);
        require_range("g", cfg.g, 0.0, 1e150, true);
    }
    if (auto v = get("output")) cfg.output = *v;
    if (auto v = get("bins")) cfg.bins = parse_unsigned("bins", *v);
    if (cfg.bins < 1) throw UsageError("bins: value 0 is out of range [1, inf)");
    if (auto v = get("threads")) {
        const auto t = parse_unsigned("threads", *v);
        if (t < 1 || t > 1024) throw UsageError("threads: value is out of range [1, 1024]");
        cfg.threads = static_cast<unsigned>(t);
    }
    if (auto v = get("y_min")) cfg.y_min = parse_double("y_min", *v);
    if (auto v = get("y_max")) cfg.y_max = parse_double("y_max", *v);
    if (!(cfg.y_max > cfg.y_min)) throw UsageError("y_max: must exceed y_min");
    if (auto v = get("y_points")) cfg.y_points = parse_unsigned("y_points", *v);
    if (cfg.y_points < 2) throw UsageError("y_points: value is out of range [2, inf)");
    if (auto v = get("trial_id")) cfg.trial_id = parse_unsigned("trial_id", *v);

    if (auto v = get("sweep_xi")) {
        std::string item;
        std::stringstream ss(*v);
        while (std::getline(ss, item, ',')) {
            // Semicolons are accepted too, matching the echoed form.
            std::stringstream inner(item);
            std::string part;
            while (std::getline(inner, part, ';')) {
                part = trim(part);
                if (part.empty()) continue;
                const double x = parse_double("sweep_xi", part);
                require_range("sweep_xi", x, 0.0, 1e6, true);
                cfg.sweep_xi.push_back(x);
            }
        }
    }
    if (cfg.command == Command::sweep) {
        if (cfg.sweep_xi.empty()) throw UsageError("sweep_xi: missing required value");
        if (cfg.schedule_file) {
            throw UsageError("schedule: a sweep derives its schedules from xi / n_steps");
        }
    }
    return cfg;
}

std::optional<RunConfig> parse_config(int argc, const char* const* argv) {
    CLI::App app{"Measurement-bifurcation model: closed forms, trajectories and ensembles",
                 "bifurcation"};
    std::string config_path;
    app.add_option("--config", config_path, "Configuration file of key = value lines");

    struct Flag {
        std::string key;
        std::string value;
        CLI::Option* option = nullptr;
    };
    const std::map<std::string, std::string> help = {
        {"psi_plus_sq", "Population |psi_+|^2 of the plus channel"},
        {"psi_phase", "Relative phase of psi_- in radians"},
        {"xi", "Total step variance Xi"},
        {"n_steps", "Number of apparatus subsystems (default ceil(xi / 0.01))"},
        {"eta_dist", "rademacher | gaussian"},
        {"mode", "product | closed_form"},
        {"proposal", "prior | selected | defensive"},
        {"trials", "Number of Monte Carlo trials"},
        {"seed", "Master seed"},
        {"g", "Overall coupling g"},
        {"sweep_xi", "Comma-separated Xi values for sweep"},
        {"output", "Output directory"},
        {"bins", "Approximate number of histogram bins"},
        {"threads", "Worker threads"},
        {"kappa_sq_cap", "Largest allowed per-step variance"},
        {"schedule", "CSV file of per-step kappa_sq[,g] rows"},
        {"y_min", "Lower end of the closed-form Y grid"},
        {"y_max", "Upper end of the closed-form Y grid"},
        {"y_points", "Number of closed-form grid points"},
        {"trial_id", "Trial whose configuration the trajectory command follows"},
    };
    std::vector<Flag> flags;
    flags.reserve(known_keys().size());
    for (const auto& key : known_keys()) {
        if (key == "command") continue;
        flags.push_back({key, {}, nullptr});
    }
    for (auto& flag : flags) {
        flag.option = app.add_option("--" + dashed(flag.key), flag.value, help.at(flag.key));
    }
    std::string command;
    app.add_option("command", command, "closed-form | trajectory | ensemble | sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    std::map<std::string, std::string> values;
    if (!config_path.empty()) values = read_config_file(config_path);
    for (const auto& flag : flags) {
        if (flag.option->count() > 0) values[flag.key] = flag.value;
    }
    if (!command.empty()) values["command"] = command;
    return resolve_config(values);
}

}  // namespace bifurcation::cli
