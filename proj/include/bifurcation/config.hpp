#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bifurcation/error.hpp"
#include "bifurcation/eta.hpp"
#include "bifurcation/rng.hpp"
#include "bifurcation/schedule.hpp"
#include "bifurcation/trial.hpp"

namespace bifurcation::cli {

/// Bad command line or configuration; maps to exit status 2.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class Command { closed_form, trajectory, ensemble, sweep };

std::string_view to_string(Command command);

struct RunConfig {
    Command command = Command::ensemble;
    double psi_plus_sq = 0.5;
    double psi_phase = 0.0;
    double xi = 1.0;
    std::size_t n_steps = 100;
    ensemble::EtaKind eta_dist = ensemble::EtaKind::rademacher;
    ensemble::EvolutionMode mode = ensemble::EvolutionMode::product;
    ensemble::Proposal proposal = ensemble::Proposal::defensive;
    std::uint64_t trials = 10000;
    std::uint64_t master_seed = kDefaultSeed;
    double g = 1.0;
    std::vector<double> sweep_xi;
    std::filesystem::path output = ".";
    std::size_t bins = 80;
    unsigned threads = 1;
    double kappa_sq_cap = StepSchedule::kDefaultKappaSqCap;
    /// Optional per-step schedule file (rows "kappa_sq,g").
    std::optional<std::filesystem::path> schedule_file;
    double y_min = -2.0;
    double y_max = 2.0;
    std::size_t y_points = 401;
    std::uint64_t trial_id = 0;

    /// Per-step schedule: the file if given, else uniform xi/n_steps with
    /// unit gains. Errors name the offending keys.
    StepSchedule schedule() const;

    /// Resolved values as (key, value) pairs in a fixed order, for output
    /// headers. Thread count and output path are execution details and
    /// are left out so outputs do not depend on them.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses `key = value` lines; '#' starts a comment. Throws UsageError
/// naming the line for malformed input.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Builds a RunConfig from raw key/value strings, validating every field.
/// Unknown keys, malformed values and out-of-range values throw UsageError
/// naming the key.
RunConfig resolve_config(const std::map<std::string, std::string>& values);

/// Command-line entry: flags override values from --config. Returns
/// std::nullopt when --help was requested (after printing it).
std::optional<RunConfig> parse_config(int argc, const char* const* argv);

/// Every key accepted in a config file.
const std::vector<std::string>& known_keys();

StepSchedule read_schedule_file(const std::filesystem::path& path, double kappa_sq_cap);

}  // namespace bifurcation::cli
