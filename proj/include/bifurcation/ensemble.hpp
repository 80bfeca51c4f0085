#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bifurcation/density_matrix.hpp"
#include "bifurcation/eta.hpp"
#include "bifurcation/histogram.hpp"
#include "bifurcation/qubit_state.hpp"
#include "bifurcation/rng.hpp"
#include "bifurcation/schedule.hpp"
#include "bifurcation/trial.hpp"

namespace bifurcation::ensemble {

/// Below this total variance the two peaks of Q(Y) overlap and the
/// sign(Y) channel label is not a definite outcome.
inline constexpr double kUndecidedXi = 4.0;

struct EnsembleConfig {
    EvolutionMode mode = EvolutionMode::product;
    EtaDistribution eta;
    Proposal proposal = Proposal::defensive;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = kDefaultSeed;
    unsigned threads = 1;
    /// Approximate number of histogram bins; 0 disables the histogram.
    std::size_t bins = 80;
};

/// A Monte Carlo estimate and its standard error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;

    /// |value - target| in standard errors; infinite when the error is zero
    /// and the values differ.
    double deviation(double target) const;
};

struct EnsembleSummary {
    std::uint64_t trials = 0;
    std::uint64_t failed_trials = 0;
    double xi = 0.0;

    /// Prior-ensemble mean of w_hat.
    Estimate mean_w;
    /// Prior-ensemble means of b_+^2 and b_-^2; the non-bias condition sets both to g^2.
    Estimate mean_b_plus_sq;
    Estimate mean_b_minus_sq;

    Estimate y_mean_unweighted;
    Estimate y_var_unweighted;
    Estimate y_mean_weighted;
    Estimate y_var_weighted;

    Estimate born_plus_weighted;
    Estimate born_minus_weighted;

    DensityMatrix2 mean_rho_weighted;
    Estimate rho_pp;
    Estimate rho_pm_re;
    Estimate rho_pm_im;
    Estimate rho_mm;
    /// |<rho_{+-}>| with a first-order error.
    Estimate rho_pm_abs;

    /// Kish effective sample size of the rate weights.
    double effective_sample_size = 0.0;
    bool undecided_regime = false;

    bool has_histogram = false;
    WeightedHistogram histogram;
    ModeAnalysis modes;
};

struct EnsembleRun {
    std::vector<TrialRealization> trials;
    std::uint64_t failed_trials = 0;
    std::string first_failure;
    EnsembleSummary summary;
};

/// Runs `config.trials` independent trials, trial k on stream
/// CounterRng(master_seed, k), and reduces them in trial order. The result
/// does not depend on config.threads. Trials that leave the step domain are
/// dropped and counted; throws EnsembleError if every trial fails.
EnsembleRun run_ensemble(const QubitState& psi, const StepSchedule& schedule,
                         const EnsembleConfig& config);

/// Statistics of a set of trials; `lattice` aligns histogram bins.
EnsembleSummary summarize(std::span<const TrialRealization> trials, double xi,
                          std::uint64_t failed_trials, std::size_t bins,
                          std::optional<YLattice> lattice = std::nullopt);

/// Draws `count` trials with probability proportional to their rate
/// weight, with replacement.
std::vector<TrialRealization> resample_final_states(std::span<const TrialRealization> trials,
                                                    std::size_t count, CounterRng& rng);

}  // namespace bifurcation::ensemble
