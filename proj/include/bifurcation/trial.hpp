#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bifurcation/density_matrix.hpp"
#include "bifurcation/eta.hpp"
#include "bifurcation/qubit_state.hpp"
#include "bifurcation/schedule.hpp"

namespace bifurcation::ensemble {

/// product: multiply the per-step bilinear factors and back-solve Y from
///          the channel ratio; w_hat is the trace of the evolved rate matrix.
/// closed_form: Y = sum(eta)/Xi and every quantity from its closed form.
enum class EvolutionMode { product, closed_form };

enum class Channel { plus, minus };

std::string_view to_string(EvolutionMode mode);
std::string_view to_string(Channel channel);
EvolutionMode parse_mode(std::string_view text);

/// One sampled apparatus configuration and the final state it produces.
struct TrialRealization {
    std::uint64_t trial_id = 0;
    double y = 0.0;
    double w_hat = 0.0;
    double log_w_hat = 0.0;
    /// p(configuration) / proposal(configuration).
    double likelihood_ratio = 1.0;
    double log_likelihood_ratio = 0.0;
    double log_b_plus_sq = 0.0;
    double log_b_minus_sq = 0.0;
    DensityMatrix2 rho;
    Channel channel = Channel::plus;

    /// Importance weight of the trial in prior-ensemble averages.
    double prior_weight() const { return likelihood_ratio; }
    /// Importance weight in transition-rate-weighted averages.
    double rate_weight() const;
};

/// Rate weights of all trials divided by the largest one, so that
/// self-normalized averages never overflow.
std::vector<double> relative_rate_weights(std::span<const TrialRealization> trials);

/// Channel from the sign of Y; Y = 0 counts as plus.
Channel classify(double y);

/// Evaluates a trial on a given eta-sequence. Propagates StepDomainError
/// (product mode) and SaturationError.
TrialRealization evaluate_trial(const QubitState& psi, const StepSchedule& schedule,
                                EvolutionMode mode, std::span<const double> etas,
                                double log_likelihood_ratio = 0.0, std::uint64_t trial_id = 0);

/// Samples a configuration from the trial's own stream and evaluates it.
TrialRealization run_trial(const QubitState& psi, const StepSchedule& schedule,
                           EvolutionMode mode, EtaDistribution dist, Proposal proposal,
                           CounterRng& rng, std::uint64_t trial_id = 0);

}  // namespace bifurcation::ensemble
