#include "bifurcation/trial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/error.hpp"
#include "bifurcation/model.hpp"

namespace bifurcation::ensemble {

std::string_view to_string(EvolutionMode mode) {
    return mode == EvolutionMode::product ? "product" : "closed_form";
}

std::string_view to_string(Channel channel) {
    return channel == Channel::plus ? "plus" : "minus";
}

EvolutionMode parse_mode(std::string_view text) {
    if (text == "product") return EvolutionMode::product;
    if (text == "closed_form" || text == "closed-form") return EvolutionMode::closed_form;
    throw ConfigError("unknown evolution mode '" + std::string(text) + "'");
}

double TrialRealization::rate_weight() const {
    return std::exp(log_likelihood_ratio + log_w_hat);
}

std::vector<double> relative_rate_weights(std::span<const TrialRealization> trials) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& t : trials) peak = std::max(peak, t.log_likelihood_ratio + t.log_w_hat);
    std::vector<double> weights;
    weights.reserve(trials.size());
    for (const auto& t : trials) {
        weights.push_back(std::exp(t.log_likelihood_ratio + t.log_w_hat - peak));
    }
    return weights;
}

Channel classify(double y) { return y >= 0.0 ? Channel::plus : Channel::minus; }

TrialRealization evaluate_trial(const QubitState& psi, const StepSchedule& schedule,
                                EvolutionMode mode, std::span<const double> etas,
                                double log_likelihood_ratio, std::uint64_t trial_id) {
    if (etas.size() != schedule.size()) {
        throw ConfigError("eta sequence length does not match the schedule");
    }
    TrialRealization trial;
    trial.trial_id = trial_id;
    trial.log_likelihood_ratio = log_likelihood_ratio;
    trial.likelihood_ratio = checked_exp(log_likelihood_ratio, "likelihood ratio");

    AggregateY agg;
    if (mode == EvolutionMode::product) {
        const LogBilinearForms forms =
            evolve_log_bilinears(schedule.gains(), etas, schedule.kappa_sq());
        agg = aggregate_from_bilinears(forms, schedule.xi());
        trial.log_w_hat = log_w_hat_from_bilinears(forms, psi, schedule.log_g());
        trial.log_b_plus_sq = forms.plus_sq;
        trial.log_b_minus_sq = forms.minus_sq;
    } else {
        agg = aggregate_from_etas(etas, schedule.xi());
        trial.log_w_hat = log_w_hat(agg, psi);
        const LogBilinearForms forms = log_bilinears_from_y(agg, schedule.g());
        trial.log_b_plus_sq = forms.plus_sq;
        trial.log_b_minus_sq = forms.minus_sq;
    }
    trial.w_hat = checked_exp(trial.log_w_hat, "w_hat");
    trial.y = agg.y;
    trial.rho = rho_final(agg, psi);
    trial.channel = classify(agg.y);
    return trial;
}

TrialRealization run_trial(const QubitState& psi, const StepSchedule& schedule,
                           EvolutionMode mode, EtaDistribution dist, Proposal proposal,
                           CounterRng& rng, std::uint64_t trial_id) {
    const SampledSequence sampled = sample_configuration(psi, schedule, dist, proposal, rng);
    return evaluate_trial(psi, schedule, mode, sampled.etas, sampled.log_likelihood_ratio,
                          trial_id);
}

}  // namespace bifurcation::ensemble
