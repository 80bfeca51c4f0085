#pragma once

#include <string_view>
#include <vector>

#include "bifurcation/qubit_state.hpp"
#include "bifurcation/rng.hpp"
#include "bifurcation/schedule.hpp"

namespace bifurcation::ensemble {

/// Law of the per-step asymmetry eta_n; both kinds have mean 0 and
/// variance kappa_n^2.
enum class EtaKind { rademacher, gaussian };

struct EtaDistribution {
    EtaKind kind = EtaKind::rademacher;
};

/// How apparatus configurations are drawn before importance weighting.
///
/// prior:     eta_n from the apparatus ensemble itself (likelihood ratio 1).
/// selected:  from the product-rate-tilted law |psi_+|^2 prod(1+eta_n) p(eta_n)
///            + |psi_-|^2 prod(1-eta_n) p(eta_n), the distribution of
///            configurations that actually scatter.
/// defensive: an equal mixture of prior and selected, which keeps every
///            likelihood ratio in (0, 2].
enum class Proposal { prior, selected, defensive };

std::string_view to_string(EtaKind kind);
std::string_view to_string(Proposal proposal);
EtaKind parse_eta_kind(std::string_view text);
Proposal parse_proposal(std::string_view text);

/// One draw of eta with mean 0 and variance kappa_sq.
double sample_eta(EtaKind kind, double kappa_sq, CounterRng& rng);

/// One draw from the density proportional to max(0, 1 + sign*eta) p(eta).
double sample_tilted_eta(EtaKind kind, double kappa_sq, int sign, CounterRng& rng);

/// Independent prior draws, one per step.
std::vector<double> sample_eta_sequence(const StepSchedule& schedule, EtaDistribution dist,
                                        CounterRng& rng);

/// An eta-sequence and the log of p(sequence) / proposal(sequence).
struct SampledSequence {
    std::vector<double> etas;
    double log_likelihood_ratio = 0.0;
};

SampledSequence sample_configuration(const QubitState& psi, const StepSchedule& schedule,
                                     EtaDistribution dist, Proposal proposal, CounterRng& rng);

/// log(|psi_+|^2 prod(1+eta_n) + |psi_-|^2 prod(1-eta_n)), with factors
/// clamped at zero; the tilt used by the selected proposal.
double log_product_rate(const QubitState& psi, const std::vector<double>& etas);

/// log p/q for a sequence under the given proposal.
double log_likelihood_ratio(const QubitState& psi, const std::vector<double>& etas,
                            Proposal proposal);

}  // namespace bifurcation::ensemble
