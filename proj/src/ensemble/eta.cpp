#include "bifurcation/eta.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "bifurcation/error.hpp"
#include "bifurcation/log_space.hpp"

namespace bifurcation::ensemble {

std::string_view to_string(EtaKind kind) {
    switch (kind) {
        case EtaKind::rademacher: return "rademacher";
        case EtaKind::gaussian: return "gaussian";
    }
    return "unknown";
}

std::string_view to_string(Proposal proposal) {
    switch (proposal) {
        case Proposal::prior: return "prior";
        case Proposal::selected: return "selected";
        case Proposal::defensive: return "defensive";
    }
    return "unknown";
}

EtaKind parse_eta_kind(std::string_view text) {
    if (text == "rademacher") return EtaKind::rademacher;
    if (text == "gaussian") return EtaKind::gaussian;
    throw ConfigError("unknown eta distribution '" + std::string(text) + "'");
}

Proposal parse_proposal(std::string_view text) {
    if (text == "prior") return Proposal::prior;
    if (text == "selected") return Proposal::selected;
    if (text == "defensive") return Proposal::defensive;
    throw ConfigError("unknown proposal '" + std::string(text) + "'");
}

double sample_eta(EtaKind kind, double kappa_sq, CounterRng& rng) {
    if (kappa_sq == 0.0) return 0.0;
    const double kappa = std::sqrt(kappa_sq);
    if (kind == EtaKind::rademacher) {
        return (rng() >> 63) != 0 ? kappa : -kappa;
    }
    std::normal_distribution<double> normal(0.0, kappa);
    return normal(rng);
}

double sample_tilted_eta(EtaKind kind, double kappa_sq, int sign, CounterRng& rng) {
    if (kappa_sq == 0.0) return 0.0;
    const double kappa = std::sqrt(kappa_sq);
    const double s = sign > 0 ? 1.0 : -1.0;
    if (kind == EtaKind::rademacher) {
        // P(eta = s kappa) = (1 + kappa) / 2
        return rng.uniform() < 0.5 * (1.0 + kappa) ? s * kappa : -s * kappa;
    }
    // Rejection from N(s kappa^2, kappa^2): the target (1 + s x) phi(x) is
    // bounded by e^{kappa^2/2} times the proposal, and the acceptance
    // probability is (1 + s x) e^{-s x} <= 1.
    std::normal_distribution<double> normal(s * kappa_sq, kappa);
    for (;;) {
        const double x = normal(rng);
        const double accept = (1.0 + s * x) * std::exp(-s * x);
        if (accept > 0.0 && rng.uniform() < accept) return x;
    }
}

std::vector<double> sample_eta_sequence(const StepSchedule& schedule, EtaDistribution dist,
                                        CounterRng& rng) {
    std::vector<double> etas;
    etas.reserve(schedule.size());
    for (double k2 : schedule.kappa_sq()) etas.push_back(sample_eta(dist.kind, k2, rng));
    return etas;
}

double log_product_rate(const QubitState& psi, const std::vector<double>& etas) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    double log_plus = 0.0;
    double log_minus = 0.0;
    for (double eta : etas) {
        log_plus += eta > -1.0 ? std::log1p(eta) : kNegInf;
        log_minus += eta < 1.0 ? std::log1p(-eta) : kNegInf;
    }
    return log_sum_exp({safe_log(psi.plus_sq()) + log_plus, safe_log(psi.minus_sq()) + log_minus});
}

double log_likelihood_ratio(const QubitState& psi, const std::vector<double>& etas,
                            Proposal proposal) {
    switch (proposal) {
        case Proposal::prior: return 0.0;
        case Proposal::selected: return -log_product_rate(psi, etas);
        case Proposal::defensive:
            return -log_sum_exp({std::log(0.5), std::log(0.5) + log_product_rate(psi, etas)});
    }
    return 0.0;
}

SampledSequence sample_configuration(const QubitState& psi, const StepSchedule& schedule,
                                     EtaDistribution dist, Proposal proposal, CounterRng& rng) {
    bool from_prior = proposal == Proposal::prior;
    if (proposal == Proposal::defensive) from_prior = rng.uniform() < 0.5;

    SampledSequence out;
    if (from_prior) {
        out.etas = sample_eta_sequence(schedule, dist, rng);
    } else {
        const int sign = rng.uniform() < psi.plus_sq() ? +1 : -1;
        out.etas.reserve(schedule.size());
        for (double k2 : schedule.kappa_sq()) {
            out.etas.push_back(sample_tilted_eta(dist.kind, k2, sign, rng));
        }
    }
    out.log_likelihood_ratio = log_likelihood_ratio(psi, out.etas, proposal);
    return out;
}

}  // namespace bifurcation::ensemble
