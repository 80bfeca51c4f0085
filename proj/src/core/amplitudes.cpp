#include "bifurcation/amplitudes.hpp"

#include <cmath>
#include <sstream>

#include "bifurcation/error.hpp"

namespace bifurcation {

namespace {

[[noreturn]] void throw_step_domain(const char* what, double eta_n, double kappa_sq_n) {
    std::ostringstream msg;
    msg << what << " (eta = " << eta_n << ", kappa^2 = " << kappa_sq_n
        << "); the step is too large for the second-order convention";
    throw StepDomainError(msg.str());
}

void check_gain(double g_n) {
    if (!(g_n > 0.0) || !std::isfinite(g_n)) {
        throw ConfigError("step gain must be positive and finite");
    }
}

}  // namespace

BilinearForms LogBilinearForms::exp() const {
    return {std::exp(plus_sq), std::exp(minus_sq), std::exp(cross)};
}

ChannelAmplitudes step_amplitudes(const ChannelAmplitudes& prev, double g_n, double eta_n,
                                  double kappa_sq_n) {
    check_gain(g_n);
    const double common = 1.0 - kappa_sq_n / 8.0;
    const double plus_factor = common + eta_n / 2.0;
    const double minus_factor = common - eta_n / 2.0;
    const ChannelAmplitudes next{prev.plus * g_n * plus_factor, prev.minus * g_n * minus_factor};
    if (!(next.plus > 0.0) || !(next.minus > 0.0)) {
        throw_step_domain("amplitude step factor is nonpositive", eta_n, kappa_sq_n);
    }
    return next;
}

BilinearForms step_bilinears(const BilinearForms& prev, double g_n, double eta_n,
                             double kappa_sq_n) {
    check_gain(g_n);
    if (!(std::abs(eta_n) < 1.0)) {
        throw_step_domain("|eta| >= 1 makes a squared amplitude nonpositive", eta_n, kappa_sq_n);
    }
    const double g_sq = g_n * g_n;
    return {prev.plus_sq * g_sq * (1.0 + eta_n), prev.minus_sq * g_sq * (1.0 - eta_n),
            prev.cross * g_sq * (1.0 - kappa_sq_n / 2.0)};
}

LogBilinearForms step_log_bilinears(const LogBilinearForms& prev, double g_n, double eta_n,
                                    double kappa_sq_n) {
    check_gain(g_n);
    if (!(std::abs(eta_n) < 1.0)) {
        throw_step_domain("|eta| >= 1 makes a squared amplitude nonpositive", eta_n, kappa_sq_n);
    }
    const double log_g_sq = 2.0 * std::log(g_n);
    return {prev.plus_sq + log_g_sq + std::log1p(eta_n),
            prev.minus_sq + log_g_sq + std::log1p(-eta_n),
            prev.cross + log_g_sq + std::log1p(-kappa_sq_n / 2.0)};
}

LogBilinearForms evolve_log_bilinears(std::span<const double> gains,
                                      std::span<const double> etas,
                                      std::span<const double> kappa_sq) {
    if (gains.size() != etas.size() || etas.size() != kappa_sq.size()) {
        throw ConfigError("gain, eta and kappa_sq sequences differ in length");
    }
    LogBilinearForms forms;
    for (std::size_t n = 0; n < etas.size(); ++n) {
        forms = step_log_bilinears(forms, gains[n], etas[n], kappa_sq[n]);
    }
    return forms;
}

AggregateY aggregate_from_bilinears(const LogBilinearForms& forms, double xi) {
    if (xi == 0.0) return {0.0, 0.0};
    return {(forms.plus_sq - forms.minus_sq) / (2.0 * xi), xi};
}

AggregateY aggregate_from_etas(std::span<const double> etas, double xi) {
    if (xi == 0.0) return {0.0, 0.0};
    double sum = 0.0;
    for (double eta : etas) sum += eta;
    return {sum / xi, xi};
}

}  // namespace bifurcation
