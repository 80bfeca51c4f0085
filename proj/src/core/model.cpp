#include "bifurcation/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bifurcation/error.hpp"
#include "bifurcation/log_space.hpp"

namespace bifurcation {

namespace {

void check_xi(double xi) {
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
        throw ConfigError("xi must be nonnegative and finite");
    }
}

void check_log_g(double g) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw ConfigError("coupling g must be positive and finite");
    }
}

// Coherence psi_+ conj(psi_-) scaled by exp(log_scale), without forming
// 0 * inf when a component vanishes.
Complex scaled_coherence(const QubitState& psi, double log_scale) {
    const double log_mag = safe_log(std::abs(psi.plus())) + safe_log(std::abs(psi.minus()));
    if (log_mag == -std::numeric_limits<double>::infinity()) return {0.0, 0.0};
    return std::polar(std::exp(log_mag + log_scale), std::arg(psi.coherence()));
}

// Trace-normalized R for log diagonal weights (without populations) and a log cross term.
DensityMatrix2 normalized_rate_matrix(double log_plus, double log_minus, double log_cross,
                                      const QubitState& psi) {
    const double lp = safe_log(psi.plus_sq()) + log_plus;
    const double lm = safe_log(psi.minus_sq()) + log_minus;
    const double log_trace = log_sum_exp({lp, lm});
    return DensityMatrix2(std::exp(lp - log_trace), scaled_coherence(psi, log_cross - log_trace),
                          std::exp(lm - log_trace));
}

}  // namespace

double checked_exp(double log_value, const char* what) {
    if (std::isnan(log_value) || std::abs(log_value) > kSaturationLog) {
        std::ostringstream msg;
        msg << what << " saturated: log value " << log_value << " exceeds +-" << kSaturationLog;
        throw SaturationError(msg.str());
    }
    return std::exp(log_value);
}

LogBilinearForms log_bilinears_from_y(const AggregateY& agg, double g) {
    check_xi(agg.xi);
    check_log_g(g);
    const double log_g_sq = 2.0 * std::log(g);
    const double half = 0.5 * agg.xi;
    return {log_g_sq + agg.tilt() - half, log_g_sq - agg.tilt() - half, log_g_sq - half};
}

BilinearForms bilinears_from_y(const AggregateY& agg, double g) {
    const LogBilinearForms logs = log_bilinears_from_y(agg, g);
    return {checked_exp(logs.plus_sq, "b_+^2"), checked_exp(logs.minus_sq, "b_-^2"),
            checked_exp(logs.cross, "b_+ b_-")};
}

double log_w_hat(const AggregateY& agg, const QubitState& psi) {
    check_xi(agg.xi);
    return -0.5 * agg.xi + log_sum_exp({safe_log(psi.plus_sq()) + agg.tilt(),
                                        safe_log(psi.minus_sq()) - agg.tilt()});
}

double w_hat(const AggregateY& agg, const QubitState& psi) {
    return checked_exp(log_w_hat(agg, psi), "w_hat");
}

double log_w_hat_from_bilinears(const LogBilinearForms& forms, const QubitState& psi,
                                double log_g) {
    return log_sum_exp({safe_log(psi.plus_sq()) + forms.plus_sq,
                        safe_log(psi.minus_sq()) + forms.minus_sq}) -
           2.0 * log_g;
}

double w_hat_from_bilinears(const LogBilinearForms& forms, const QubitState& psi, double log_g) {
    return checked_exp(log_w_hat_from_bilinears(forms, psi, log_g), "w_hat");
}

DensityMatrix2 rho_from_bilinears(const LogBilinearForms& forms, const QubitState& psi) {
    return normalized_rate_matrix(forms.plus_sq, forms.minus_sq, forms.cross, psi);
}

DensityMatrix2 rho_final(const AggregateY& agg, const QubitState& psi) {
    check_xi(agg.xi);
    return normalized_rate_matrix(agg.tilt(), -agg.tilt(), 0.0, psi);
}

DensityMatrix2 rho_peak(int sign, double xi, const QubitState& psi) {
    check_xi(xi);
    if (sign != 1 && sign != -1) {
        throw ConfigError("peak sign must be +1 or -1");
    }
    if (psi.minus() == Complex(0.0, 0.0)) return DensityMatrix2::projector(+1);
    if (psi.plus() == Complex(0.0, 0.0)) return DensityMatrix2::projector(-1);

    // sign = +1: ratio = psi_-/psi_+, dominant entry (+,+).
    // sign = -1: ratio = psi_+/psi_-, dominant entry (-,-).
    const Complex ratio = sign > 0 ? psi.minus() / psi.plus() : psi.plus() / psi.minus();
    const double log_s = -xi + std::log(std::abs(ratio));
    const Complex phase = std::polar(1.0, std::arg(ratio));

    // Entries of (1 + s^2)^{-1} [[1, s phase*], [s phase, s^2]] in the
    // dominant-first ordering; for s > 1 the same expression is rescaled by 1/s^2.
    double dominant, minor, cross_mag;
    if (log_s <= 0.0) {
        const double s = std::exp(log_s);
        const double f = 1.0 / (1.0 + s * s);
        dominant = f;
        minor = f * s * s;
        cross_mag = f * s;
    } else {
        const double t = std::exp(-log_s);
        const double f = 1.0 / (1.0 + t * t);
        dominant = f * t * t;
        minor = f;
        cross_mag = f * t;
    }
    if (sign > 0) {
        // rho_{+-} = e^{-Xi} conj(psi_-/psi_+) / (...)
        return DensityMatrix2(dominant, cross_mag * std::conj(phase), minor);
    }
    // rho_{+-} = e^{-Xi} psi_+/psi_- / (...)
    return DensityMatrix2(minor, cross_mag * phase, dominant);
}

double q_density(double y, double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
        throw ConfigError("q_density requires xi > 0");
    }
    return std::sqrt(xi / (2.0 * std::numbers::pi)) * std::exp(-0.5 * xi * y * y);
}

double Q_density(double y, double xi, const QubitState& psi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
        throw ConfigError("Q_density requires xi > 0");
    }
    const double norm = std::sqrt(xi / (2.0 * std::numbers::pi));
    const double up = y - 1.0;
    const double down = y + 1.0;
    return psi.plus_sq() * norm * std::exp(-0.5 * xi * up * up) +
           psi.minus_sq() * norm * std::exp(-0.5 * xi * down * down);
}

DensityMatrix2 mean_final_rho(double xi, const QubitState& psi) {
    check_xi(xi);
    return DensityMatrix2(psi.plus_sq(), scaled_coherence(psi, -0.5 * xi), psi.minus_sq());
}

}  // namespace bifurcation
