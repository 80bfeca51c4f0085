#pragma once

#include <span>

#include "bifurcation/qubit_state.hpp"

namespace bifurcation {

/// Real, positive scattering amplitudes b_+ and b_- of the two channels.
struct ChannelAmplitudes {
    double plus = 1.0;
    double minus = 1.0;
};

/// The bilinear forms b_+^2, b_-^2 and b_+ b_- evolved under the
/// mean-replacement convention, so cross^2 <= plus_sq * minus_sq in general.
struct BilinearForms {
    double plus_sq = 1.0;
    double minus_sq = 1.0;
    double cross = 1.0;
};

/// Natural logarithms of BilinearForms, for long products.
struct LogBilinearForms {
    double plus_sq = 0.0;
    double minus_sq = 0.0;
    double cross = 0.0;

    BilinearForms exp() const;
};

/// Accumulated asymmetry Y together with the total variance Xi it was
/// accumulated over.
struct AggregateY {
    double y = 0.0;
    double xi = 0.0;

    /// Xi * Y, the log of the channel enhancement factor.
    double tilt() const { return xi * y; }
};

/// b_pm <- b_pm g_n (1 +- eta_n/2 - kappa_n^2/8). Throws StepDomainError if
/// either factor is nonpositive.
ChannelAmplitudes step_amplitudes(const ChannelAmplitudes& prev, double g_n, double eta_n,
                                  double kappa_sq_n);

/// b_pm^2 <- b_pm^2 g_n^2 (1 +- eta_n), b_+ b_- <- b_+ b_- g_n^2 (1 - kappa_n^2/2).
/// Throws StepDomainError for |eta_n| >= 1.
BilinearForms step_bilinears(const BilinearForms& prev, double g_n, double eta_n,
                             double kappa_sq_n);

/// step_bilinears in log space.
LogBilinearForms step_log_bilinears(const LogBilinearForms& prev, double g_n, double eta_n,
                                    double kappa_sq_n);

/// Applies step_log_bilinears over a whole sequence, starting from b = 1.
/// gains, etas and kappa_sq must have equal length.
LogBilinearForms evolve_log_bilinears(std::span<const double> gains,
                                      std::span<const double> etas,
                                      std::span<const double> kappa_sq);

/// Back-solves Y = ln(b_+^2 / b_-^2) / (2 Xi). Returns Y = 0 when xi == 0.
AggregateY aggregate_from_bilinears(const LogBilinearForms& forms, double xi);

/// Y = (sum eta_n) / Xi. Returns Y = 0 when xi == 0.
AggregateY aggregate_from_etas(std::span<const double> etas, double xi);

}  // namespace bifurcation
