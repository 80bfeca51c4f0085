#pragma once

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/density_matrix.hpp"
#include "bifurcation/qubit_state.hpp"
#include "bifurcation/schedule.hpp"

// Closed-form expressions of the measurement model in terms of the
// accumulated asymmetry Y and the total variance Xi. All exponentials are
// evaluated in log space; functions that must return an exponential throw
// SaturationError once its exponent exceeds kSaturationLog in magnitude.

namespace bifurcation {

/// b_pm^2 = g^2 exp(Xi (+-Y - 1/2)), b_+ b_- = g^2 exp(-Xi/2).
BilinearForms bilinears_from_y(const AggregateY& agg, double g);
LogBilinearForms log_bilinears_from_y(const AggregateY& agg, double g);

/// Normalized total transition rate
/// w_hat = e^{-Xi/2} (|psi_+|^2 e^{Xi Y} + |psi_-|^2 e^{-Xi Y}).
double w_hat(const AggregateY& agg, const QubitState& psi);
double log_w_hat(const AggregateY& agg, const QubitState& psi);

/// (|psi_+|^2 b_+^2 + |psi_-|^2 b_-^2) / g^2 for evolved amplitudes; equals
/// w_hat(Y) only when the forms are exactly the exponentials of Y.
double w_hat_from_bilinears(const LogBilinearForms& forms, const QubitState& psi, double log_g);
double log_w_hat_from_bilinears(const LogBilinearForms& forms, const QubitState& psi,
                                double log_g);

/// Transition-rate matrix R normalized by its trace, with the cross term
/// taken from the forms as given. Pure only when cross^2 == plus_sq * minus_sq.
DensityMatrix2 rho_from_bilinears(const LogBilinearForms& forms, const QubitState& psi);

/// Final-state density matrix for a configuration with asymmetry Y. Always
/// pure; saturates smoothly to a channel projector.
DensityMatrix2 rho_final(const AggregateY& agg, const QubitState& psi);

/// Final state at the peak Y = sign, written in terms of the amplitude
/// ratio psi_-/psi_+ (sign = +1) or psi_+/psi_- (sign = -1). A vanishing
/// component yields the corresponding projector.
DensityMatrix2 rho_peak(int sign, double xi, const QubitState& psi);

/// Phase-space density of Y, sqrt(Xi/2pi) exp(-Xi Y^2/2).
double q_density(double y, double xi);

/// Distribution of final states, |psi_+|^2 N(Y; 1, 1/Xi) + |psi_-|^2 N(Y; -1, 1/Xi).
double Q_density(double y, double xi, const QubitState& psi);

/// Transition-rate-weighted ensemble mean of the final state: diagonal
/// populations unchanged, coherence suppressed by e^{-Xi/2}.
DensityMatrix2 mean_final_rho(double xi, const QubitState& psi);

/// Throws SaturationError if |log_value| > kSaturationLog, else exp(log_value).
double checked_exp(double log_value, const char* what);

}  // namespace bifurcation
