#include "bifurcation/qubit_state.hpp"

#include <cmath>
#include <sstream>

#include "bifurcation/error.hpp"

namespace bifurcation {

QubitState::QubitState(Complex psi_plus, Complex psi_minus)
    : QubitState(psi_plus, psi_minus, std::norm(psi_plus), std::norm(psi_minus)) {}

QubitState::QubitState(Complex plus, Complex minus, double plus_sq, double minus_sq)
    : plus_(plus), minus_(minus), plus_sq_(plus_sq), minus_sq_(minus_sq) {
    const double total = plus_sq_ + minus_sq_;
    if (!std::isfinite(total) || std::abs(total - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg << "qubit state is not normalized: |psi_+|^2 + |psi_-|^2 = " << total;
        throw ConfigError(msg.str());
    }
}

QubitState QubitState::from_population(double plus_sq, double relative_phase) {
    if (!(plus_sq >= 0.0 && plus_sq <= 1.0)) {
        std::ostringstream msg;
        msg << "plus-channel population " << plus_sq << " is outside [0, 1]";
        throw ConfigError(msg.str());
    }
    if (!std::isfinite(relative_phase)) {
        throw ConfigError("relative phase must be finite");
    }
    const double minus_sq = 1.0 - plus_sq;
    // Populations are stored exactly as given, not re-derived from the roots.
    return QubitState(Complex(std::sqrt(plus_sq), 0.0),
                      std::polar(std::sqrt(minus_sq), relative_phase), plus_sq, minus_sq);
}

}  // namespace bifurcation
