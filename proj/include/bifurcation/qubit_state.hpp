#pragma once

#include <complex>

namespace bifurcation {

using Complex = std::complex<double>;

/// Superposition psi_plus |+> + psi_minus |->, normalized to 1e-12.
class QubitState {
public:
    static constexpr double kNormTolerance = 1e-12;

    /// Throws ConfigError unless |psi_plus|^2 + |psi_minus|^2 == 1 within tolerance.
    QubitState(Complex psi_plus, Complex psi_minus);

    /// psi_plus = sqrt(p), psi_minus = sqrt(1 - p) e^{i phase}.
    static QubitState from_population(double plus_sq, double relative_phase = 0.0);

    Complex plus() const { return plus_; }
    Complex minus() const { return minus_; }
    double plus_sq() const { return plus_sq_; }
    double minus_sq() const { return minus_sq_; }

    // psi_plus * conj(psi_minus)
    Complex coherence() const { return plus_ * std::conj(minus_); }

private:
    QubitState(Complex plus, Complex minus, double plus_sq, double minus_sq);

    Complex plus_;
    Complex minus_;
    double plus_sq_;
    double minus_sq_;
};

}  // namespace bifurcation
