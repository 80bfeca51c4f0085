#pragma once

#include <Eigen/Core>

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/density_matrix.hpp"
#include "bifurcation/qubit_state.hpp"

// Resummation of repeated returns to the unscattered initial state, and the
// 3x3 final-state density matrix in the ordered basis
// (unscattered, plus channel, minus channel).

namespace bifurcation::perturbation {

class ExtendedDensityMatrix3 {
public:
    using Matrix = Eigen::Matrix3cd;

    ExtendedDensityMatrix3(const Matrix& m, double g) : m_(m), g_(g) {}

    const Matrix& matrix() const { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }
    double coupling() const { return g_; }

    Complex trace() const { return m_.trace(); }
    double hermiticity_defect() const;
    double purity_defect() const;
    /// The (plus, minus) block, not renormalized.
    DensityMatrix2::Matrix scattering_block() const;

private:
    Matrix m_;
    double g_;
};

/// Probability that the initial state is left unchanged, 1/(1 + g^2 w_hat).
double stay_probability(double g, double w_hat);

/// Probability of scattering into either channel, g^2 w_hat/(1 + g^2 w_hat).
double scatter_probability(double g, double w_hat);

/// Partial sum of sum_{k=0}^{terms-1} (-g^2 w_hat)^k, the series whose
/// closed form is stay_probability. Converges for g^2 w_hat < 1.
double stay_probability_partial_sum(double g, double w_hat, int terms);

/// Final-state 3x3 density matrix for coupling g and configuration Y.
/// Evaluated in log space; never saturates.
ExtendedDensityMatrix3 rho_bar_3x3(double g, const AggregateY& agg, const QubitState& psi);

/// Scattering block renormalized by its trace. Throws
/// DegenerateReductionError when that trace underflows.
DensityMatrix2 reduce_strong_coupling(const ExtendedDensityMatrix3& ext);

/// rho embedded in the 3x3 basis with an empty unscattered row and column.
ExtendedDensityMatrix3 embed(const DensityMatrix2& rho, double g);

}  // namespace bifurcation::perturbation
