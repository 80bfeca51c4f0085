#pragma once

#include <Eigen/Core>

#include "bifurcation/qubit_state.hpp"

namespace bifurcation {

/// 2x2 density matrix in the (+, -) basis.
class DensityMatrix2 {
public:
    using Matrix = Eigen::Matrix2cd;

    DensityMatrix2() : m_(Matrix::Zero()) {}
    explicit DensityMatrix2(const Matrix& m) : m_(m) {}
    /// Hermitian matrix from its upper triangle.
    DensityMatrix2(double pp, Complex pm, double mm);

    /// |psi><psi|.
    static DensityMatrix2 pure(const QubitState& psi);
    /// |+><+| for sign > 0, |-><-| otherwise.
    static DensityMatrix2 projector(int sign);

    double pp() const { return m_(0, 0).real(); }
    Complex pm() const { return m_(0, 1); }
    Complex mp() const { return m_(1, 0); }
    double mm() const { return m_(1, 1).real(); }
    Complex operator()(int row, int col) const { return m_(row, col); }
    const Matrix& matrix() const { return m_; }

    Complex trace() const { return m_.trace(); }
    /// Largest entrywise |rho - rho^dagger|.
    double hermiticity_defect() const;
    /// Frobenius norm of rho^2 - rho; zero for a pure state.
    double purity_defect() const;
    double determinant() const;
    /// Largest entrywise absolute difference.
    double max_abs_diff(const DensityMatrix2& other) const;

private:
    Matrix m_;
};

}  // namespace bifurcation
