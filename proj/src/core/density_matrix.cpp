#include "bifurcation/density_matrix.hpp"

#include <Eigen/LU>

namespace bifurcation {

DensityMatrix2::DensityMatrix2(double pp, Complex pm, double mm) {
    m_ << Complex(pp, 0.0), pm, std::conj(pm), Complex(mm, 0.0);
}

DensityMatrix2 DensityMatrix2::pure(const QubitState& psi) {
    return DensityMatrix2(psi.plus_sq(), psi.coherence(), psi.minus_sq());
}

DensityMatrix2 DensityMatrix2::projector(int sign) {
    return sign > 0 ? DensityMatrix2(1.0, 0.0, 0.0) : DensityMatrix2(0.0, 0.0, 1.0);
}

double DensityMatrix2::hermiticity_defect() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix2::purity_defect() const { return (m_ * m_ - m_).norm(); }

double DensityMatrix2::determinant() const { return m_.determinant().real(); }

double DensityMatrix2::max_abs_diff(const DensityMatrix2& other) const {
    return (m_ - other.m_).cwiseAbs().maxCoeff();
}

}  // namespace bifurcation
