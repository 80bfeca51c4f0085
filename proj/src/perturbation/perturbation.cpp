#include "bifurcation/perturbation.hpp"

#include <cmath>
#include <sstream>

#include "bifurcation/error.hpp"
#include "bifurcation/log_space.hpp"

namespace bifurcation::perturbation {

namespace {

void check_coupling(double g, double w_hat) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw ConfigError("coupling g must be positive and finite");
    }
    if (!(w_hat > 0.0) || !std::isfinite(w_hat)) {
        throw ConfigError("w_hat must be positive and finite");
    }
}

}  // namespace

double ExtendedDensityMatrix3::hermiticity_defect() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double ExtendedDensityMatrix3::purity_defect() const { return (m_ * m_ - m_).norm(); }

DensityMatrix2::Matrix ExtendedDensityMatrix3::scattering_block() const {
    return m_.block<2, 2>(1, 1);
}

double stay_probability(double g, double w_hat) {
    check_coupling(g, w_hat);
    return 1.0 / (1.0 + g * g * w_hat);
}

double scatter_probability(double g, double w_hat) {
    check_coupling(g, w_hat);
    const double x = g * g * w_hat;
    return x / (1.0 + x);
}

double stay_probability_partial_sum(double g, double w_hat, int terms) {
    check_coupling(g, w_hat);
    if (terms < 1) {
        throw ConfigError("partial sum needs at least one term");
    }
    const double x = g * g * w_hat;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) {
        sum += term;
        term *= -x;
    }
    return sum;
}

ExtendedDensityMatrix3 rho_bar_3x3(double g, const AggregateY& agg, const QubitState& psi) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw ConfigError("coupling g must be positive and finite");
    }
    if (!(agg.xi >= 0.0) || !std::isfinite(agg.xi)) {
        throw ConfigError("xi must be nonnegative and finite");
    }
    const double log_g = std::log(g);
    const double xi = agg.xi;
    const double y = agg.y;
    const double log_abs_plus = safe_log(std::abs(psi.plus()));
    const double log_abs_minus = safe_log(std::abs(psi.minus()));
    const double arg_plus = std::arg(psi.plus());
    const double arg_minus = std::arg(psi.minus());

    // Normalization g^-2 e^{Xi/2} + |psi_+|^2 e^{Xi Y} + |psi_-|^2 e^{-Xi Y}.
    const double l00 = -2.0 * log_g + 0.5 * xi;
    const double l11 = safe_log(psi.plus_sq()) + xi * y;
    const double l22 = safe_log(psi.minus_sq()) - xi * y;
    const double log_norm = log_sum_exp({l00, l11, l22});

    // Off-diagonal magnitudes g^-1 e^{Xi(+-Y + 1/2)/2} |psi_pm| and |psi_+ psi_-|.
    const double l01 = -log_g + 0.5 * xi * (y + 0.5) + log_abs_plus;
    const double l02 = -log_g + 0.5 * xi * (-y + 0.5) + log_abs_minus;
    const double l12 = log_abs_plus + log_abs_minus;

    auto entry = [&](double log_mag, double phase) -> Complex {
        if (log_mag == -std::numeric_limits<double>::infinity()) return {0.0, 0.0};
        return std::polar(std::exp(log_mag - log_norm), phase);
    };

    ExtendedDensityMatrix3::Matrix m;
    m(0, 0) = entry(l00, 0.0);
    m(0, 1) = entry(l01, -arg_plus);
    m(0, 2) = entry(l02, -arg_minus);
    m(1, 0) = entry(l01, arg_plus);
    m(1, 1) = entry(l11, 0.0);
    m(1, 2) = entry(l12, arg_plus - arg_minus);
    m(2, 0) = entry(l02, arg_minus);
    m(2, 1) = entry(l12, arg_minus - arg_plus);
    m(2, 2) = entry(l22, 0.0);
    return ExtendedDensityMatrix3(m, g);
}

DensityMatrix2 reduce_strong_coupling(const ExtendedDensityMatrix3& ext) {
    const DensityMatrix2::Matrix block = ext.scattering_block();
    const double trace = block.trace().real();
    if (!(trace > 1e-300) || !std::isfinite(trace)) {
        std::ostringstream msg;
        msg << "scattering block has trace " << trace << " at g = " << ext.coupling()
            << "; nothing left to renormalize";
        throw DegenerateReductionError(msg.str());
    }
    return DensityMatrix2(block / trace);
}

ExtendedDensityMatrix3 embed(const DensityMatrix2& rho, double g) {
    ExtendedDensityMatrix3::Matrix m = ExtendedDensityMatrix3::Matrix::Zero();
    m.block<2, 2>(1, 1) = rho.matrix();
    return ExtendedDensityMatrix3(m, g);
}

}  // namespace bifurcation::perturbation
