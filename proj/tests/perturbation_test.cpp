#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bifurcation/error.hpp"
#include "bifurcation/model.hpp"
#include "bifurcation/perturbation.hpp"

namespace {

using namespace bifurcation;
using namespace bifurcation::perturbation;

// Independent oracle: the normalized outer product of
// v = (1/g e^{Xi/4}, psi_+ e^{Xi Y/2}, psi_- e^{-Xi Y/2}), conjugated as displayed.
Eigen::Matrix3cd oracle_rho_bar(double g, double y, double xi, const QubitState& psi) {
    Eigen::Vector3cd v;
    v(0) = std::exp(xi / 4.0) / g;
    v(1) = std::conj(psi.plus()) * std::exp(xi * y / 2.0);
    v(2) = std::conj(psi.minus()) * std::exp(-xi * y / 2.0);
    Eigen::Matrix3cd m = v.conjugate() * v.transpose();
    return m / v.squaredNorm();
}

TEST(StayProbability, Examples) {
    EXPECT_EQ(stay_probability(1.0, 1.0), 0.5);
    EXPECT_EQ(scatter_probability(1.0, 1.0), 0.5);
    EXPECT_NEAR(stay_probability(1e-9, 3.0), 1.0, 1e-15);
    EXPECT_NEAR(scatter_probability(1e9, 0.2), 1.0, 1e-15);

    const double w = w_hat({1.0, 2.0}, QubitState::from_population(0.7));
    EXPECT_NEAR(stay_probability(2.0, w), 1.0 / (1.0 + 4.0 * w), 1e-15);
    EXPECT_NEAR(stay_probability(2.0, w), 0.11533, 1e-5);
    EXPECT_NEAR(scatter_probability(2.0, w), 0.88467, 1e-5);
    EXPECT_NEAR(stay_probability(2.0, w) + scatter_probability(2.0, w), 1.0, 1e-15);
}

TEST(StayProbability, Validation) {
    EXPECT_THROW(stay_probability(0.0, 1.0), ConfigError);
    EXPECT_THROW(stay_probability(1.0, -1.0), ConfigError);
    EXPECT_THROW(scatter_probability(std::nan(""), 1.0), ConfigError);
    EXPECT_THROW(stay_probability_partial_sum(0.5, 1.0, 0), ConfigError);
}

TEST(StayProbability, PartialSumsConverge) {
    for (double x : {0.1, 0.5, 0.9}) {
        const double g = std::sqrt(x);
        const double exact = stay_probability(g, 1.0);
        double previous = std::abs(stay_probability_partial_sum(g, 1.0, 1) - exact);
        for (int k = 2; k <= 60 && previous > 1e-14; ++k) {
            const double err = std::abs(stay_probability_partial_sum(g, 1.0, k) - exact);
            ASSERT_LT(err, previous) << "x=" << x << " k=" << k;
            previous = err;
        }
        const double tail = std::pow(x, 400) / (1.0 + x);
        EXPECT_NEAR(stay_probability_partial_sum(g, 1.0, 400), exact, tail + 1e-14);
    }
    EXPECT_EQ(stay_probability_partial_sum(1.0, 0.5, 1), 1.0);
    EXPECT_NEAR(stay_probability_partial_sum(1.0, 0.5, 2), 0.5, 1e-15);
}

TEST(RhoBar, Examples) {
    const auto psi = QubitState::from_population(0.5);
    const auto m = rho_bar_3x3(1.0, {0.0, 0.0}, psi);
    const double h = std::sqrt(0.5) / 2.0;
    const double expected[3][3] = {{0.5, h, h}, {h, 0.25, 0.25}, {h, 0.25, 0.25}};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            EXPECT_NEAR(m(r, c).real(), expected[r][c], 1e-15);
            EXPECT_NEAR(m(r, c).imag(), 0.0, 1e-15);
        }
    }
    EXPECT_NEAR(m(0, 1).real(), 0.35355, 1e-5);

    const auto tiny = rho_bar_3x3(1e-14, {0.5, 3.0}, QubitState::from_population(0.3, 1.0));
    Eigen::Matrix3cd unit = Eigen::Matrix3cd::Zero();
    unit(0, 0) = 1.0;
    EXPECT_LT((tiny.matrix() - unit).cwiseAbs().maxCoeff(), 1e-12);

    const QubitState up(Complex(0.0, 1.0), Complex(0.0, 0.0));
    const auto single = rho_bar_3x3(1.3, {0.7, 5.0}, up);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(single(2, k), Complex(0.0, 0.0));
        EXPECT_EQ(single(k, 2), Complex(0.0, 0.0));
    }
    EXPECT_LE(single.purity_defect(), 1e-12);
}

TEST(RhoBar, IdentitiesOnRandomGrid) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> lg(-2.0, 2.0), xis(0.0, 12.0), ys(-2.0, 2.0),
        ps(0.0, 1.0), phases(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
        const double g = std::pow(10.0, lg(gen));
        const AggregateY agg{ys(gen), xis(gen)};
        const auto psi = QubitState::from_population(ps(gen), phases(gen));
        const auto m = rho_bar_3x3(g, agg, psi);
        const double w = w_hat(agg, psi);
        ASSERT_NEAR(m.trace().real(), 1.0, 1e-12);
        ASSERT_LE(m.purity_defect(), 1e-12);
        ASSERT_LE(m.hermiticity_defect(), 1e-15);
        ASSERT_NEAR(m(0, 0).real(), stay_probability(g, w), 1e-12);
        ASSERT_NEAR(m.scattering_block().trace().real(), scatter_probability(g, w), 1e-12);
        ASSERT_LE((m.matrix() - oracle_rho_bar(g, agg.y, agg.xi, psi)).cwiseAbs().maxCoeff(),
                  1e-12);
        ASSERT_LE(reduce_strong_coupling(m).max_abs_diff(rho_final(agg, psi)), 1e-12);
    }
}

TEST(RhoBar, StaysFiniteAtLargeTilt) {
    const auto psi = QubitState::from_population(0.4, 0.2);
    const auto m = rho_bar_3x3(1e-3, {2.0, 800.0}, psi);
    EXPECT_NEAR(m.trace().real(), 1.0, 1e-12);
    EXPECT_LE(m.purity_defect(), 1e-12);
}

TEST(ReduceStrongCoupling, Examples) {
    const auto psi = QubitState::from_population(0.7);
    const AggregateY agg{1.0, 2.0};
    const auto reduced = reduce_strong_coupling(rho_bar_3x3(1000.0, agg, psi));
    EXPECT_LT(reduced.max_abs_diff(rho_final(agg, psi)), 1e-5);

    const QubitState up(Complex(1.0, 0.0), Complex(0.0, 0.0));
    const auto single = reduce_strong_coupling(rho_bar_3x3(2.0, {-0.3, 4.0}, up));
    EXPECT_LT(single.max_abs_diff(DensityMatrix2::projector(+1)), 1e-15);
}

TEST(ReduceStrongCoupling, DegenerateBlockThrows) {
    const auto psi = QubitState::from_population(0.5);
    EXPECT_THROW(reduce_strong_coupling(rho_bar_3x3(1e-200, {0.0, 1.0}, psi)),
                 DegenerateReductionError);
}

TEST(Embed, EmptyUnscatteredRowAndColumn) {
    const auto rho = rho_final({0.2, 3.0}, QubitState::from_population(0.6, 0.4));
    const auto e = embed(rho, 5.0);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(e(0, k), Complex(0.0, 0.0));
        EXPECT_EQ(e(k, 0), Complex(0.0, 0.0));
    }
    EXPECT_EQ(e(1, 2), rho.pm());
    EXPECT_EQ(e.coupling(), 5.0);
}

TEST(Embed, StrongCouplingGapShrinksLikeInverseG) {
    const auto psi = QubitState::from_population(0.7);
    const AggregateY agg{1.0, 2.0};
    auto gap = [&](double g) {
        return (rho_bar_3x3(g, agg, psi).matrix() - embed(rho_final(agg, psi), g).matrix())
            .cwiseAbs()
            .maxCoeff();
    };
    EXPECT_NEAR(gap(1e3) / gap(1e4), 10.0, 0.01);
    EXPECT_LT(gap(1e5), 1e-5);
}

}  // namespace
