#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bifurcation/ensemble.hpp"
#include "bifurcation/error.hpp"
#include "bifurcation/model.hpp"

namespace {

using namespace bifurcation;
using namespace bifurcation::ensemble;

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    double se = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    const double n = static_cast<double>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= n - 1.0;
    m.se = std::sqrt(m.var / n);
    return m;
}

EnsembleRun run(double p, double xi, std::size_t n, std::uint64_t trials,
                EvolutionMode mode = EvolutionMode::product, EtaKind eta = EtaKind::rademacher,
                Proposal proposal = Proposal::defensive, unsigned threads = 1,
                double phase = 0.0) {
    EnsembleConfig config;
    config.mode = mode;
    config.eta.kind = eta;
    config.proposal = proposal;
    config.trials = trials;
    config.threads = threads;
    return run_ensemble(QubitState::from_population(p, phase), StepSchedule::uniform(xi, n),
                        config);
}

TEST(Eta, DegenerateAndTwoPointSupport) {
    CounterRng rng(1, 0);
    const StepSchedule zero(std::vector<double>(20, 0.0), std::vector<double>(20, 1.0));
    for (EtaKind kind : {EtaKind::rademacher, EtaKind::gaussian}) {
        for (double e : sample_eta_sequence(zero, {kind}, rng)) EXPECT_EQ(e, 0.0);
    }
    const auto etas = sample_eta_sequence(StepSchedule::uniform(10.0, 1000), {}, rng);
    for (double e : etas) EXPECT_EQ(std::abs(e), 0.1);
}

TEST(Eta, PriorMomentsFromMillionDraws) {
    for (EtaKind kind : {EtaKind::rademacher, EtaKind::gaussian}) {
        CounterRng rng(2, static_cast<std::uint64_t>(kind));
        std::vector<double> xs(1000000);
        for (double& x : xs) x = sample_eta(kind, 0.04, rng);
        const auto m = moments(xs);
        EXPECT_LT(std::abs(m.mean) / m.se, 5.0);
        EXPECT_NEAR(m.var, 0.04, 5.0 * 0.04 * std::sqrt(2.0 / 1e6) * 2.0);
    }
}

TEST(Eta, TiltedMoments) {
    // Under (1 + s x) p(x): mean s kappa^2, second moment kappa^2.
    const double k2 = 0.04;
    for (EtaKind kind : {EtaKind::rademacher, EtaKind::gaussian}) {
        for (int s : {+1, -1}) {
            CounterRng rng(3, static_cast<std::uint64_t>(kind) * 2 + (s > 0));
            std::vector<double> xs(400000), sq(400000);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                xs[i] = sample_tilted_eta(kind, k2, s, rng);
                sq[i] = xs[i] * xs[i];
            }
            const auto m = moments(xs);
            const auto m2 = moments(sq);
            EXPECT_LT(std::abs(m.mean - s * k2) / m.se, 5.0);
            if (kind == EtaKind::rademacher) {
                EXPECT_NEAR(m2.mean, k2, 1e-12);
            } else {
                EXPECT_LT(std::abs(m2.mean - k2) / m2.se, 5.0);
            }
        }
    }
}

TEST(Eta, LikelihoodRatios) {
    const auto psi = QubitState::from_population(0.7);
    const std::vector<double> etas = {0.1, 0.1, -0.1, 0.1};
    const double prod = 0.7 * 1.1 * 1.1 * 0.9 * 1.1 + 0.3 * 0.9 * 0.9 * 1.1 * 0.9;
    EXPECT_NEAR(log_product_rate(psi, etas), std::log(prod), 1e-14);
    EXPECT_EQ(log_likelihood_ratio(psi, etas, Proposal::prior), 0.0);
    EXPECT_NEAR(log_likelihood_ratio(psi, etas, Proposal::selected), -std::log(prod), 1e-14);
    EXPECT_NEAR(log_likelihood_ratio(psi, etas, Proposal::defensive),
                -std::log(0.5 + 0.5 * prod), 1e-14);

    const auto schedule = StepSchedule::uniform(4.0, 400);
    for (std::uint64_t k = 0; k < 200; ++k) {
        CounterRng rng(4, k);
        const auto s = sample_configuration(psi, schedule, {}, Proposal::defensive, rng);
        EXPECT_LE(s.log_likelihood_ratio, std::log(2.0) + 1e-12);
        EXPECT_EQ(s.etas.size(), schedule.size());
    }
}

TEST(Eta, ParseNames) {
    EXPECT_EQ(parse_eta_kind("gaussian"), EtaKind::gaussian);
    EXPECT_EQ(parse_proposal("selected"), Proposal::selected);
    EXPECT_EQ(parse_mode("closed-form"), EvolutionMode::closed_form);
    EXPECT_THROW(parse_eta_kind("uniform"), ConfigError);
    EXPECT_THROW(parse_proposal("x"), ConfigError);
    EXPECT_THROW(parse_mode("x"), ConfigError);
}

TEST(Trial, AllZeroSequence) {
    const auto psi = QubitState::from_population(0.5);
    const auto schedule = StepSchedule::uniform(1.0, 100);
    const std::vector<double> etas(100, 0.0);
    for (auto mode : {EvolutionMode::product, EvolutionMode::closed_form}) {
        const auto t = evaluate_trial(psi, schedule, mode, etas);
        EXPECT_EQ(t.y, 0.0);
        EXPECT_LT(t.rho.max_abs_diff(rho_final({0.0, 1.0}, psi)), 1e-15);
        EXPECT_NEAR(t.rho.pm().real(), 0.5, 1e-15);
    }
}

TEST(Trial, AllPlusSequence) {
    const auto psi = QubitState::from_population(0.4);
    const auto schedule = StepSchedule::uniform(1.0, 100);
    const std::vector<double> etas(100, 0.1);
    const auto t = evaluate_trial(psi, schedule, EvolutionMode::closed_form, etas);
    EXPECT_NEAR(schedule.xi(), 1.0, 1e-15);
    EXPECT_NEAR(t.y, 10.0, 1e-12);
    EXPECT_EQ(t.channel, Channel::plus);
    EXPECT_NEAR(t.rho.mm() / t.rho.pp(), std::exp(-20.0) * 0.6 / 0.4, 1e-20);
    EXPECT_GT(t.rho.pp(), 1.0 - 1e-8);
}

TEST(Trial, SingleChannelInput) {
    const QubitState up(Complex(1.0, 0.0), Complex(0.0, 0.0));
    const auto schedule = StepSchedule::uniform(4.0, 400);
    for (std::uint64_t k = 0; k < 20; ++k) {
        CounterRng rng(5, k);
        const auto t = run_trial(up, schedule, EvolutionMode::product, {}, Proposal::prior, rng);
        EXPECT_LT(t.rho.max_abs_diff(DensityMatrix2::projector(+1)), 1e-15);
        if (t.y >= 0.0) {
            EXPECT_EQ(t.channel, Channel::plus);
        }
    }
    CounterRng rng(5, 99);
    const auto t = run_trial(up, schedule, EvolutionMode::product, {}, Proposal::selected, rng);
    EXPECT_EQ(t.channel, Channel::plus);
}

TEST(Trial, WHatPerMode) {
    const auto psi = QubitState::from_population(0.6, 0.3);
    const auto schedule = StepSchedule::uniform(2.0, 200);
    CounterRng rng(6, 0);
    const auto etas = sample_eta_sequence(schedule, {}, rng);
    const auto closed = evaluate_trial(psi, schedule, EvolutionMode::closed_form, etas);
    EXPECT_NEAR(closed.w_hat, w_hat({closed.y, schedule.xi()}, psi), 1e-12);
    const auto product = evaluate_trial(psi, schedule, EvolutionMode::product, etas);
    double plus = 1.0, minus = 1.0;
    for (double e : etas) {
        plus *= 1.0 + e;
        minus *= 1.0 - e;
    }
    EXPECT_NEAR(product.w_hat, 0.6 * plus + 0.4 * minus, 1e-12);
    EXPECT_LE(product.rho.purity_defect(), 1e-12);
}

TEST(Trial, GaussianStepOutsideDomainThrowsInProductMode) {
    const auto psi = QubitState::from_population(0.5);
    const StepSchedule schedule({0.01, 0.01}, {1.0, 1.0});
    const std::vector<double> etas = {0.1, -1.5};
    EXPECT_THROW(evaluate_trial(psi, schedule, EvolutionMode::product, etas), StepDomainError);
    EXPECT_NO_THROW(evaluate_trial(psi, schedule, EvolutionMode::closed_form, etas));
}

TEST(Ensemble, SingleTrialSummary) {
    const auto r = run(0.7, 4.0, 400, 1);
    ASSERT_EQ(r.trials.size(), 1u);
    const auto& t = r.trials.front();
    const auto& s = r.summary;
    EXPECT_EQ(s.trials, 1u);
    EXPECT_DOUBLE_EQ(s.y_mean_unweighted.value, t.y);
    EXPECT_DOUBLE_EQ(s.y_mean_weighted.value, t.y);
    EXPECT_DOUBLE_EQ(s.rho_pp.value, t.rho.pp());
    EXPECT_DOUBLE_EQ(s.rho_mm.value, t.rho.mm());
    EXPECT_DOUBLE_EQ(s.born_plus_weighted.value, t.channel == Channel::plus ? 1.0 : 0.0);
    EXPECT_DOUBLE_EQ(s.mean_w.value, t.likelihood_ratio * t.w_hat);
}

TEST(Ensemble, UnweightedVarianceAtUnitXi) {
    const auto r = run(0.7, 1.0, 100, 100000);
    EXPECT_LT(r.summary.y_var_unweighted.deviation(1.0), 5.0);
    EXPECT_LT(r.summary.y_mean_unweighted.deviation(0.0), 5.0);
}

TEST(Ensemble, RateNormalizationAndNonBias) {
    for (EtaKind eta : {EtaKind::rademacher, EtaKind::gaussian}) {
        for (double xi : {1.0, 10.0}) {
            const auto r = run(0.8, xi, static_cast<std::size_t>(xi * 100), 20000,
                               EvolutionMode::product, eta);
            EXPECT_LT(r.summary.mean_w.deviation(1.0), 5.0);
            EXPECT_LT(r.summary.mean_b_plus_sq.deviation(1.0), 5.0);
            EXPECT_LT(r.summary.mean_b_minus_sq.deviation(1.0), 5.0);
        }
    }
}

TEST(Ensemble, PriorAndDefensiveProposalsAgree) {
    for (double xi : {1.0, 4.0}) {
        const auto n = static_cast<std::size_t>(xi * 100);
        const auto a = run(0.7, xi, n, 40000, EvolutionMode::closed_form, EtaKind::rademacher,
                           Proposal::prior);
        const auto b = run(0.7, xi, n, 40000, EvolutionMode::closed_form, EtaKind::rademacher,
                           Proposal::defensive);
        auto agree = [](const Estimate& x, const Estimate& y) {
            return std::abs(x.value - y.value) / std::hypot(x.std_error, y.std_error);
        };
        EXPECT_LT(agree(a.summary.born_plus_weighted, b.summary.born_plus_weighted), 5.0);
        EXPECT_LT(agree(a.summary.y_mean_weighted, b.summary.y_mean_weighted), 5.0);
        EXPECT_LT(agree(a.summary.y_var_unweighted, b.summary.y_var_unweighted), 5.0);
        EXPECT_LT(agree(a.summary.rho_pm_re, b.summary.rho_pm_re), 5.0);
    }
}

TEST(Ensemble, WeightedRhoMatchesMeanFinalRho) {
    const double xi = 3.0;
    const auto psi = QubitState::from_population(0.65, 0.9);
    const auto r = run(0.65, xi, 300, 40000, EvolutionMode::closed_form, EtaKind::gaussian,
                       Proposal::defensive, 1, 0.9);
    const auto target = mean_final_rho(xi, psi);
    EXPECT_LT(r.summary.rho_pp.deviation(target.pp()), 5.0);
    EXPECT_LT(r.summary.rho_mm.deviation(target.mm()), 5.0);
    EXPECT_LT(r.summary.rho_pm_re.deviation(target.pm().real()), 5.0);
    EXPECT_LT(r.summary.rho_pm_im.deviation(target.pm().imag()), 5.0);
    EXPECT_TRUE(r.summary.undecided_regime);
}

TEST(Ensemble, ThreadCountDoesNotChangeResults) {
    const auto a = run(0.7, 9.0, 900, 3000, EvolutionMode::product, EtaKind::gaussian,
                       Proposal::defensive, 1);
    for (unsigned threads : {2u, 8u}) {
        const auto b = run(0.7, 9.0, 900, 3000, EvolutionMode::product, EtaKind::gaussian,
                           Proposal::defensive, threads);
        ASSERT_EQ(a.trials.size(), b.trials.size());
        for (std::size_t i = 0; i < a.trials.size(); ++i) {
            ASSERT_EQ(a.trials[i].trial_id, b.trials[i].trial_id);
            ASSERT_EQ(a.trials[i].y, b.trials[i].y);
            ASSERT_EQ(a.trials[i].log_w_hat, b.trials[i].log_w_hat);
        }
        EXPECT_EQ(a.summary.born_plus_weighted.value, b.summary.born_plus_weighted.value);
        EXPECT_EQ(a.summary.mean_w.value, b.summary.mean_w.value);
        EXPECT_EQ(a.summary.y_var_weighted.std_error, b.summary.y_var_weighted.std_error);
        EXPECT_EQ(a.summary.histogram.density, b.summary.histogram.density);
    }
}

TEST(Ensemble, FailedTrialsAreCounted) {
    EnsembleConfig config;
    config.eta.kind = EtaKind::gaussian;
    config.trials = 400;
    const auto psi = QubitState::from_population(0.5);
    const StepSchedule risky({0.3, 0.3}, {1.0, 1.0}, 0.5);
    const auto r = run_ensemble(psi, risky, config);
    EXPECT_GT(r.failed_trials, 0u);
    EXPECT_EQ(r.failed_trials + r.trials.size(), 400u);
    EXPECT_EQ(r.summary.failed_trials, r.failed_trials);
    EXPECT_FALSE(r.first_failure.empty());

    config.trials = 20;
    config.proposal = Proposal::prior;
    const StepSchedule hopeless(std::vector<double>(400, 0.3), std::vector<double>(400, 1.0), 0.5);
    EXPECT_THROW(run_ensemble(psi, hopeless, config), EnsembleError);
}

TEST(Ensemble, ZeroTrialsRejected) {
    EnsembleConfig config;
    config.trials = 0;
    EXPECT_THROW(run_ensemble(QubitState::from_population(0.5), StepSchedule::uniform(1.0, 100),
                              config),
                 ConfigError);
}

TEST(Histogram, SingleTrialIsOneUnitMassBin) {
    TrialRealization t;
    t.y = 0.3;
    const std::vector<TrialRealization> trials = {t};
    const auto spec = covering_spec(trials, 50);
    const auto h = weighted_histogram(trials, spec);
    ASSERT_EQ(h.spec.bins, 1u);
    EXPECT_NEAR(h.mass(0), 1.0, 1e-15);
    EXPECT_THROW(weighted_histogram(std::vector<TrialRealization>{}, spec), ConfigError);
    t.y = 5.0;
    EXPECT_THROW(weighted_histogram(std::vector<TrialRealization>{t}, spec), ConfigError);
}

TEST(Histogram, LatticeSpacingAndAlignment) {
    const auto even = StepSchedule::uniform(1.0, 100);
    const auto closed = y_lattice(even, EtaKind::rademacher, EvolutionMode::closed_form);
    ASSERT_TRUE(closed.has_value());
    EXPECT_NEAR(closed->spacing, 0.2, 1e-12);
    EXPECT_EQ(closed->origin, 0.0);
    const auto odd = y_lattice(StepSchedule::uniform(1.01, 101), EtaKind::rademacher,
                               EvolutionMode::product);
    ASSERT_TRUE(odd.has_value());
    EXPECT_NEAR(odd->spacing, std::log(1.1 / 0.9) / 1.01, 1e-12);
    EXPECT_NEAR(odd->origin, 0.5 * odd->spacing, 1e-15);
    EXPECT_FALSE(y_lattice(even, EtaKind::gaussian, EvolutionMode::product).has_value());

    const auto r = run(0.5, 1.0, 100, 5000, EvolutionMode::closed_form);
    const auto& spec = r.summary.histogram.spec;
    const double units = spec.width() / closed->spacing;
    EXPECT_NEAR(units, std::round(units), 1e-9);
    EXPECT_EQ(static_cast<long>(std::round(units)) % 2, 1);
    for (const auto& t : r.trials) {
        const double offset = (t.y - spec.lo) / spec.width() - std::floor((t.y - spec.lo) / spec.width());
        EXPECT_GT(offset, 0.01);
        EXPECT_LT(offset, 0.99);
    }
}

TEST(Histogram, DensityIntegratesToOne) {
    const auto r = run(0.7, 8.0, 800, 5000);
    double total = 0.0;
    for (std::size_t i = 0; i < r.summary.histogram.spec.bins; ++i) {
        total += r.summary.histogram.mass(i);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

WeightedHistogram synthetic(std::vector<double> density, double se) {
    WeightedHistogram h;
    h.spec = {0.0, static_cast<double>(density.size()), density.size()};
    h.std_error.assign(density.size(), se);
    double total = 0.0;
    for (double d : density) total += d;
    for (double& d : density) d /= total;
    h.density = std::move(density);
    h.total_weight = 1.0;
    return h;
}

TEST(Modes, ProminenceThreshold) {
    const auto two = synthetic({1, 3, 8, 3, 1, 0.5, 1, 4, 12, 4, 1}, 0.001);
    const auto a = find_modes(two);
    ASSERT_EQ(a.modes.size(), 2u);
    EXPECT_EQ(a.modality(), "bimodal");
    EXPECT_EQ(a.modes[0].bin, 2u);
    EXPECT_EQ(a.modes[1].bin, 8u);
    EXPECT_NEAR(a.masses[0] + a.masses[1], 1.0, 1e-12);
    EXPECT_NEAR(a.masses[0], (1 + 3 + 8 + 3 + 1 + 0.25) / 38.5, 1e-12);

    const auto noisy = synthetic({1, 3, 8, 7.9, 8.0, 3, 1}, 0.01);
    EXPECT_EQ(find_modes(noisy).modes.size(), 1u);
    EXPECT_EQ(find_modes(noisy).modality(), "unimodal");
    EXPECT_EQ(find_modes(synthetic({0, 0, 0}, 0.0)).modality(), "none");
}

TEST(Modes, LocationIsParabolicVertex) {
    const auto h = synthetic({1, 4, 5, 2, 1}, 0.0);
    const auto a = find_modes(h);
    ASSERT_EQ(a.modes.size(), 1u);
    // Parabola through (1.5, 4), (2.5, 5), (3.5, 2) peaks at 2.25.
    EXPECT_NEAR(a.modes[0].location, 2.25, 1e-12);
}

TEST(Modes, UnimodalAtSmallXiAndBimodalAtLargeXi) {
    const auto small = run(0.7, 0.5, 100, 50000, EvolutionMode::product, EtaKind::rademacher,
                           Proposal::selected);
    EXPECT_EQ(small.summary.modes.modality(), "unimodal");
    const auto large = run(0.7, 25.0, 500, 50000, EvolutionMode::product, EtaKind::rademacher,
                           Proposal::selected);
    const auto& m = large.summary.modes;
    ASSERT_EQ(m.modality(), "bimodal");
    EXPECT_NEAR(m.modes[0].location, -1.0, 0.1);
    EXPECT_NEAR(m.modes[1].location, 1.0, 0.1);
    EXPECT_NEAR(m.masses[1], 0.7, 0.01);
}

TEST(Resample, ThreeToOneWeights) {
    std::vector<TrialRealization> trials(2);
    trials[0].log_w_hat = std::log(3.0);
    trials[0].y = 1.0;
    trials[1].log_w_hat = 0.0;
    trials[1].y = -1.0;
    CounterRng rng(8, 0);
    const std::size_t n = 200000;
    const auto picks = resample_final_states(trials, n, rng);
    double first = 0.0;
    for (const auto& t : picks) first += t.y > 0.0;
    const double se = std::sqrt(0.75 * 0.25 / n);
    EXPECT_LT(std::abs(first / n - 0.75) / se, 5.0);
}

TEST(Resample, EqualWeightsAreUniform) {
    std::vector<TrialRealization> trials(4);
    for (std::size_t i = 0; i < 4; ++i) trials[i].trial_id = i;
    CounterRng rng(9, 0);
    const std::size_t n = 100000;
    std::vector<double> counts(4, 0.0);
    for (const auto& t : resample_final_states(trials, n, rng)) counts[t.trial_id] += 1.0;
    const double se = std::sqrt(0.25 * 0.75 / n);
    for (double c : counts) EXPECT_LT(std::abs(c / n - 0.25) / se, 5.0);
    EXPECT_THROW(resample_final_states(std::vector<TrialRealization>{}, 1, rng), EnsembleError);
}

TEST(Resample, ChannelFractionFollowsBornRule) {
    const auto r = run(0.7, 25.0, 2500, 20000);
    CounterRng rng(10, 0);
    const std::size_t n = 20000;
    double plus = 0.0;
    for (const auto& t : resample_final_states(r.trials, n, rng)) plus += t.channel == Channel::plus;
    // Resampling noise plus the weighted estimator's own error.
    const double se = std::hypot(std::sqrt(0.21 / n), r.summary.born_plus_weighted.std_error);
    EXPECT_LT(std::abs(plus / n - 0.7) / se, 5.0);
}

}  // namespace
