#include "bifurcation/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "bifurcation/error.hpp"

namespace bifurcation::ensemble {

double Estimate::deviation(double target) const {
    const double diff = std::abs(value - target);
    if (std::isnan(diff)) return std::numeric_limits<double>::infinity();
    if (std_error > 0.0) return diff / std_error;
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {

// Self-normalized weighted mean sum(w f)/sum(w) with its delta-method error.
Estimate weighted_mean(std::span<const double> w, std::span<const double> f) {
    double sw = 0.0;
    double swf = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        sw += w[i];
        swf += w[i] * f[i];
    }
    const double mean = swf / sw;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = w[i] * (f[i] - mean);
        acc += r * r;
    }
    return {mean, std::sqrt(acc) / sw};
}

Estimate weighted_variance(std::span<const double> w, std::span<const double> f) {
    const double mean = weighted_mean(w, f).value;
    double sw = 0.0;
    double swd = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = f[i] - mean;
        sw += w[i];
        swd += w[i] * d * d;
    }
    const double var = swd / sw;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = f[i] - mean;
        const double r = w[i] * (d * d - var);
        acc += r * r;
    }
    return {var, std::sqrt(acc) / sw};
}

// Plain sample mean with the standard error of the mean.
Estimate sample_mean(std::span<const double> f) {
    const auto n = static_cast<double>(f.size());
    double sum = 0.0;
    for (double x : f) sum += x;
    const double mean = sum / n;
    if (f.size() < 2) return {mean, 0.0};
    double acc = 0.0;
    for (double x : f) acc += (x - mean) * (x - mean);
    return {mean, std::sqrt(acc / (n - 1.0) / n)};
}

std::vector<double> relative_prior_weights(std::span<const TrialRealization> trials) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& t : trials) peak = std::max(peak, t.log_likelihood_ratio);
    std::vector<double> w;
    w.reserve(trials.size());
    for (const auto& t : trials) w.push_back(std::exp(t.log_likelihood_ratio - peak));
    return w;
}

template <typename Fn>
std::vector<double> collect(std::span<const TrialRealization> trials, Fn&& fn) {
    std::vector<double> out;
    out.reserve(trials.size());
    for (const auto& t : trials) out.push_back(fn(t));
    return out;
}

}  // namespace

EnsembleSummary summarize(std::span<const TrialRealization> trials, double xi,
                          std::uint64_t failed_trials, std::size_t bins,
                          std::optional<YLattice> lattice) {
    if (trials.empty()) {
        throw EnsembleError("no trials to summarize");
    }
    EnsembleSummary s;
    s.trials = trials.size();
    s.failed_trials = failed_trials;
    s.xi = xi;
    s.undecided_regime = xi < kUndecidedXi;

    s.mean_w = sample_mean(collect(trials, [](const auto& t) { return t.rate_weight(); }));
    s.mean_b_plus_sq = sample_mean(collect(trials, [](const auto& t) {
        return std::exp(t.log_likelihood_ratio + t.log_b_plus_sq);
    }));
    s.mean_b_minus_sq = sample_mean(collect(trials, [](const auto& t) {
        return std::exp(t.log_likelihood_ratio + t.log_b_minus_sq);
    }));

    const std::vector<double> ys = collect(trials, [](const auto& t) { return t.y; });
    const std::vector<double> prior_w = relative_prior_weights(trials);
    s.y_mean_unweighted = weighted_mean(prior_w, ys);
    s.y_var_unweighted = weighted_variance(prior_w, ys);

    const std::vector<double> rate_w = relative_rate_weights(trials);
    double sw = 0.0;
    double sw2 = 0.0;
    for (double w : rate_w) {
        sw += w;
        sw2 += w * w;
    }
    if (!(sw > 0.0) || !std::isfinite(sw)) {
        throw EnsembleError("rate weights do not sum to a positive finite value");
    }
    s.effective_sample_size = sw * sw / sw2;
    s.y_mean_weighted = weighted_mean(rate_w, ys);
    s.y_var_weighted = weighted_variance(rate_w, ys);

    s.born_plus_weighted = weighted_mean(
        rate_w, collect(trials, [](const auto& t) { return t.channel == Channel::plus ? 1.0 : 0.0; }));
    s.born_minus_weighted = {1.0 - s.born_plus_weighted.value, s.born_plus_weighted.std_error};

    s.rho_pp = weighted_mean(rate_w, collect(trials, [](const auto& t) { return t.rho.pp(); }));
    s.rho_mm = weighted_mean(rate_w, collect(trials, [](const auto& t) { return t.rho.mm(); }));
    s.rho_pm_re =
        weighted_mean(rate_w, collect(trials, [](const auto& t) { return t.rho.pm().real(); }));
    s.rho_pm_im =
        weighted_mean(rate_w, collect(trials, [](const auto& t) { return t.rho.pm().imag(); }));
    s.mean_rho_weighted =
        DensityMatrix2(s.rho_pp.value, Complex(s.rho_pm_re.value, s.rho_pm_im.value), s.rho_mm.value);
    const double abs_pm = std::hypot(s.rho_pm_re.value, s.rho_pm_im.value);
    const double abs_se =
        abs_pm > 0.0 ? std::hypot(s.rho_pm_re.value * s.rho_pm_re.std_error,
                                  s.rho_pm_im.value * s.rho_pm_im.std_error) /
                           abs_pm
                     : std::hypot(s.rho_pm_re.std_error, s.rho_pm_im.std_error);
    s.rho_pm_abs = {abs_pm, abs_se};

    if (bins > 0) {
        s.has_histogram = true;
        s.histogram = weighted_histogram(trials, covering_spec(trials, bins, lattice));
        s.modes = find_modes(s.histogram);
    }
    return s;
}

EnsembleRun run_ensemble(const QubitState& psi, const StepSchedule& schedule,
                         const EnsembleConfig& config) {
    if (config.trials == 0) {
        throw ConfigError("trials must be at least 1");
    }
    const std::uint64_t n = config.trials;
    const unsigned workers =
        static_cast<unsigned>(std::clamp<std::uint64_t>(std::max(config.threads, 1u), 1, n));

    std::vector<TrialRealization> slots(n);
    std::vector<unsigned char> failed(n, 0);
    std::vector<std::string> failure_messages(n);
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](unsigned worker) {
        try {
            for (std::uint64_t k = worker; k < n; k += workers) {
                CounterRng rng(config.master_seed, k);
                try {
                    slots[k] = run_trial(psi, schedule, config.mode, config.eta, config.proposal,
                                         rng, k);
                } catch (const DomainError& e) {
                    failed[k] = 1;
                    failure_messages[k] = e.what();
                }
            }
        } catch (...) {
            errors[worker] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EnsembleRun run;
    run.trials.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        if (failed[k]) {
            if (run.failed_trials == 0) {
                run.first_failure = "trial " + std::to_string(k) + ": " + failure_messages[k];
            }
            ++run.failed_trials;
        } else {
            run.trials.push_back(std::move(slots[k]));
        }
    }
    if (run.trials.empty()) {
        throw EnsembleError("all " + std::to_string(n) + " trials failed; first failure: " +
                            run.first_failure);
    }
    run.summary = summarize(run.trials, schedule.xi(), run.failed_trials, config.bins,
                            y_lattice(schedule, config.eta.kind, config.mode));
    return run;
}

std::vector<TrialRealization> resample_final_states(std::span<const TrialRealization> trials,
                                                    std::size_t count, CounterRng& rng) {
    if (trials.empty()) {
        throw EnsembleError("cannot resample an empty trial set");
    }
    const std::vector<double> weights = relative_rate_weights(trials);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<TrialRealization> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(trials[pick(rng)]);
    return out;
}

}  // namespace bifurcation::ensemble
