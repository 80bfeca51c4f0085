#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bifurcation {

/// Per-step variances kappa_n^2 and gains g_n of the apparatus subsystems.
///
/// Every kappa_n^2 lies in [0, cap]; the small-step expansion the model is
/// built on only holds for kappa_n^2 << 1. The total variance xi() is the
/// compensated sum of the entries.
class StepSchedule {
public:
    static constexpr double kDefaultKappaSqCap = 0.1;

    StepSchedule(std::vector<double> kappa_sq, std::vector<double> gains,
                 double kappa_sq_cap = kDefaultKappaSqCap);

    /// kappa_n^2 = xi / n_steps, g_n = 1.
    static StepSchedule uniform(double xi, std::size_t n_steps,
                                double kappa_sq_cap = kDefaultKappaSqCap);

    std::size_t size() const { return kappa_sq_.size(); }
    std::span<const double> kappa_sq() const { return kappa_sq_; }
    std::span<const double> gains() const { return gains_; }
    double kappa_sq_cap() const { return cap_; }

    double xi() const { return xi_; }
    /// Total variance of the first n + 1 steps.
    std::span<const double> prefix_xi() const { return prefix_xi_; }
    /// Product of all gains.
    double g() const { return g_; }
    double log_g() const { return log_g_; }
    /// Sum of kappa_n^4, the scale of the neglected higher-order terms.
    double kappa_quartic_sum() const;
    /// True when every step has the same variance.
    bool is_uniform() const;

private:
    std::vector<double> kappa_sq_;
    std::vector<double> gains_;
    std::vector<double> prefix_xi_;
    double cap_;
    double xi_ = 0.0;
    double g_ = 1.0;
    double log_g_ = 0.0;
};

/// Total step variance Xi; throws ConfigError for an empty list.
double xi_total(std::span<const double> kappa_sq);
double xi_total(const StepSchedule& schedule);

}  // namespace bifurcation
