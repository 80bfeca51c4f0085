#include "bifurcation/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bifurcation/error.hpp"

namespace bifurcation {

namespace {

// Neumaier summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace

StepSchedule::StepSchedule(std::vector<double> kappa_sq, std::vector<double> gains,
                           double kappa_sq_cap)
    : kappa_sq_(std::move(kappa_sq)), gains_(std::move(gains)), cap_(kappa_sq_cap) {
    if (kappa_sq_.empty()) {
        throw ConfigError("step schedule is empty");
    }
    if (gains_.size() != kappa_sq_.size()) {
        std::ostringstream msg;
        msg << "step schedule has " << kappa_sq_.size() << " variances but " << gains_.size()
            << " gains";
        throw ConfigError(msg.str());
    }
    if (!(cap_ > 0.0 && cap_ < 1.0)) {
        throw ConfigError("kappa_sq cap must lie in (0, 1)");
    }
    CompensatedSum sum;
    prefix_xi_.reserve(kappa_sq_.size());
    for (std::size_t n = 0; n < kappa_sq_.size(); ++n) {
        const double k2 = kappa_sq_[n];
        if (!(k2 >= 0.0 && k2 <= cap_)) {
            std::ostringstream msg;
            msg << "kappa_sq[" << n << "] = " << k2 << " is outside [0, " << cap_ << "]";
            throw ConfigError(msg.str());
        }
        const double gn = gains_[n];
        if (!(gn > 0.0) || !std::isfinite(gn)) {
            std::ostringstream msg;
            msg << "g[" << n << "] = " << gn << " must be positive and finite";
            throw ConfigError(msg.str());
        }
        sum.add(k2);
        prefix_xi_.push_back(sum.value());
        g_ *= gn;
        log_g_ += std::log(gn);
    }
    xi_ = sum.value();
}

StepSchedule StepSchedule::uniform(double xi, std::size_t n_steps, double kappa_sq_cap) {
    if (n_steps == 0) {
        throw ConfigError("n_steps must be at least 1");
    }
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
        throw ConfigError("xi must be nonnegative and finite");
    }
    const double k2 = xi / static_cast<double>(n_steps);
    return StepSchedule(std::vector<double>(n_steps, k2), std::vector<double>(n_steps, 1.0),
                        kappa_sq_cap);
}

double StepSchedule::kappa_quartic_sum() const {
    double sum = 0.0;
    for (double k2 : kappa_sq_) sum += k2 * k2;
    return sum;
}

bool StepSchedule::is_uniform() const {
    return std::all_of(kappa_sq_.begin(), kappa_sq_.end(),
                       [&](double k2) { return k2 == kappa_sq_.front(); });
}

double xi_total(std::span<const double> kappa_sq) {
    if (kappa_sq.empty()) {
        throw ConfigError("step schedule is empty");
    }
    CompensatedSum sum;
    for (double k2 : kappa_sq) sum.add(k2);
    return sum.value();
}

double xi_total(const StepSchedule& schedule) { return schedule.xi(); }

}  // namespace bifurcation
