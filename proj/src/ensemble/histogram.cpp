#include "bifurcation/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bifurcation/error.hpp"

namespace bifurcation::ensemble {

std::size_t HistogramSpec::index(double y) const {
    if (y == hi) return bins - 1;
    return static_cast<std::size_t>(std::floor((y - lo) / width()));
}

std::optional<YLattice> y_lattice(const StepSchedule& schedule, EtaKind kind,
                                  EvolutionMode mode) {
    if (kind != EtaKind::rademacher || !schedule.is_uniform() || schedule.xi() <= 0.0) {
        return std::nullopt;
    }
    const double kappa = std::sqrt(schedule.kappa_sq().front());
    // Y = (#up - #down) * step / (2 Xi) for a per-step log-ratio `step`.
    const double step = mode == EvolutionMode::product
                            ? std::log1p(kappa) - std::log1p(-kappa)
                            : 2.0 * kappa;
    const double spacing = step / schedule.xi();
    const double origin = schedule.size() % 2 == 0 ? 0.0 : 0.5 * spacing;
    return YLattice{origin, spacing};
}

HistogramSpec covering_spec(std::span<const TrialRealization> trials, std::size_t target_bins,
                            std::optional<YLattice> lattice) {
    if (trials.empty()) {
        throw ConfigError("cannot choose histogram bins without trials");
    }
    if (target_bins == 0) {
        throw ConfigError("histogram needs at least one bin");
    }
    const auto [min_it, max_it] = std::minmax_element(
        trials.begin(), trials.end(),
        [](const TrialRealization& a, const TrialRealization& b) { return a.y < b.y; });
    const double y_min = min_it->y;
    const double y_max = max_it->y;

    if (lattice && lattice->spacing > 0.0) {
        const double spacing = lattice->spacing;
        auto multiple = static_cast<long>(
            std::llround((y_max - y_min) / static_cast<double>(target_bins) / spacing));
        multiple = std::max(1L, multiple);
        if (multiple % 2 == 0) ++multiple;
        const double width = static_cast<double>(multiple) * spacing;
        const double j_lo = std::round((y_min - lattice->origin) / width);
        const double j_hi = std::round((y_max - lattice->origin) / width);
        return {lattice->origin + (j_lo - 0.5) * width, lattice->origin + (j_hi + 0.5) * width,
                static_cast<std::size_t>(j_hi - j_lo) + 1};
    }
    if (y_min == y_max) {
        return {y_min - 0.5, y_max + 0.5, 1};
    }
    return {y_min, y_max, target_bins};
}

WeightedHistogram weighted_histogram(std::span<const TrialRealization> trials,
                                     const HistogramSpec& spec) {
    if (trials.empty()) {
        throw ConfigError("weighted histogram of an empty trial set");
    }
    if (spec.bins == 0 || !(spec.hi > spec.lo)) {
        throw ConfigError("histogram bins must have positive width");
    }
    const std::vector<double> weights = relative_rate_weights(trials);

    WeightedHistogram hist;
    hist.spec = spec;
    std::vector<double> bin_weight(spec.bins, 0.0);
    std::vector<double> bin_weight_sq(spec.bins, 0.0);
    double total = 0.0;
    double total_sq = 0.0;
    for (std::size_t j = 0; j < trials.size(); ++j) {
        const double y = trials[j].y;
        if (!(y >= spec.lo && y <= spec.hi)) {
            std::ostringstream msg;
            msg << "trial " << trials[j].trial_id << " has Y = " << y
                << " outside the histogram range [" << spec.lo << ", " << spec.hi << "]";
            throw ConfigError(msg.str());
        }
        const std::size_t i = spec.index(y);
        bin_weight[i] += weights[j];
        bin_weight_sq[i] += weights[j] * weights[j];
        total += weights[j];
        total_sq += weights[j] * weights[j];
    }
    if (!(total > 0.0)) {
        throw EnsembleError("total rate weight is zero");
    }
    hist.total_weight = total;
    hist.density.resize(spec.bins);
    hist.std_error.resize(spec.bins);
    const double width = spec.width();
    for (std::size_t i = 0; i < spec.bins; ++i) {
        const double p = bin_weight[i] / total;
        // Delta-method variance of a self-normalized proportion.
        const double var = ((1.0 - p) * (1.0 - p) * bin_weight_sq[i] +
                            p * p * (total_sq - bin_weight_sq[i])) /
                           (total * total);
        hist.density[i] = p / width;
        hist.std_error[i] = std::sqrt(std::max(var, 0.0)) / width;
    }
    return hist;
}

std::string_view ModeAnalysis::modality() const {
    switch (modes.size()) {
        case 0: return "none";
        case 1: return "unimodal";
        case 2: return "bimodal";
        default: return "multimodal";
    }
}

ModeAnalysis find_modes(const WeightedHistogram& histogram, double significance) {
    const auto& h = histogram.density;
    const auto& se = histogram.std_error;
    const std::size_t n = h.size();
    ModeAnalysis out;
    if (n == 0) return out;

    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < n; ++i) {
        const bool above_left = i == 0 || h[i] > h[i - 1];
        // First bin of a plateau represents it.
        std::size_t j = i;
        while (j + 1 < n && h[j + 1] == h[i]) ++j;
        const bool above_right = j + 1 == n || h[i] > h[j + 1];
        if (above_left && above_right && h[i] > 0.0) {
            // Col on each side: lowest bin before reaching higher ground. An
            // equal-height bin counts as higher on the left only, so of two
            // equal peaks the leftmost keeps the full prominence.
            std::size_t left_col = i;
            for (std::size_t k = i; k-- > 0 && h[k] < h[i];) {
                if (h[k] < h[left_col]) left_col = k;
            }
            std::size_t right_col = j;
            for (std::size_t k = j + 1; k < n && h[k] <= h[i]; ++k) {
                if (h[k] < h[right_col]) right_col = k;
            }
            const std::size_t col = h[left_col] > h[right_col] ? left_col : right_col;
            const double prominence = h[i] - h[col];
            const double noise = std::hypot(se[i], se[col]);
            if (prominence > 0.0 && prominence > significance * noise) {
                peaks.push_back(i);
                double location = histogram.spec.center(i);
                // Vertex of the parabola through the peak bin and its neighbours.
                if (i == j && i > 0 && i + 1 < n) {
                    const double curvature = h[i - 1] - 2.0 * h[i] + h[i + 1];
                    if (curvature < 0.0) {
                        const double offset =
                            std::clamp(0.5 * (h[i - 1] - h[i + 1]) / curvature, -0.5, 0.5);
                        location += offset * histogram.spec.width();
                    }
                }
                out.modes.push_back({i, location, h[i], prominence});
            }
        }
        i = j;
    }

    if (peaks.empty()) return out;
    // Split the mass at the valley between consecutive modes.
    std::vector<double> split_points;  // bin index of each valley
    for (std::size_t m = 0; m + 1 < peaks.size(); ++m) {
        std::size_t valley = peaks[m];
        for (std::size_t k = peaks[m]; k <= peaks[m + 1]; ++k) {
            if (h[k] < h[valley]) valley = k;
        }
        split_points.push_back(static_cast<double>(valley));
    }
    out.masses.assign(peaks.size(), 0.0);
    std::size_t mode = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mass = histogram.mass(i);
        if (mode < split_points.size() && static_cast<double>(i) == split_points[mode]) {
            out.masses[mode] += 0.5 * mass;
            out.masses[mode + 1] += 0.5 * mass;
            ++mode;
            continue;
        }
        out.masses[mode] += mass;
    }
    return out;
}

}  // namespace bifurcation::ensemble
