#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bifurcation/eta.hpp"
#include "bifurcation/schedule.hpp"
#include "bifurcation/trial.hpp"

namespace bifurcation::ensemble {

/// Equal-width bins over [lo, hi]; a value equal to hi falls in the last bin.
struct HistogramSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t bins = 1;

    double width() const { return (hi - lo) / static_cast<double>(bins); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
    std::size_t index(double y) const;
};

/// Support of Y when it is confined to an arithmetic lattice
/// origin + k * spacing (Rademacher steps of equal size).
struct YLattice {
    double origin = 0.0;
    double spacing = 0.0;
};

std::optional<YLattice> y_lattice(const StepSchedule& schedule, EtaKind kind, EvolutionMode mode);

/// Bins covering the observed Y range, about target_bins of them. With a
/// lattice, the width is an odd multiple of the spacing and every edge
/// falls midway between lattice points, so each bin holds the same number
/// of support points.
HistogramSpec covering_spec(std::span<const TrialRealization> trials, std::size_t target_bins,
                            std::optional<YLattice> lattice = std::nullopt);

/// Rate-weighted density estimate of the final-state distribution Q(Y).
struct WeightedHistogram {
    HistogramSpec spec;
    std::vector<double> density;
    std::vector<double> std_error;
    double total_weight = 0.0;

    /// Probability mass of bin i.
    double mass(std::size_t i) const { return density[i] * spec.width(); }
};

/// Throws ConfigError for an empty input or a trial outside the bins.
WeightedHistogram weighted_histogram(std::span<const TrialRealization> trials,
                                     const HistogramSpec& spec);

struct Mode {
    std::size_t bin = 0;
    /// Bin center refined by a three-point parabolic fit.
    double location = 0.0;
    double height = 0.0;
    double prominence = 0.0;
};

struct ModeAnalysis {
    std::vector<Mode> modes;
    /// Mass attributed to each mode; neighbouring modes are split at the
    /// lowest bin between them, whose mass is shared equally.
    std::vector<double> masses;

    std::string_view modality() const;
};

inline constexpr double kDefaultModeSignificance = 4.0;

/// Local maxima whose topographic prominence exceeds `significance`
/// standard errors of the peak-minus-col difference.
ModeAnalysis find_modes(const WeightedHistogram& histogram,
                        double significance = kDefaultModeSignificance);

}  // namespace bifurcation::ensemble
