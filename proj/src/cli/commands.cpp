#include "bifurcation/commands.hpp"

#include <cmath>
#include <ostream>
#include <system_error>

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/ensemble.hpp"
#include "bifurcation/error.hpp"
#include "bifurcation/log_space.hpp"
#include "bifurcation/model.hpp"
#include "bifurcation/perturbation.hpp"

#ifndef BIFURCATION_VERSION
#define BIFURCATION_VERSION "unknown"
#endif

namespace bifurcation::cli {

namespace {

using ensemble::EnsembleSummary;
using ensemble::Estimate;

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

QubitState initial_state(const RunConfig& config) {
    try {
        return QubitState::from_population(config.psi_plus_sq, config.psi_phase);
    } catch (const ConfigError& e) {
        throw UsageError(std::string("psi_plus_sq: ") + e.what());
    }
}

void append_rho(Row& row, const DensityMatrix2& rho) {
    row.emplace_back(rho.pp());
    row.emplace_back(rho.pm().real());
    row.emplace_back(rho.pm().imag());
    row.emplace_back(rho.mm());
}

ensemble::EnsembleConfig ensemble_config(const RunConfig& config) {
    ensemble::EnsembleConfig ec;
    ec.mode = config.mode;
    ec.eta.kind = config.eta_dist;
    ec.proposal = config.proposal;
    ec.trials = config.trials;
    ec.master_seed = config.master_seed;
    ec.threads = config.threads;
    ec.bins = config.bins;
    return ec;
}

double coherence_target(double xi, const QubitState& psi) {
    return std::exp(-0.5 * xi) * std::abs(psi.coherence());
}

void warn(const ensemble::EnsembleRun& run, std::ostream& log) {
    if (run.failed_trials > 0) {
        log << "warning: " << run.failed_trials << " of "
            << run.failed_trials + run.trials.size()
            << " trials left the step domain and were dropped; first: " << run.first_failure
            << "\n";
    }
    if (run.summary.undecided_regime) {
        log << "warning: xi = " << run.summary.xi << " is below " << ensemble::kUndecidedXi
            << "; the two peaks overlap and the channel label is not a definite outcome\n";
    }
}

std::vector<std::filesystem::path> run_closed_form(const RunConfig& config, std::ostream&) {
    const QubitState psi = initial_state(config);
    const HeaderLines header = output_header(config);
    const double xi = config.xi;
    const double log_g = std::log(config.g);

    std::vector<Row> grid;
    std::vector<Row> extended;
    grid.reserve(config.y_points);
    extended.reserve(config.y_points);
    const double step =
        (config.y_max - config.y_min) / static_cast<double>(config.y_points - 1);
    for (std::size_t i = 0; i < config.y_points; ++i) {
        const double y = i + 1 == config.y_points ? config.y_max
                                                  : config.y_min + static_cast<double>(i) * step;
        const AggregateY agg{y, xi};

        Row row{y, q_density(y, xi), Q_density(y, xi, psi)};
        append_rho(row, rho_final(agg, psi));
        grid.push_back(std::move(row));

        const double lw = log_w_hat(agg, psi);
        const double x = 2.0 * log_g + lw;
        const double stay = std::exp(-log_sum_exp({0.0, x}));
        const double scatter = std::exp(x - log_sum_exp({0.0, x}));
        const auto bar = perturbation::rho_bar_3x3(config.g, agg, psi);
        Row ext{y, lw, stay, scatter};
        for (int r = 0; r < 3; ++r) {
            ext.emplace_back(bar(r, r).real());
        }
        for (auto [r, c] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
            ext.emplace_back(bar(r, c).real());
            ext.emplace_back(bar(r, c).imag());
        }
        extended.push_back(std::move(ext));
    }

    const auto dir = config.output;
    ensure_directory(dir);
    std::vector<std::filesystem::path> written;

    written.push_back(dir / "closed_form_grid.csv");
    write_csv(written.back(), header, {"y", "q", "Q", "rho_pp", "rho_pm_re", "rho_pm_im", "rho_mm"},
              grid);

    written.push_back(dir / "closed_form_extended.csv");
    write_csv(written.back(), header,
              {"y", "log_w_hat", "stay", "scatter", "rhobar_00", "rhobar_11", "rhobar_22",
               "rhobar_01_re", "rhobar_01_im", "rhobar_02_re", "rhobar_02_im", "rhobar_12_re",
               "rhobar_12_im"},
              extended);

    const DensityMatrix2 mean = mean_final_rho(xi, psi);
    const DensityMatrix2 peak_plus = rho_peak(+1, xi, psi);
    const DensityMatrix2 peak_minus = rho_peak(-1, xi, psi);
    std::vector<Row> summary;
    auto stat = [&](const char* name, double v) {
        summary.push_back(Row{std::string(name), v, 0.0});
    };
    stat("xi", xi);
    stat("mean_rho_pp", mean.pp());
    stat("mean_rho_pm_re", mean.pm().real());
    stat("mean_rho_pm_im", mean.pm().imag());
    stat("mean_rho_mm", mean.mm());
    stat("mean_rho_pm_abs", std::abs(mean.pm()));
    stat("born_plus", psi.plus_sq());
    stat("born_minus", psi.minus_sq());
    stat("y_mean_unweighted", 0.0);
    stat("y_var_unweighted", xi > 0.0 ? 1.0 / xi : 0.0);
    const double d = psi.plus_sq() - psi.minus_sq();
    stat("y_mean_weighted", d);
    stat("y_var_weighted", 1.0 + (xi > 0.0 ? 1.0 / xi : 0.0) - d * d);
    stat("peak_plus_rho_pp", peak_plus.pp());
    stat("peak_plus_rho_pm_abs", std::abs(peak_plus.pm()));
    stat("peak_minus_rho_mm", peak_minus.mm());
    stat("peak_minus_rho_pm_abs", std::abs(peak_minus.pm()));
    written.push_back(dir / "closed_form_summary.csv");
    write_csv(written.back(), header, {"statistic", "value", "std_error"}, summary);
    return written;
}

std::vector<std::filesystem::path> run_trajectory(const RunConfig& config, std::ostream&) {
    const QubitState psi = initial_state(config);
    const StepSchedule schedule = config.schedule();
    CounterRng rng(config.master_seed, config.trial_id);
    const auto sampled = ensemble::sample_configuration(psi, schedule, {config.eta_dist},
                                                        config.proposal, rng);
    const auto kappa_sq = schedule.kappa_sq();
    const auto gains = schedule.gains();

    std::vector<Row> rows;
    rows.reserve(schedule.size() + 1);
    LogBilinearForms forms;
    double xi = 0.0;
    double g = 1.0;
    double log_g = 0.0;
    double eta_sum = 0.0;
    for (std::size_t n = 0; n <= schedule.size(); ++n) {
        double eta = 0.0;
        double k2 = 0.0;
        if (n > 0) {
            eta = sampled.etas[n - 1];
            k2 = kappa_sq[n - 1];
            xi = schedule.prefix_xi()[n - 1];
            g *= gains[n - 1];
            log_g += std::log(gains[n - 1]);
            eta_sum += eta;
        }
        AggregateY agg;
        LogBilinearForms shown;
        double lw = 0.0;
        if (config.mode == ensemble::EvolutionMode::product) {
            if (n > 0) forms = step_log_bilinears(forms, gains[n - 1], eta, k2);
            agg = aggregate_from_bilinears(forms, xi);
            lw = log_w_hat_from_bilinears(forms, psi, log_g);
            shown = forms;
        } else {
            agg = xi == 0.0 ? AggregateY{0.0, 0.0} : AggregateY{eta_sum / xi, xi};
            lw = log_w_hat(agg, psi);
            shown = log_bilinears_from_y(agg, g);
        }
        Row row{static_cast<std::uint64_t>(n), k2, eta, agg.y, shown.plus_sq, shown.minus_sq,
                shown.cross, std::exp(shown.plus_sq), std::exp(shown.minus_sq),
                std::exp(shown.cross), lw, std::exp(lw)};
        append_rho(row, rho_final(agg, psi));
        rows.push_back(std::move(row));
    }

    ensure_directory(config.output);
    HeaderLines header = output_header(config);
    header.emplace_back("log_likelihood_ratio", format_real(sampled.log_likelihood_ratio));
    const auto path = config.output / "trajectory.csv";
    write_csv(path, header,
              {"step", "kappa_sq", "eta", "y", "log_b_plus_sq", "log_b_minus_sq", "log_b_cross",
               "b_plus_sq", "b_minus_sq", "b_cross", "log_w_hat", "w_hat", "rho_pp", "rho_pm_re",
               "rho_pm_im", "rho_mm"},
              rows);
    return {path};
}

void add_estimate(std::vector<Row>& rows, const char* name, const Estimate& e) {
    rows.push_back(Row{std::string(name), e.value, e.std_error});
}

std::vector<Row> summary_rows(const EnsembleSummary& s, const QubitState& psi) {
    std::vector<Row> rows;
    auto exact = [&](const char* name, double v) {
        rows.push_back(Row{std::string(name), v, 0.0});
    };
    exact("trials", static_cast<double>(s.trials));
    exact("failed_trials", static_cast<double>(s.failed_trials));
    exact("xi", s.xi);
    add_estimate(rows, "mean_w", s.mean_w);
    add_estimate(rows, "mean_b_plus_sq", s.mean_b_plus_sq);
    add_estimate(rows, "mean_b_minus_sq", s.mean_b_minus_sq);
    add_estimate(rows, "y_mean_unweighted", s.y_mean_unweighted);
    add_estimate(rows, "y_var_unweighted", s.y_var_unweighted);
    add_estimate(rows, "y_mean_weighted", s.y_mean_weighted);
    add_estimate(rows, "y_var_weighted", s.y_var_weighted);
    add_estimate(rows, "born_plus_weighted", s.born_plus_weighted);
    add_estimate(rows, "born_minus_weighted", s.born_minus_weighted);
    add_estimate(rows, "rho_pp", s.rho_pp);
    add_estimate(rows, "rho_pm_re", s.rho_pm_re);
    add_estimate(rows, "rho_pm_im", s.rho_pm_im);
    add_estimate(rows, "rho_mm", s.rho_mm);
    add_estimate(rows, "rho_pm_abs", s.rho_pm_abs);
    exact("rho_pm_abs_closed_form", coherence_target(s.xi, psi));
    exact("effective_sample_size", s.effective_sample_size);
    exact("undecided_regime", s.undecided_regime ? 1.0 : 0.0);
    if (s.has_histogram) {
        exact("n_modes", static_cast<double>(s.modes.modes.size()));
        for (std::size_t i = 0; i < s.modes.modes.size(); ++i) {
            const std::string k = std::to_string(i);
            rows.push_back(Row{"mode_" + k + "_location", s.modes.modes[i].location,
                               s.histogram.spec.width() / 2.0});
            rows.push_back(Row{"mode_" + k + "_mass", s.modes.masses[i], 0.0});
        }
    }
    return rows;
}

std::vector<Row> histogram_rows(const EnsembleSummary& s, const QubitState& psi,
                                std::optional<double> xi_column) {
    std::vector<Row> rows;
    const auto& h = s.histogram;
    for (std::size_t i = 0; i < h.spec.bins; ++i) {
        Row row;
        if (xi_column) row.emplace_back(*xi_column);
        const double lo = h.spec.lo + static_cast<double>(i) * h.spec.width();
        row.emplace_back(static_cast<std::uint64_t>(i));
        row.emplace_back(lo);
        row.emplace_back(lo + h.spec.width());
        row.emplace_back(h.spec.center(i));
        row.emplace_back(h.density[i]);
        row.emplace_back(h.std_error[i]);
        row.emplace_back(s.xi > 0.0 ? Q_density(h.spec.center(i), s.xi, psi) : 0.0);
        rows.push_back(std::move(row));
    }
    return rows;
}

const std::vector<std::string> kHistogramColumns = {
    "bin", "y_lo", "y_hi", "y_center", "density", "std_error", "Q_closed_form"};

std::vector<std::filesystem::path> run_ensemble_command(const RunConfig& config,
                                                        std::ostream& log) {
    const QubitState psi = initial_state(config);
    const StepSchedule schedule = config.schedule();
    const auto run = ensemble::run_ensemble(psi, schedule, ensemble_config(config));
    warn(run, log);

    std::vector<Row> trials;
    trials.reserve(run.trials.size());
    for (const auto& t : run.trials) {
        Row row{t.trial_id, t.y, t.w_hat};
        append_rho(row, t.rho);
        row.emplace_back(std::string(ensemble::to_string(t.channel)));
        row.emplace_back(t.likelihood_ratio);
        trials.push_back(std::move(row));
    }

    ensure_directory(config.output);
    const HeaderLines header = output_header(config);
    std::vector<std::filesystem::path> written;
    written.push_back(config.output / "trials.csv");
    write_csv(written.back(), header,
              {"trial_id", "y", "w_hat", "rho_pp", "rho_pm_re", "rho_pm_im", "rho_mm", "channel",
               "likelihood_ratio"},
              trials);
    written.push_back(config.output / "summary.csv");
    write_csv(written.back(), header, {"statistic", "value", "std_error"},
              summary_rows(run.summary, psi));
    written.push_back(config.output / "histogram.csv");
    write_csv(written.back(), header, kHistogramColumns,
              histogram_rows(run.summary, psi, std::nullopt));
    return written;
}

std::vector<std::filesystem::path> run_sweep(const RunConfig& config, std::ostream& log) {
    const QubitState psi = initial_state(config);
    const double step_variance = config.xi / static_cast<double>(config.n_steps);

    std::vector<Row> rows;
    std::vector<Row> histograms;
    for (double xi : config.sweep_xi) {
        auto n = static_cast<std::size_t>(std::max(1.0, std::round(xi / step_variance)));
        if (xi / static_cast<double>(n) > config.kappa_sq_cap) {
            n = static_cast<std::size_t>(std::ceil(xi / config.kappa_sq_cap));
        }
        const StepSchedule schedule = StepSchedule::uniform(xi, n, config.kappa_sq_cap);
        const auto run = ensemble::run_ensemble(psi, schedule, ensemble_config(config));
        warn(run, log);
        const EnsembleSummary& s = run.summary;

        std::string locations;
        std::string masses;
        for (std::size_t i = 0; i < s.modes.modes.size(); ++i) {
            if (i) {
                locations += ';';
                masses += ';';
            }
            locations += format_real(s.modes.modes[i].location);
            masses += format_real(s.modes.masses[i]);
        }
        rows.push_back(Row{xi,
                           static_cast<std::uint64_t>(n),
                           static_cast<std::uint64_t>(s.trials),
                           static_cast<std::uint64_t>(s.failed_trials),
                           s.mean_w.value,
                           s.mean_w.std_error,
                           s.born_plus_weighted.value,
                           s.born_plus_weighted.std_error,
                           s.y_mean_weighted.value,
                           s.y_mean_weighted.std_error,
                           s.y_var_weighted.value,
                           s.y_var_weighted.std_error,
                           s.rho_pm_abs.value,
                           s.rho_pm_abs.std_error,
                           coherence_target(xi, psi),
                           s.effective_sample_size,
                           static_cast<std::uint64_t>(s.undecided_regime ? 1 : 0),
                           static_cast<std::uint64_t>(s.modes.modes.size()),
                           std::string(s.modes.modality()),
                           locations,
                           masses});
        auto h = histogram_rows(s, psi, xi);
        histograms.insert(histograms.end(), std::make_move_iterator(h.begin()),
                          std::make_move_iterator(h.end()));
    }

    ensure_directory(config.output);
    const HeaderLines header = output_header(config);
    std::vector<std::filesystem::path> written;
    written.push_back(config.output / "sweep.csv");
    write_csv(written.back(), header,
              {"xi", "n_steps", "trials", "failed_trials", "mean_w", "mean_w_se",
               "born_plus_weighted", "born_plus_weighted_se", "y_mean_weighted",
               "y_mean_weighted_se", "y_var_weighted", "y_var_weighted_se", "rho_pm_abs",
               "rho_pm_abs_se", "rho_pm_abs_closed_form", "effective_sample_size",
               "undecided_regime", "n_modes", "modality", "mode_locations", "mode_masses"},
              rows);
    std::vector<std::string> columns = {"xi"};
    columns.insert(columns.end(), kHistogramColumns.begin(), kHistogramColumns.end());
    written.push_back(config.output / "sweep_histograms.csv");
    write_csv(written.back(), header, columns, histograms);
    return written;
}

}  // namespace

std::string tool_version() { return std::string("bifurcation ") + BIFURCATION_VERSION; }

HeaderLines output_header(const RunConfig& config) {
    HeaderLines header{{"tool", tool_version()}};
    for (auto& kv : config.echo()) header.push_back(std::move(kv));
    return header;
}

std::vector<std::filesystem::path> run_command(const RunConfig& config, std::ostream& log) {
    switch (config.command) {
        case Command::closed_form: return run_closed_form(config, log);
        case Command::trajectory: return run_trajectory(config, log);
        case Command::ensemble: return run_ensemble_command(config, log);
        case Command::sweep: return run_sweep(config, log);
    }
    throw UsageError("command: unknown");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        const auto config = parse_config(argc, argv);
        if (!config) return kExitSuccess;
        for (const auto& path : run_command(*config, err)) out << path.string() << "\n";
        return kExitSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace bifurcation::cli
