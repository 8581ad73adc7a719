#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "robex/config.hpp"
#include "robex/csv.hpp"
#include "robex/observability.hpp"
#include "robex/observer.hpp"
#include "robex/reconstruction.hpp"
#include "robex/spectral.hpp"

namespace {

using robex::csv::format;

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    bool trials_set = false;
    bool quiet = false;
};

void attach_common(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--config", opt.config_path, "scenario file (JSON)")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "override the scenario seed")
        ->each([&opt](const std::string&) { opt.seed_set = true; });
    cmd->add_option("--trials", opt.trials, "override the trial count")
        ->each([&opt](const std::string&) { opt.trials_set = true; });
    cmd->add_flag("--quiet", opt.quiet, "do not echo the report to stdout");
}

/// Collects report lines; writes them once at the end so every run produces a
/// report even when an assertion fails.
struct Report {
    std::vector<std::string> lines;
    bool failed = false;

    void add(const std::string& line) { lines.push_back(line); }
    void value(const std::string& key, const std::string& v) { lines.push_back(key + " = " + v); }
    void value(const std::string& key, double v) { value(key, format(v)); }
    void check(bool ok, const std::string& what) {
        lines.push_back(std::string(ok ? "pass" : "FAIL") + ": " + what);
        if (!ok) failed = true;
    }

    int finish(const RunOptions& opt) const {
        std::filesystem::create_directories(opt.out_dir);
        const std::string path = (std::filesystem::path(opt.out_dir) / "report.txt").string();
        std::ofstream out(path, std::ios::binary);
        for (const std::string& line : lines) out << line << '\n';
        if (!opt.quiet) {
            for (const std::string& line : lines) std::cout << line << '\n';
        }
        return failed ? 1 : 0;
    }
};

struct Scenario {
    robex::ScenarioConfig config;
    robex::BasisPtr basis;
    std::uint64_t seed;
    int trials;
};

Scenario prepare(const RunOptions& opt) {
    Scenario s{robex::load_config(opt.config_path), nullptr, 0, 0};
    s.basis = robex::build_basis(s.config.domain, s.config.modes_per_axis);
    s.seed = opt.seed_set ? opt.seed : s.config.reconstruction.seed;
    s.trials = opt.trials_set ? opt.trials : s.config.reconstruction.trials;
    std::filesystem::create_directories(opt.out_dir);
    return s;
}

std::string out_path(const RunOptions& opt, const char* name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
}

robex::ObservabilityProblem observation_problem(const Scenario& s) {
    robex::ObservabilityProblem problem;
    problem.basis = s.basis;
    problem.sensors = s.config.sensors;
    problem.region = s.config.regions.front();
    problem.horizon = s.config.horizon;
    problem.time_steps = s.config.time_steps;
    return problem;
}

int run_simulate(const RunOptions& opt) {
    Scenario s = prepare(opt);
    Report report;
    report.add("pipeline: simulate");
    report.value("modes", format(s.basis->mode_count()));
    report.value("seed", format(s.seed));
    report.value("slowest_nonzero_rate",
                 s.basis->mode_count() > 1 ? s.basis->eigenvalues[1] : 0.0);

    const robex::StateField z0 = robex::random_state(s.basis, s.seed);
    const robex::RegionPtr whole = robex::full_boundary(s.config.domain);
    const robex::RegionPtr region = s.config.regions.front();

    std::vector<std::vector<std::string>> rows;
    double previous = 0.0;
    bool dissipative = true;
    for (int j = 0; j <= s.config.time_steps; ++j) {
        const double t = s.config.horizon * j / s.config.time_steps;
        const robex::StateField z = robex::semigroup_apply(z0, t);
        const double norm = robex::l2_norm(z);
        if (j > 0 && norm > previous + 1e-12) dissipative = false;
        previous = norm;
        rows.push_back({format(t), format(norm), format(robex::h1_norm(z)),
                        format(robex::boundary_norm(robex::trace_to_boundary(z, whole))),
                        format(robex::boundary_norm(robex::trace_to_boundary(z, region)))});
    }
    robex::csv::write_file(out_path(opt, "decay.csv"),
                           {"time", "state_norm", "smooth_norm", "boundary_norm", "region_norm"},
                           rows);

    report.value("initial_norm", robex::l2_norm(z0));
    report.value("final_norm", previous);
    report.check(dissipative, "state norm is non-increasing in time");
    return report.finish(opt);
}

int run_observability(const RunOptions& opt) {
    Scenario s = prepare(opt);
    Report report;
    report.add("pipeline: observability");
    report.value("modes", format(s.basis->mode_count()));
    report.value("sensors", format(static_cast<int>(s.config.sensors.size())));

    const robex::GramianReport gram =
        robex::boundary_gramian(observation_problem(s), s.config.observability_threshold);

    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index i = 0; i < gram.gramian_eigenvalues.size(); ++i) {
        rows.push_back({format(static_cast<int>(i)), format(gram.gramian_eigenvalues[i])});
    }
    robex::csv::write_file(out_path(opt, "gramian_spectrum.csv"), {"index", "eigenvalue"}, rows);

    report.value("threshold", gram.threshold);
    report.value("sigma_min", gram.sigma_min());
    for (Eigen::Index i = 0; i < gram.recoverability_singular_values.size(); ++i) {
        report.value("recoverability_sv[" + std::to_string(i) + "]",
                     gram.recoverability_singular_values[i]);
    }
    report.value("gamma_observable", gram.observable ? "yes" : "no");
    return report.finish(opt);
}

int run_observer(const RunOptions& opt) {
    Scenario s = prepare(opt);
    Report report;
    report.add("pipeline: observer");
    report.value("seed", format(s.seed));
    report.value("sigma_target", s.config.observer.sigma_target);

    const robex::ObserverGain gain = robex::design_gain(
        *s.basis, s.config.sensors, s.config.observer.method, s.config.observer.sigma_target);
    const robex::RegionPtr region = s.config.regions.front();
    const robex::ObserverSystem sys =
        robex::make_observer(s.basis, s.config.sensors, gain, {}, region);

    const robex::DetectabilityReport det =
        robex::is_gamma_detectable(*s.basis, s.config.sensors, gain.columns, *region);
    report.value("spectral_abscissa", det.spectral_abscissa);
    report.value("decay_rate", det.decay_rate);
    report.check(det.detectable, "corrected generator is exponentially stable");

    const double horizon = s.config.observer.horizon;
    const int steps = s.config.observer.time_steps;
    const robex::StateField z0 = robex::random_state(s.basis, s.seed);
    const robex::ControlSamples no_control;
    const robex::StateTrajectory plant =
        robex::simulate_system(z0, {}, no_control, horizon, steps);
    const robex::OutputTrajectory y =
        robex::sample_outputs(plant.states, horizon, s.config.sensors, *s.basis);

    const robex::StateTrajectory estimate = robex::simulate_observer(sys, y, no_control);
    const robex::ErrorSamples err = robex::error_trajectory(sys, plant, estimate);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < err.times.size(); ++i) {
        rows.push_back({format(err.times[i]), format(err.norms[i])});
    }
    robex::csv::write_file(out_path(opt, "decay.csv"), {"time", "region_error"}, rows);

    const robex::DecayFit fit = robex::fit_exponential_decay(err);
    report.value("fit_prefactor", fit.prefactor);
    report.value("fit_rate", fit.rate);
    report.value("fit_residual", fit.residual);
    const double bound = fit.prefactor * std::exp(-fit.rate * horizon) * 1.1;
    report.value("final_error", err.norms.back());
    report.value("final_error_bound", bound);
    report.check(err.norms.back() <= bound, "final error within the fitted envelope");

    // Matched start: the estimation error begins at zero and must stay there.
    const robex::StateTrajectory matched = robex::simulate_observer(sys, y, no_control, z0);
    const robex::ErrorSamples matched_err = robex::error_trajectory(sys, plant, matched);
    double worst = 0.0;
    for (double v : matched_err.norms) worst = std::max(worst, v);
    report.value("matched_start_max_error", worst);
    report.check(worst <= 1e-10, "matched start keeps the region error at zero");

    const robex::ObserverIdentityReport ids = robex::verify_observer_identities(sys);
    report.value("identity_output_mix", ids.output_mix_residual);
    report.value("identity_state_plus", ids.state_identity_plus);
    report.value("identity_state_minus", ids.state_identity_minus);
    report.value("identity_input_map", ids.input_map_residual);
    report.check(ids.state_identity_minus <= 1e-12, "generator matches A - HC");
    return report.finish(opt);
}

int run_reconstruct(const RunOptions& opt) {
    Scenario s = prepare(opt);
    Report report;
    report.add("pipeline: reconstruct");
    report.value("seed", format(s.seed));
    report.value("epsilon", s.config.reconstruction.epsilon);

    const robex::StateField z0 = robex::random_state(s.basis, s.seed);
    robex::ReconstructionProblem problem;
    problem.observability = observation_problem(s);
    problem.measured = robex::forward_K(problem.observability, z0);
    problem.regularization = s.config.reconstruction.epsilon;
    problem.regions = s.config.regions;

    const robex::ErrorReport result = robex::evaluate_reconstruction(problem, z0);
    report.value("output_misfit", result.residual);
    report.value("region_error", result.minimizer_value);
    report.value("domain_error", result.domain_error);
    bool chain = true;
    for (std::size_t i = 0; i < result.per_region_errors.size(); ++i) {
        report.value("nest_error[" + std::to_string(i) + "]", result.per_region_errors[i].value);
        if (i > 0 && result.per_region_errors[i - 1].value >
                         result.per_region_errors[i].value + 1e-12) {
            chain = false;
        }
    }
    report.check(chain, "region errors are non-decreasing along the nest");

    if (!s.config.sweep_locations.empty()) {
        const robex::SweepReport sweep =
            robex::sensor_sweep(problem, z0, s.config.sweep_locations);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < sweep.entries.size(); ++i) {
            const robex::SweepEntry& e = sweep.entries[i];
            rows.push_back({format(static_cast<int>(i)), format(e.location[0]),
                            format(e.location[1]), format(e.error), format(e.residual)});
        }
        robex::csv::write_file(out_path(opt, "sweep.csv"),
                               {"index", "x", "y", "region_error", "output_misfit"}, rows);
        for (std::size_t i = 0; i < sweep.adjacent_differences.size(); ++i) {
            report.value("sweep_adjacent_difference[" + std::to_string(i) + "]",
                         sweep.adjacent_differences[i]);
        }
    }
    return report.finish(opt);
}

int run_monotonicity(const RunOptions& opt) {
    Scenario s = prepare(opt);
    Report report;
    report.add("pipeline: monotonicity");
    report.value("seed", format(s.seed));
    report.value("trials", format(s.trials));
    report.value("regions", format(static_cast<int>(s.config.regions.size())));

    robex::ReconstructionProblem problem;
    problem.observability = observation_problem(s);
    problem.measured.horizon = s.config.horizon;
    problem.measured.samples = Eigen::MatrixXd::Zero(
        s.config.time_steps + 1, static_cast<Eigen::Index>(s.config.sensors.size()));
    problem.regularization = s.config.reconstruction.epsilon;
    problem.regions = s.config.regions;

    const robex::MonotonicityReport mono =
        robex::monotonicity_experiment(problem, s.trials, s.seed);

    std::vector<std::string> header{"trial", "trial_seed"};
    for (std::size_t r = 0; r < s.config.regions.size(); ++r) {
        header.push_back("region_error_" + std::to_string(r));
    }
    header.insert(header.end(), {"domain_error", "output_misfit", "chain_ok", "comparison_ok"});
    std::vector<std::vector<std::string>> rows;
    for (const robex::MonotonicityTrial& trial : mono.trials) {
        std::vector<std::string> row{format(trial.trial), format(trial.seed)};
        for (double er : trial.region_errors) row.push_back(format(er));
        row.push_back(format(trial.domain_error));
        row.push_back(format(trial.residual));
        row.push_back(trial.chain_ok ? "1" : "0");
        row.push_back(trial.comparison_ok ? "1" : "0");
        rows.push_back(std::move(row));
    }
    robex::csv::write_file(out_path(opt, "monotonicity.csv"), header, rows);

    report.value("chain_failures", format(mono.chain_failures));
    report.value("comparison_failures", format(mono.comparison_failures));
    report.check(mono.chain_failures == 0, "nested region errors are ordered in every trial");
    report.check(mono.comparison_failures == 0,
                 "region errors stay below the domain error in every trial");
    return report.finish(opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-region observation experiments for diffusion systems"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* simulate = app.add_subcommand("simulate", "autonomous decay of a random state");
    CLI::App* observability =
        app.add_subcommand("observability", "Gramian spectrum and the region verdict");
    CLI::App* observer = app.add_subcommand("observer", "gain design and error decay");
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "initial-state recovery and its region errors");
    CLI::App* monotonicity =
        app.add_subcommand("monotonicity", "seeded nested-region error comparison");
    for (CLI::App* cmd : {simulate, observability, observer, reconstruct, monotonicity}) {
        attach_common(cmd, opt);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(opt);
        if (observability->parsed()) return run_observability(opt);
        if (observer->parsed()) return run_observer(opt);
        if (reconstruct->parsed()) return run_reconstruct(opt);
        return run_monotonicity(opt);
    } catch (const robex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
