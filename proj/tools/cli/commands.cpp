#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dcesync/error.hpp"

namespace dcesync::cli {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << text;
    if (!file) throw IoError("failed writing " + path);
}

// Summaries go to stdout unless stdout already carries the CSV.
std::ostream& summary_stream(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return config.out.empty() ? err : out;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const InvalidArgumentError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_run_failure;
    }
}

}  // namespace

int cmd_evolve(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        IntegratorConfig integrator = config.integrator;
        integrator.max_n_max = config.max_n_max;
        const FockTruncation trunc = config.truncation();
        const StateVector initial = prepare_initial(config.theta1, config.theta2, trunc);
        Trajectory traj;
        if (config.cutoff == CutoffMode::converge) {
            traj = converge_cutoff(initial, integrator, config.params,
                                   CutoffPolicy{config.n_max, config.max_n_max, config.cutoff_tol})
                       .trajectory;
        } else {
            traj = evolve(initial, integrator, config.params);
        }
        emit(trajectory_csv(traj), config.out, out);

        std::ostream& s = summary_stream(config, out, err);
        s << "n_max_used = " << traj.n_max_used << '\n';
        s << "final_mean_photon = " << fmt(traj.n.back()) << '\n';
        s << "final_norm_drift = " << fmt(std::abs(traj.norm.back() - 1.0)) << '\n';
        s << "max_norm_drift = " << fmt(traj.max_norm_drift) << '\n';
        if (config.window.t_end() <= traj.times.back() + 1e-9) {
            try {
                s << "pearson = " << fmt(pearson(traj.sz1_series(), traj.sz2_series(), config.window)) << '\n';
            } catch (const UndefinedCorrelationError&) {
                s << "pearson = undefined (zero variance)\n";
            }
        }
        return int{exit_ok};
    });
}

int cmd_sweep(const RunConfig& config, unsigned threads, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        const SweepSpec spec = config.sweep_spec();
        SweepOptions options;
        options.threads = threads;
        if (!config.dump_dir.empty()) options.dump_dir = config.dump_dir;
        const SweepGrid grid = run_sweep(spec, options);
        emit(grid_csv(grid), config.out, out);
        const auto failed = std::count_if(grid.cells.begin(), grid.cells.end(),
                                          [](const SweepCell& c) { return c.status != CellStatus::ok; });
        summary_stream(config, out, err) << "cells = " << grid.cells.size() << ", failed = " << failed << '\n';
        for (const SweepCell& c : grid.cells)
            if (c.status != CellStatus::ok)
                err << "cell axis=" << fmt(c.axis_value) << " alpha0=" << fmt(c.alpha0) << ": " << c.message << '\n';
        return static_cast<std::size_t>(failed) == grid.cells.size() ? int{exit_run_failure} : int{exit_ok};
    });
}

int cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        const double t0 = config.effective_extract_time();
        if (t0 < config.params.tau)
            throw ConfigError("extract_time " + fmt(t0) + " precedes tau; the closed forms need the drive off");
        if (config.params.omega != config.params.omega_q1 || config.params.omega != config.params.omega_q2)
            throw ConfigError("extraction requires omega == omega_q1 == omega_q2");
        IntegratorConfig integrator = config.integrator;
        integrator.t_end = t0;
        integrator.sample_interval = std::min(integrator.sample_interval, t0 > 0.0 ? t0 : integrator.dt);
        integrator.max_n_max = config.max_n_max;
        const FockTruncation trunc = config.truncation();
        const Trajectory traj = evolve(prepare_initial(config.theta1, config.theta2, trunc), integrator, config.params);
        const InteractionAmplitudes amps = amplitudes_in_frame(*traj.final_state, t0, config.params, config.frame);
        const std::vector<BlockCoeffs> coeffs = extract_all(amps, config.params);
        emit(coefficient_csv(coeffs), config.out, out);

        std::ostream& s = summary_stream(config, out, err);
        for (const BlockCoeffs& k : coeffs) {
            const SyncVerdict v = check_sync(k, config.tolerances);
            s << "block " << block_of(k) << ": population " << fmt(block_population(k)) << ", " << to_string(v.mechanism)
              << '\n';
        }
        return int{exit_ok};
    });
}

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        if (config.coefficients.empty()) throw ConfigError("missing required key 'coefficients'");
        std::vector<BlockCoeffs> coeffs;
        try {
            coeffs = read_coefficient_csv(config.coefficients, config.params.g1, config.params.g2);
        } catch (const InvalidArgumentError& e) {
            throw ConfigError(config.coefficients + ": " + e.what());
        } catch (const IoError& e) {
            throw ConfigError(e.what());
        }
        if (coeffs.empty()) throw ConfigError(config.coefficients + ": no coefficients");

        std::vector<SyncVerdict> verdicts;
        std::vector<double> populations;
        for (const BlockCoeffs& k : coeffs) {
            verdicts.push_back(check_sync(k, config.tolerances));
            populations.push_back(block_population(k));
        }
        const double top = *std::max_element(populations.begin(), populations.end());
        bool positive = false;
        std::ostream& s = out;
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            const SyncVerdict& v = verdicts[i];
            const bool dominant = populations[i] >= config.dominant_fraction * top;
            if (dominant && v.mechanism != SyncMechanism::none) positive = true;
            s << "block " << v.block << (dominant ? " [dominant]" : "") << ": " << to_string(v.mechanism)
              << "  population=" << fmt(populations[i]);
            for (const auto& [name, value] : v.residuals) s << "  " << name << '=' << fmt(value);
            for (const auto& flag : v.flags) s << "  !" << flag;
            s << '\n';
        }
        if (!config.out.empty()) emit(verdict_csv(verdicts), config.out, out);
        s << (positive ? "synchronization condition satisfied" : "no synchronization condition satisfied") << '\n';
        return positive ? int{exit_ok} : int{exit_check_negative};
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Driven two-qubit Tavis-Cummings synchronization toolkit", "dcesync"};
    app.require_subcommand(1);

    struct Common {
        std::string config_path;
        std::string out;
        std::vector<std::string> sets;
        bool print_config = false;
        unsigned threads = 0;
        std::string positional;
    } common;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "Configuration file (key = value)");
        sub->add_option("--out", common.out, "Output path (stdout when omitted)");
        sub->add_option("--set", common.sets, "Override one key: --set key=value")->allow_extra_args(false);
        sub->add_flag("--print-config", common.print_config, "Print the effective configuration and exit");
        sub->add_option("--threads", common.threads, "Worker threads for sweeps (0 = all cores)");
    };
    CLI::App* evolve_cmd = app.add_subcommand("evolve", "Integrate one trajectory and write t,sz1,sz2,n,norm");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Correlation grid over a detuning axis and alpha0");
    CLI::App* extract_cmd = app.add_subcommand("extract", "Closed-form coefficients after the drive is off");
    CLI::App* check_cmd = app.add_subcommand("check", "Synchronization conditions for a coefficient file");
    for (CLI::App* sub : {evolve_cmd, sweep_cmd, extract_cmd, check_cmd}) add_common(sub);
    check_cmd->add_option("coefficients", common.positional, "Coefficient CSV written by extract");

    std::ostringstream cli_out, cli_err;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? int{exit_ok} : int{exit_config_error};
    }

    RunConfig config;
    try {
        if (!common.config_path.empty()) config = load_config(common.config_path);
        for (const std::string& s : common.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
            config.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (!common.out.empty()) config.out = common.out;
        if (!common.positional.empty()) config.coefficients = common.positional;
        config.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    if (common.print_config) {
        out << config.dump();
        return exit_ok;
    }
    if (evolve_cmd->parsed()) return cmd_evolve(config, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(config, common.threads, out, err);
    if (extract_cmd->parsed()) return cmd_extract(config, out, err);
    return cmd_check(config, out, err);
}

}  // namespace dcesync::cli
