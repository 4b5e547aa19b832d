#pragma once

// Flat `key = value` run configuration shared by every subcommand.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcesync/analytic.hpp"
#include "dcesync/hamiltonian.hpp"
#include "dcesync/observables.hpp"
#include "dcesync/propagator.hpp"
#include "dcesync/sweep.hpp"

namespace dcesync::cli {

/// Bad file, unknown key or unparsable value. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    SystemParams params;
    double theta1 = 0.7853981633974483;  // pi/4
    double theta2 = 0.7853981633974483;

    IntegratorConfig integrator;
    int n_max = 40;
    double leakage_tol = 1e-2;
    CutoffMode cutoff = CutoffMode::fixed;
    int max_n_max = 640;
    double cutoff_tol = 1e-6;
    double pearson_tol = 1e-3;

    PearsonWindow window;
    double profile_length = 200.0;

    /// Defaults to tau.
    std::optional<double> extract_time;
    Frame frame = Frame::interaction;
    SyncTolerances tolerances;
    double dominant_fraction = 0.1;

    SweepAxis sweep_axis = SweepAxis::delta_theta;
    /// Defaults: 0:1:11 for delta_theta, -0.05:0.05:11 for delta_g.
    std::optional<std::vector<double>> sweep_axis_values;
    std::vector<double> sweep_alpha0;

    std::string out;
    std::string dump_dir;
    std::string coefficients;

    RunConfig();

    /// Assigns one key from its textual value. Throws ConfigError.
    void set(std::string_view key, std::string_view value);
    /// Every key with its effective value, one `key = value` line each, in a form `parse` accepts.
    std::string dump() const;
    /// Cross-field checks. Throws ConfigError.
    void validate() const;

    FockTruncation truncation() const;
    double effective_extract_time() const { return extract_time.value_or(params.tau); }
    std::vector<double> effective_axis_values() const;
    SweepSpec sweep_spec() const;

    static const std::vector<std::string>& keys();
};

/// Applies `key = value` lines on top of `base`. Throws ConfigError naming line and key.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Real expressions such as `0.052`, `pi`, `-pi/4`, `5pi/12`, `2*pi/3`, `1e-3`.
double parse_real(std::string_view text);
/// Comma-separated reals, or `start:stop:count` for an evenly spaced list.
std::vector<double> parse_real_list(std::string_view text);

}  // namespace dcesync::cli
