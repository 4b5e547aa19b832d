#pragma once

// Fixed-step classical Runge-Kutta integration of i d|psi>/dt = H(t) |psi>.

#include <optional>
#include <string>
#include <vector>

#include "dcesync/hamiltonian.hpp"
#include "dcesync/hilbert.hpp"
#include "dcesync/observables.hpp"

namespace dcesync {

/// Frame in which the ODE is integrated. Sampled observables are diagonal in the
/// basis, so both frames report identical series; final states are always returned
/// in the Schrodinger picture.
enum class Picture { schrodinger, interaction };

struct IntegratorConfig {
    double dt = 0.01;
    double sample_interval = 0.5;
    double t_end = 2000.0;
    double norm_tol = 1e-8;
    bool renormalize = false;
    /// Grow n_max by 50% (and resume from the last sample) instead of failing on leakage.
    bool auto_extend = false;
    int max_n_max = 4096;
    /// Upper bound on dt * ||H|| for one RK4 substep; larger steps are split evenly.
    double max_step_phase = 1.0;
    Picture picture = Picture::interaction;
    bool keep_states = false;

    /// Throws InvalidArgumentError for inconsistent values.
    void validate() const;
};

/// -i H(t) for one frame, with H_TC and the drive fused into one compressed-row pattern.
class DrivenOperators {
public:
    DrivenOperators(const SystemParams& params, const FockTruncation& trunc, Picture picture = Picture::interaction);

    const SystemParams& params() const noexcept { return params_; }
    const FockTruncation& truncation() const noexcept { return trunc_; }
    Picture picture() const noexcept { return picture_; }
    std::size_t dimension() const noexcept { return trunc_.dimension(); }

    /// out = -i H(t) in, with the drive amplitude supplied by the caller.
    void derivative(double t, double alpha, std::span<const Complex> in, std::span<Complex> out,
                    std::span<Complex> scratch) const;

    /// Bound on ||H|| with or without the drive.
    double rate_bound(bool drive_on) const noexcept { return drive_on ? bound_driven_ : bound_free_; }

private:
    SystemParams params_;
    FockTruncation trunc_;
    Picture picture_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> cols_;
    std::vector<Complex> static_vals_;
    std::vector<double> drive_vals_;
    double bound_driven_ = 0.0;
    double bound_free_ = 0.0;
};

/// One RK4 step from t to t + dt (split at tau when the step straddles it). A step
/// starting at or after tau sees no drive.
/// Throws DivergenceError when the result is not finite.
StateVector step(const StateVector& state, double t, double dt, const DrivenOperators& ops);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> sz1;
    std::vector<double> sz2;
    std::vector<double> n;
    std::vector<double> norm;
    std::vector<StateVector> states;
    std::optional<StateVector> final_state;
    double max_norm_drift = 0.0;
    int n_max_used = 0;
    /// (time, new n_max) for every automatic cutoff extension.
    std::vector<std::pair<double, int>> extensions;

    Series sz1_series() const { return Series(times, sz1); }
    Series sz2_series() const { return Series(times, sz2); }
    bool norm_within(double tol) const noexcept { return max_norm_drift <= tol; }
};

/// Integrates from t = 0 to config.t_end, sampling every sample_interval.
/// Throws TruncationError (leakage above trunc.leakage_tol without auto_extend) and DivergenceError.
Trajectory evolve(const StateVector& initial, const IntegratorConfig& config, const SystemParams& params);

struct CutoffPolicy {
    int start_n_max = 16;
    int max_n_max = 1024;
    double tolerance = 1e-6;
};

struct ConvergedTrajectory {
    Trajectory trajectory;
    int n_max_used = 0;
    /// max |sz_mu| difference against the next doubled cutoff.
    double difference = 0.0;
};

/// Doubles n_max until the sz1/sz2 series of consecutive cutoffs agree within the tolerance and
/// returns the smaller of the agreeing pair. Throws ConvergenceError past policy.max_n_max.
ConvergedTrajectory converge_cutoff(const StateVector& initial, const IntegratorConfig& config,
                                    const SystemParams& params, const CutoffPolicy& policy);

/// Trajectory CSV: header `t,sz1,sz2,n,norm`, 17 significant digits.
std::string trajectory_csv(const Trajectory& trajectory);
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);

}  // namespace dcesync
