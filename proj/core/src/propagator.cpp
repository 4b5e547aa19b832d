#include "dcesync/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

#include "dcesync/error.hpp"

namespace dcesync {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgumentError("dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgumentError("t_end must be positive");
    if (!(sample_interval >= dt)) throw InvalidArgumentError("sample_interval must be at least dt");
    const double per_sample = sample_interval / dt;
    if (std::abs(per_sample - std::round(per_sample)) > 1e-9 * per_sample) {
        throw InvalidArgumentError("sample_interval must be an integer multiple of dt");
    }
    const double steps = t_end / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
        throw InvalidArgumentError("t_end must be an integer multiple of dt");
    }
    if (!(norm_tol >= 0.0)) throw InvalidArgumentError("norm_tol must be non-negative");
    if (!(max_step_phase > 0.0)) throw InvalidArgumentError("max_step_phase must be positive");
    if (max_n_max < 2) throw InvalidArgumentError("max_n_max must be at least 2");
}

DrivenOperators::DrivenOperators(const SystemParams& params, const FockTruncation& trunc, Picture picture)
    : params_(params), trunc_(trunc), picture_(picture) {
    params_.validate();
    const auto h_tc = build_tc(params, trunc);
    const auto drive = build_drive(trunc);
    const std::size_t dim = trunc.dimension();

    std::vector<std::map<std::size_t, std::pair<Complex, double>>> rows(dim);
    for (const auto& e : h_tc.entries()) {
        // In the interaction picture the diagonal of H_TC is exactly H0 and drops out.
        if (picture == Picture::interaction && e.row == e.col) continue;
        rows[e.row][e.col].first += e.value;
    }
    for (const auto& e : drive.entries()) rows[e.row][e.col].second += e.value.real();

    offsets_.assign(dim + 1, 0);
    double bound_driven = 0.0, bound_free = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        double sum_driven = 0.0, sum_free = 0.0;
        for (const auto& [c, v] : rows[r]) {
            cols_.push_back(c);
            static_vals_.push_back(v.first);
            drive_vals_.push_back(v.second);
            sum_free += std::abs(v.first);
            sum_driven += std::abs(v.first) + std::abs(params.alpha0 * v.second);
        }
        offsets_[r + 1] = cols_.size();
        bound_driven = std::max(bound_driven, sum_driven);
        bound_free = std::max(bound_free, sum_free);
    }
    bound_driven_ = bound_driven;
    bound_free_ = bound_free;
}

void DrivenOperators::derivative(double t, double alpha, std::span<const Complex> in, std::span<Complex> out,
                                 std::span<Complex> scratch) const {
    const std::size_t dim = trunc_.dimension();
    const auto row_product = [&](std::size_t r, std::span<const Complex> x) {
        Complex acc{};
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            acc += (static_vals_[k] + alpha * drive_vals_[k]) * x[cols_[k]];
        }
        return acc;
    };

    if (picture_ == Picture::schrodinger) {
        for (std::size_t r = 0; r < dim; ++r) {
            const Complex acc = row_product(r, in);
            out[r] = Complex(acc.imag(), -acc.real());
        }
        return;
    }

    // H_I(t) = e^{i H0 t} V(t) e^{-i H0 t} with V = H - H0 diagonal-free.
    const double h1 = 0.5 * params_.omega_q1, h2 = 0.5 * params_.omega_q2;
    const Complex qubit[4] = {std::polar(1.0, t * (-h1 - h2)), std::polar(1.0, t * (-h1 + h2)),
                              std::polar(1.0, t * (h1 - h2)), std::polar(1.0, t * (h1 + h2))};
    const Complex cavity_step = std::polar(1.0, t * params_.omega);
    Complex cavity = 1.0;
    for (std::size_t m = 0; m < dim / 4; ++m) {
        for (std::size_t q = 0; q < 4; ++q) scratch[4 * m + q] = std::conj(cavity * qubit[q]) * in[4 * m + q];
        cavity *= cavity_step;
    }
    cavity = 1.0;
    for (std::size_t m = 0; m < dim / 4; ++m) {
        for (std::size_t q = 0; q < 4; ++q) {
            const std::size_t r = 4 * m + q;
            const Complex acc = cavity * qubit[q] * row_product(r, scratch);
            out[r] = Complex(acc.imag(), -acc.real());
        }
        cavity *= cavity_step;
    }
}

namespace {

struct Workspace {
    explicit Workspace(std::size_t dim) : k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), scratch(dim) {}
    void resize(std::size_t dim) {
        for (auto* v : {&k1, &k2, &k3, &k4, &tmp, &scratch}) v->assign(dim, Complex{});
    }
    std::vector<Complex> k1, k2, k3, k4, tmp, scratch;
};

void rk4(const DrivenOperators& ops, double t, double h, bool drive_on, std::vector<Complex>& psi, Workspace& w) {
    const auto& p = ops.params();
    const auto alpha = [&](double s) { return drive_on ? p.alpha0 * std::cos(p.omega_d * s) : 0.0; };
    const std::size_t dim = psi.size();
    const double half = 0.5 * h;

    ops.derivative(t, alpha(t), psi, w.k1, w.scratch);
    for (std::size_t i = 0; i < dim; ++i) w.tmp[i] = psi[i] + half * w.k1[i];
    ops.derivative(t + half, alpha(t + half), w.tmp, w.k2, w.scratch);
    for (std::size_t i = 0; i < dim; ++i) w.tmp[i] = psi[i] + half * w.k2[i];
    ops.derivative(t + half, alpha(t + half), w.tmp, w.k3, w.scratch);
    for (std::size_t i = 0; i < dim; ++i) w.tmp[i] = psi[i] + h * w.k3[i];
    ops.derivative(t + h, alpha(t + h), w.tmp, w.k4, w.scratch);

    const double sixth = h / 6.0;
    for (std::size_t i = 0; i < dim; ++i) {
        psi[i] += sixth * (w.k1[i] + 2.0 * (w.k2[i] + w.k3[i]) + w.k4[i]);
    }
}

void integrate_segment(const DrivenOperators& ops, double t0, double t1, bool drive_on, double max_phase,
                       std::vector<Complex>& psi, Workspace& w) {
    const double length = t1 - t0;
    if (length <= 0.0) return;
    const double phase = length * ops.rate_bound(drive_on);
    const auto substeps = std::max<long long>(1, static_cast<long long>(std::ceil(phase / max_phase)));
    const double h = length / static_cast<double>(substeps);
    for (long long s = 0; s < substeps; ++s) rk4(ops, t0 + static_cast<double>(s) * h, h, drive_on, psi, w);
}

// Advances psi over [t0, t1], splitting at tau so no stage straddles the drive cutoff.
void advance(const DrivenOperators& ops, double t0, double t1, double max_phase, std::vector<Complex>& psi,
             Workspace& w) {
    const double tau = ops.params().tau;
    const double eps = 1e-12 * std::max(1.0, std::abs(tau));
    if (t0 < tau - eps && t1 > tau + eps) {
        integrate_segment(ops, t0, tau, true, max_phase, psi, w);
        integrate_segment(ops, tau, t1, false, max_phase, psi, w);
        return;
    }
    integrate_segment(ops, t0, t1, t0 < tau - eps, max_phase, psi, w);
}

double squared_norm(std::span<const Complex> psi) {
    double s = 0.0;
    for (const auto& a : psi) s += std::norm(a);
    return s;
}

std::vector<Complex> to_schrodinger(std::vector<Complex> psi, const DrivenOperators& ops, double t) {
    if (ops.picture() == Picture::interaction) apply_free_phase(psi, ops.params(), t, -1);
    return psi;
}

}  // namespace

StateVector step(const StateVector& state, double t, double dt, const DrivenOperators& ops) {
    if (state.truncation() != ops.truncation()) throw InvalidArgumentError("state and operators differ in truncation");
    if (!(dt > 0.0)) throw InvalidArgumentError("dt must be positive");
    std::vector<Complex> psi(state.amplitudes().begin(), state.amplitudes().end());
    if (ops.picture() == Picture::interaction) apply_free_phase(psi, ops.params(), t, +1);
    Workspace w(psi.size());
    advance(ops, t, t + dt, IntegratorConfig{}.max_step_phase, psi, w);
    if (!std::isfinite(squared_norm(psi))) {
        throw DivergenceError("non-finite amplitudes at t=" + std::to_string(t) + " dt=" + std::to_string(dt), t, dt);
    }
    return StateVector(to_schrodinger(std::move(psi), ops, t + dt), state.truncation());
}

Trajectory evolve(const StateVector& initial, const IntegratorConfig& config, const SystemParams& params) {
    config.validate();
    params.validate();

    FockTruncation trunc = initial.truncation();
    auto ops = std::make_unique<DrivenOperators>(params, trunc, config.picture);
    std::vector<Complex> psi(initial.amplitudes().begin(), initial.amplitudes().end());
    Workspace work(psi.size());

    const long long total_steps = std::llround(config.t_end / config.dt);
    const long long per_sample = std::llround(config.sample_interval / config.dt);

    Trajectory traj;
    const auto record = [&](double t, double norm_sq) {
        traj.times.push_back(t);
        traj.sz1.push_back(sigma_z_expect(psi, 1));
        traj.sz2.push_back(sigma_z_expect(psi, 2));
        traj.n.push_back(mean_photon(psi));
        traj.norm.push_back(std::sqrt(norm_sq));
        if (config.keep_states) traj.states.emplace_back(to_schrodinger(psi, *ops, t), trunc);
    };
    const double initial_norm_sq = squared_norm(psi);
    record(0.0, initial_norm_sq);
    traj.max_norm_drift = std::abs(std::sqrt(initial_norm_sq) - 1.0);

    std::vector<Complex> checkpoint = psi;
    long long checkpoint_step = 0;
    long long j = 0;
    while (j < total_steps) {
        const long long next = std::min(j + per_sample, total_steps);
        for (long long s = j; s < next; ++s) {
            advance(*ops, static_cast<double>(s) * config.dt, static_cast<double>(s + 1) * config.dt,
                    config.max_step_phase, psi, work);
        }
        const double t = static_cast<double>(next) * config.dt;
        const double norm_sq = squared_norm(psi);
        if (!std::isfinite(norm_sq)) {
            throw DivergenceError("non-finite amplitudes at t=" + std::to_string(t) +
                                      " (dt=" + std::to_string(config.dt) + ")",
                                  t, config.dt);
        }
        const double leakage = top_fock_population(psi);
        if (leakage > trunc.leakage_tol()) {
            const int grown = std::max(trunc.n_max() + 1, (3 * trunc.n_max() + 1) / 2);
            if (!config.auto_extend || grown > config.max_n_max) {
                throw TruncationError("Fock truncation leakage " + std::to_string(leakage) + " exceeds " +
                                          std::to_string(trunc.leakage_tol()) + " at t=" + std::to_string(t) +
                                          " (n_max=" + std::to_string(trunc.n_max()) + ")",
                                      t, leakage);
            }
            trunc = trunc.with_n_max(grown);
            psi = checkpoint;
            psi.resize(trunc.dimension(), Complex{});
            checkpoint = psi;
            ops = std::make_unique<DrivenOperators>(params, trunc, config.picture);
            work.resize(trunc.dimension());
            traj.extensions.emplace_back(static_cast<double>(checkpoint_step) * config.dt, grown);
            j = checkpoint_step;
            continue;
        }
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(std::sqrt(norm_sq) - 1.0));
        record(t, norm_sq);
        if (config.renormalize) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& a : psi) a *= inv;
        }
        checkpoint = psi;
        checkpoint_step = next;
        j = next;
    }

    traj.final_state.emplace(to_schrodinger(std::move(psi), *ops, config.t_end), trunc);
    traj.n_max_used = trunc.n_max();
    return traj;
}

ConvergedTrajectory converge_cutoff(const StateVector& initial, const IntegratorConfig& config,
                                    const SystemParams& params, const CutoffPolicy& policy) {
    if (policy.start_n_max < 2) throw InvalidArgumentError("start_n_max must be at least 2");
    if (policy.start_n_max > policy.max_n_max) throw InvalidArgumentError("start_n_max exceeds max_n_max");

    const auto run = [&](int n_max) -> std::optional<Trajectory> {
        try {
            return evolve(project_truncation(initial, n_max), config, params);
        } catch (const TruncationError&) {
            return std::nullopt;
        }
    };

    int n_max = policy.start_n_max;
    auto current = run(n_max);
    while (true) {
        const int doubled = 2 * n_max;
        if (doubled > policy.max_n_max) {
            throw ConvergenceError("cutoff did not converge below n_max=" + std::to_string(policy.max_n_max));
        }
        auto refined = run(doubled);
        if (current && refined) {
            double diff = 0.0;
            for (std::size_t i = 0; i < current->times.size(); ++i) {
                diff = std::max(diff, std::abs(current->sz1[i] - refined->sz1[i]));
                diff = std::max(diff, std::abs(current->sz2[i] - refined->sz2[i]));
            }
            if (diff < policy.tolerance) return ConvergedTrajectory{std::move(*current), n_max, diff};
        }
        n_max = doubled;
        current = std::move(refined);
    }
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,sz1,sz2,n,norm\n";
    char line[160];
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", trajectory.times[i], trajectory.sz1[i],
                      trajectory.sz2[i], trajectory.n[i], trajectory.norm[i]);
        out += line;
    }
    return out;
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << trajectory_csv(trajectory);
    if (!file) throw IoError("failed writing " + path);
}

}  // namespace dcesync
