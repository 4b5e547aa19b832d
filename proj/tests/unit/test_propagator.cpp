#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dcesync/error.hpp"
#include "dcesync/observables.hpp"
#include "dcesync/propagator.hpp"
#include "test_support.hpp"

using namespace dcesync;
using dcesync::testing::max_abs_diff;
using dcesync::testing::random_state;
using std::numbers::pi;
using Q = QubitLevel;

namespace {

IntegratorConfig config(double t_end, double dt, double sample, Picture picture = Picture::interaction) {
    IntegratorConfig c;
    c.t_end = t_end;
    c.dt = dt;
    c.sample_interval = sample;
    c.picture = picture;
    return c;
}

SystemParams strong_params() {
    SystemParams p;
    p.omega = 1.0;
    p.omega_q1 = 0.9;
    p.omega_q2 = 1.2;
    p.g1 = 0.3;
    p.g2 = 0.2;
    p.alpha0 = 0.1;
    p.tau = 3.0;
    return p;
}

StateVector run_to(const StateVector& s, const SystemParams& p, double t_end, double dt, Picture picture) {
    return *evolve(s, config(t_end, dt, t_end, picture), p).final_state;
}

}  // namespace

TEST(IntegratorConfig, Validation) {
    EXPECT_NO_THROW(IntegratorConfig{}.validate());
    EXPECT_THROW(config(10.0, 0.0, 1.0).validate(), InvalidArgumentError);
    EXPECT_THROW(config(10.0, 0.1, 0.05).validate(), InvalidArgumentError);
    EXPECT_THROW(config(10.0, 0.1, 0.25).validate(), InvalidArgumentError);
    EXPECT_THROW(config(10.05, 0.1, 0.2).validate(), InvalidArgumentError);
    EXPECT_THROW(config(-1.0, 0.1, 0.2).validate(), InvalidArgumentError);
}

TEST(Step, FreePhotonPhase) {
    SystemParams p;
    p.g1 = p.g2 = 0.0;
    const FockTruncation t(4);
    std::vector<Complex> a(t.dimension());
    a[basis_index(Q::g, Q::g, 1, t)] = 1.0;
    const StateVector s(a, t);
    for (Picture pic : {Picture::schrodinger, Picture::interaction}) {
        const DrivenOperators ops(p, t, pic);
        const StateVector out = step(s, 0.0, 0.01, ops);
        const Complex expect = std::polar(1.0, -(1.0 - 1.0) * 0.01);  // w*1 - (wq1 + wq2)/2 = 0
        EXPECT_NEAR(std::abs(out.amplitude(Q::g, Q::g, 1) - expect), 0.0, 1e-10);
        EXPECT_NEAR(std::norm(out.amplitude(Q::g, Q::g, 1)), 1.0, 1e-12);
    }
    p.omega = 1.7;
    const StateVector out = step(s, 0.0, 0.01, DrivenOperators(p, t, Picture::schrodinger));
    EXPECT_NEAR(std::abs(out.amplitude(Q::g, Q::g, 1) - std::polar(1.0, -0.7 * 0.01)), 0.0, 1e-10);
}

TEST(Step, ZeroHamiltonianLeavesStateUnchanged) {
    SystemParams p;
    p.omega = p.omega_q1 = p.omega_q2 = p.g1 = p.g2 = p.alpha0 = p.omega_d = 0.0;
    const StateVector s = random_state(FockTruncation(5), 5, 2);
    const StateVector out = step(s, 0.0, 0.5, DrivenOperators(p, s.truncation(), Picture::schrodinger));
    EXPECT_EQ(max_abs_diff(out.amplitudes(), s.amplitudes()), 0.0);
}

TEST(Step, RichardsonLocalErrorOrder) {
    // One step vs two half steps differ by c dt^5.
    const SystemParams p = strong_params();
    const StateVector s = random_state(FockTruncation(6), 4, 3);
    const DrivenOperators ops(p, s.truncation(), Picture::schrodinger);
    const auto gap = [&](double dt) {
        const StateVector one = step(s, 0.2, dt, ops);
        const StateVector two = step(step(s, 0.2, dt / 2, ops), 0.2 + dt / 2, dt / 2, ops);
        return max_abs_diff(one.amplitudes(), two.amplitudes());
    };
    const double ratio = gap(0.08) / gap(0.04);
    EXPECT_NEAR(ratio, 32.0, 4.0);
}

TEST(Step, Errors) {
    const StateVector s = prepare_initial(0.1, 0.2, FockTruncation(4));
    const DrivenOperators ops(SystemParams{}, FockTruncation(5));
    EXPECT_THROW(step(s, 0.0, 0.01, ops), InvalidArgumentError);
    const DrivenOperators same(SystemParams{}, FockTruncation(4));
    EXPECT_THROW(step(s, 0.0, -0.01, same), InvalidArgumentError);
    SystemParams huge;
    huge.g1 = 1e300;
    EXPECT_THROW(step(s, 0.0, 1e10, DrivenOperators(huge, FockTruncation(4), Picture::schrodinger)), DivergenceError);
}

TEST(Evolve, StepHalvingRatioIsSixteen) {
    const SystemParams p = strong_params();
    const StateVector s = prepare_initial(0.4, 1.0, FockTruncation(8, 1e-2));
    for (Picture pic : {Picture::schrodinger, Picture::interaction}) {
        const StateVector a = run_to(s, p, 4.0, 0.08, pic);
        const StateVector b = run_to(s, p, 4.0, 0.04, pic);
        const StateVector c = run_to(s, p, 4.0, 0.02, pic);
        const double ratio = max_abs_diff(a.amplitudes(), b.amplitudes()) / max_abs_diff(b.amplitudes(), c.amplitudes());
        EXPECT_NEAR(ratio, 16.0, 2.0);
    }
}

TEST(Evolve, PictureEquivalence) {
    for (double alpha0 : {0.0, 0.052}) {
        SystemParams p;
        p.g1 = 0.04;
        p.g2 = 0.041;
        p.alpha0 = alpha0;
        const StateVector s = prepare_initial(pi / 4, 5 * pi / 12, FockTruncation(12, 1e-2));
        const StateVector a = run_to(s, p, 50.0, 0.01, Picture::schrodinger);
        const StateVector b = run_to(s, p, 50.0, 0.01, Picture::interaction);
        EXPECT_LT(max_abs_diff(a.amplitudes(), b.amplitudes()), 1e-6) << "alpha0=" << alpha0;
    }
}

TEST(Evolve, TimeReversal) {
    SystemParams p;
    p.g1 = 0.04;
    p.g2 = 0.03;
    const StateVector s = prepare_initial(0.3, 1.2, FockTruncation(6));
    for (Picture pic : {Picture::schrodinger, Picture::interaction}) {
        const StateVector fwd = run_to(s, p, 100.0, 0.01, pic);
        std::vector<Complex> conj(fwd.amplitudes().begin(), fwd.amplitudes().end());
        for (auto& x : conj) x = std::conj(x);
        const StateVector back = run_to(StateVector(conj, fwd.truncation()), p, 100.0, 0.01, pic);
        std::vector<Complex> rec(back.amplitudes().begin(), back.amplitudes().end());
        for (auto& x : rec) x = std::conj(x);
        EXPECT_LT(max_abs_diff(rec, s.amplitudes()), 1e-6);
    }
}

TEST(Evolve, VacuumRabiOscillation) {
    SystemParams p;
    p.g1 = 0.04;
    p.g2 = 0.0;
    const double t_half = pi / (2 * 0.04);
    const auto traj = evolve(prepare_initial(pi / 2, 0.0, FockTruncation(4)), config(t_half, t_half / 4000, t_half / 8), p);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        EXPECT_NEAR(traj.sz1[k], std::cos(2 * 0.04 * traj.times[k]), 1e-8);
    EXPECT_NEAR(traj.sz1.back(), -1.0, 1e-4);
    EXPECT_NEAR(traj.sz2.back(), -1.0, 1e-12);
}

TEST(Evolve, UndrivenConservation) {
    SystemParams p;
    p.g1 = 0.04;
    p.g2 = 0.045;
    const FockTruncation t(16);
    const StateVector s = prepare_initial(pi / 4, 5 * pi / 12, t);
    IntegratorConfig c = config(2000.0, 0.01, 10.0);
    c.keep_states = true;
    const Trajectory traj = evolve(s, c, p);
    EXPECT_LE(traj.max_norm_drift, 1e-8);
    const SparseOperator htc = build_tc(p, t);
    const double n0 = mean_excitation(s.amplitudes());
    const double e0 = expectation(htc, s.amplitudes()).real();
    for (const StateVector& st : traj.states) {
        EXPECT_NEAR(mean_excitation(st.amplitudes()), n0, 1e-8);
        EXPECT_NEAR(expectation(htc, st.amplitudes()).real(), e0, 1e-8);
    }
    // At most two excitations: nothing reaches Fock level 3.
    for (const StateVector& st : traj.states) EXPECT_EQ(fock_populations(st.amplitudes())[3], 0.0);
}

TEST(Evolve, TrajectoryShape) {
    SystemParams p;
    p.alpha0 = 0.05;
    p.tau = 10.0;
    const Trajectory traj = evolve(prepare_initial(0.5, 0.9, FockTruncation(10)), config(20.0, 0.01, 0.5), p);
    ASSERT_EQ(traj.times.size(), 41u);
    EXPECT_EQ(traj.times.front(), 0.0);
    EXPECT_DOUBLE_EQ(traj.times.back(), 20.0);
    EXPECT_EQ(traj.sz1.size(), traj.times.size());
    EXPECT_EQ(traj.n.size(), traj.times.size());
    EXPECT_EQ(traj.n_max_used, 10);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        EXPECT_LE(std::abs(traj.sz1[k]), 1.0 + 1e-12);
        EXPECT_GE(traj.n[k], 0.0);
    }
    EXPECT_GT(traj.n.back(), 0.0);
    EXPECT_TRUE(traj.norm_within(1e-8));
}

TEST(Evolve, DriveOnlyCouplesEvenPhotonParity) {
    // From the vacuum with both qubits in g, the drive creates photon pairs and the
    // couplings move one photon into a qubit: the parity of the total excitation stays even.
    SystemParams p;
    p.alpha0 = 0.05;
    p.tau = 30.0;
    const FockTruncation t(12);
    const auto traj = evolve(prepare_initial(0.0, 0.0, t), config(40.0, 0.01, 40.0), p);
    const StateVector& s = *traj.final_state;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        const BasisLabel l = basis_label(i, t);
        const int n = l.m + (l.q1 == Q::e) + (l.q2 == Q::e);
        if (n % 2 == 1) {
            EXPECT_EQ(s.amplitudes()[i], Complex(0.0));
        }
    }
    EXPECT_GT(mean_photon(s), 1e-4);
}

TEST(Evolve, TruncationLeakageAndAutoExtend) {
    SystemParams p;
    p.alpha0 = 0.05;
    p.tau = 50.0;
    const StateVector s = prepare_initial(0.0, 0.0, FockTruncation(4, 1e-6));
    const IntegratorConfig c = config(40.0, 0.01, 0.5);
    try {
        evolve(s, c, p);
        FAIL() << "expected truncation error";
    } catch (const TruncationError& e) {
        EXPECT_GT(e.leakage(), 1e-6);
        EXPECT_GT(e.time(), 0.0);
        EXPECT_LE(e.time(), 40.0);
    }
    IntegratorConfig grow = c;
    grow.auto_extend = true;
    const Trajectory traj = evolve(s, grow, p);
    EXPECT_GT(traj.n_max_used, 4);
    EXPECT_FALSE(traj.extensions.empty());
    EXPECT_EQ(traj.times.size(), 81u);
    EXPECT_EQ(traj.final_state->truncation().n_max(), traj.n_max_used);
    // Earlier stretches ran at smaller cutoffs, so agreement is only at the leakage scale.
    const Trajectory direct = evolve(project_truncation(s, traj.n_max_used), c, p);
    for (std::size_t k = 0; k < direct.times.size(); ++k) {
        EXPECT_NEAR(direct.sz1[k], traj.sz1[k], 1e-5);
        EXPECT_NEAR(direct.n[k], traj.n[k], 1e-5);
    }
}

TEST(Evolve, RenormalizeStillReportsDrift) {
    SystemParams p;
    p.g1 = p.g2 = 0.3;
    const StateVector s = prepare_initial(0.4, 1.0, FockTruncation(6));
    IntegratorConfig c = config(50.0, 0.25, 0.5, Picture::schrodinger);
    const Trajectory raw = evolve(s, c, p);
    c.renormalize = true;
    const Trajectory norm = evolve(s, c, p);
    EXPECT_GT(raw.max_norm_drift, 1e-8);
    EXPECT_GT(norm.max_norm_drift, 0.0);
    EXPECT_NEAR(norm.final_state->norm(), 1.0, 1e-3);
}

TEST(ConvergeCutoff, UndrivenConvergesAtFirstCutoff) {
    SystemParams p;
    const StateVector s = prepare_initial(pi / 4, 5 * pi / 12, FockTruncation(4));
    const auto r = converge_cutoff(s, config(200.0, 0.01, 1.0), p, CutoffPolicy{4, 64, 1e-6});
    EXPECT_EQ(r.n_max_used, 4);
    EXPECT_LT(r.difference, 1e-12);
}

TEST(ConvergeCutoff, DrivenSelfConsistent) {
    SystemParams p;
    p.alpha0 = 0.052;
    p.tau = 40.0;
    const StateVector s = prepare_initial(pi / 4, 5 * pi / 12, FockTruncation(4, 1e-3));
    const IntegratorConfig c = config(80.0, 0.01, 0.5);
    const auto r = converge_cutoff(s, c, p, CutoffPolicy{4, 128, 1e-6});
    EXPECT_LT(r.difference, 1e-6);
    const Trajectory refined = evolve(project_truncation(s, 2 * r.n_max_used), c, p);
    double diff = 0.0;
    for (std::size_t k = 0; k < refined.times.size(); ++k)
        diff = std::max({diff, std::abs(refined.sz1[k] - r.trajectory.sz1[k]), std::abs(refined.sz2[k] - r.trajectory.sz2[k])});
    EXPECT_LT(diff, 1e-6);
}

TEST(ConvergeCutoff, BoundAndArguments) {
    SystemParams p;
    p.alpha0 = 0.3;
    const StateVector s = prepare_initial(0.0, 0.0, FockTruncation(2));
    EXPECT_THROW(converge_cutoff(s, config(40.0, 0.01, 0.5), p, CutoffPolicy{2, 8, 1e-12}), ConvergenceError);
    EXPECT_THROW(converge_cutoff(s, config(1.0, 0.01, 0.5), p, CutoffPolicy{1, 8, 1e-6}), InvalidArgumentError);
    EXPECT_THROW(converge_cutoff(s, config(1.0, 0.01, 0.5), p, CutoffPolicy{16, 8, 1e-6}), InvalidArgumentError);
}

TEST(TrajectoryCsv, Format) {
    Trajectory traj;
    traj.times = {0.0, 0.5};
    traj.sz1 = {0.1, -1.0 / 3.0};
    traj.sz2 = {1.0, 0.0};
    traj.n = {0.0, 2.5e-7};
    traj.norm = {1.0, 0.99999999999999989};
    EXPECT_EQ(trajectory_csv(traj),
              "t,sz1,sz2,n,norm\n"
              "0,0.10000000000000001,1,0,1\n"
              "0.5,-0.33333333333333331,0,2.4999999999999999e-07,0.99999999999999989\n");

    const auto path = std::filesystem::temp_directory_path() / "dcesync_traj_test.csv";
    write_trajectory_csv(traj, path.string());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), trajectory_csv(traj));
    std::filesystem::remove(path);
    EXPECT_THROW(write_trajectory_csv(traj, "/nonexistent-dir/x.csv"), IoError);
}
