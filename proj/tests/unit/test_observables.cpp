#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dcesync/error.hpp"
#include "dcesync/observables.hpp"
#include "test_support.hpp"

using namespace dcesync;
using std::numbers::pi;
using Q = QubitLevel;

namespace {

StateVector basis_state(Q q1, Q q2, int m, const FockTruncation& t) {
    std::vector<Complex> a(t.dimension());
    a[basis_index(q1, q2, m, t)] = 1.0;
    return StateVector(a, t);
}

Series sampled(double (*f)(double), double t0, double t1, double h) {
    std::vector<double> ts, vs;
    const int n = static_cast<int>(std::lround((t1 - t0) / h));
    for (int k = 0; k <= n; ++k) {
        ts.push_back(t0 + k * h);
        vs.push_back(f(ts.back()));
    }
    return Series(ts, vs);
}

Series mapped(const Series& s, double a, double b) {
    std::vector<double> v(s.values().begin(), s.values().end());
    for (double& x : v) x = a * x + b;
    return Series({s.times().begin(), s.times().end()}, v);
}

}  // namespace

TEST(SigmaZ, BasisStates) {
    const FockTruncation t(3);
    const StateVector s = basis_state(Q::e, Q::g, 0, t);
    EXPECT_EQ(sigma_z_expect(s, 1), 1.0);
    EXPECT_EQ(sigma_z_expect(s, 2), -1.0);
    EXPECT_THROW(sigma_z_expect(s, 3), InvalidArgumentError);
}

TEST(SigmaZ, BornRule) {
    const FockTruncation t(3);
    for (double th : {0.0, 0.3, pi / 4, 1.9}) {
        const StateVector s = prepare_initial(th, 0.7, t);
        EXPECT_NEAR(sigma_z_expect(s, 1), -std::cos(2 * th), 1e-14);
        EXPECT_NEAR(sigma_z_expect(s, 2), -std::cos(1.4), 1e-14);
    }
}

TEST(MeanPhoton, Examples) {
    const FockTruncation t(4);
    EXPECT_EQ(mean_photon(prepare_initial(0.4, 1.2, t)), 0.0);
    EXPECT_NEAR(mean_photon(basis_state(Q::g, Q::g, 3, t)), 3.0, 1e-15);
    std::vector<Complex> a(t.dimension());
    a[basis_index(Q::g, Q::g, 0, t)] = a[basis_index(Q::g, Q::g, 2, t)] = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(mean_photon(StateVector(a, t)), 1.0, 1e-15);
}

TEST(MeanExcitation, CountsQubitsAndPhotons) {
    const FockTruncation t(4);
    EXPECT_NEAR(mean_excitation(basis_state(Q::e, Q::e, 2, t).amplitudes()), 4.0, 1e-15);
    EXPECT_NEAR(mean_excitation(basis_state(Q::g, Q::e, 0, t).amplitudes()), 1.0, 1e-15);
}

TEST(FockPopulations, SumToNorm) {
    const StateVector s = dcesync::testing::random_state(FockTruncation(6), 4, 5);
    const auto pops = fock_populations(s.amplitudes());
    ASSERT_EQ(pops.size(), 7u);
    double total = 0.0;
    for (double p : pops) total += p;
    EXPECT_NEAR(total, 1.0, 1e-14);
    EXPECT_EQ(pops[5], 0.0);
}

TEST(Series, Validation) {
    EXPECT_THROW(Series({0.0}, {1.0}), InvalidArgumentError);
    EXPECT_THROW(Series({0.0, 1.0}, {1.0}), InvalidArgumentError);
    EXPECT_THROW(Series({0.0, 0.0}, {1.0, 2.0}), InvalidArgumentError);
    const Series s({0.0, 2.0}, {1.0, 3.0});
    EXPECT_DOUBLE_EQ(s.at(0.5), 1.5);
}

TEST(WindowedMean, Examples) {
    const Series c({0.0, 0.5, 1.0, 1.5, 2.0}, {4.0, 4.0, 4.0, 4.0, 4.0});
    EXPECT_DOUBLE_EQ(windowed_mean(c, {0.0, 2.0}), 4.0);

    // Spacing pi/6 (about 0.5) puts the period end on the grid.
    const Series s = sampled([](double t) { return std::sin(t); }, 0.0, 4 * pi, pi / 6);
    EXPECT_NEAR(windowed_mean(s, {0.0, 2 * pi}), 0.0, 1e-6);

    const Series ramp = sampled([](double t) { return 0.3 * t; }, 0.0, 10.0, 0.5);
    EXPECT_NEAR(windowed_mean(ramp, {0.0, 10.0}), 1.5, 1e-12);
    // Non-grid endpoints are interpolated; still exact for linear data.
    EXPECT_NEAR(windowed_mean(ramp, {1.25, 3.3}), 0.3 * (1.25 + 3.3 / 2), 1e-12);
}

TEST(WindowedMean, OutsideSupport) {
    const Series s = sampled([](double t) { return t; }, 0.0, 10.0, 0.5);
    EXPECT_THROW(windowed_mean(s, {5.0, 6.0}), OutOfRangeError);
    EXPECT_THROW(windowed_mean(s, {-1.0, 2.0}), OutOfRangeError);
}

TEST(Pearson, Examples) {
    const Series s1 = sampled([](double t) { return std::sin(0.7 * t) + 0.1 * t; }, 0.0, 100.0, 0.5);
    EXPECT_NEAR(pearson(s1, s1, {10.0, 80.0}), 1.0, 1e-12);
    EXPECT_NEAR(pearson(s1, mapped(s1, -1.0, 3.0), {10.0, 80.0}), -1.0, 1e-12);
    const Series sn = sampled([](double t) { return std::sin(t); }, 0.0, 16 * pi, pi / 6);
    const Series cs = sampled([](double t) { return std::cos(t); }, 0.0, 16 * pi, pi / 6);
    EXPECT_NEAR(pearson(sn, cs, {0.0, 14 * pi}), 0.0, 1e-6);
}

TEST(Pearson, AffineInvarianceSymmetryBound) {
    const Series a = sampled([](double t) { return std::sin(0.3 * t) * std::cos(0.05 * t); }, 0.0, 200.0, 0.5);
    const Series b = sampled([](double t) { return std::cos(0.31 * t) + 0.2 * std::sin(1.1 * t); }, 0.0, 200.0, 0.5);
    const PearsonWindow w{20.0, 150.0};
    const double c = pearson(a, b, w);
    EXPECT_NEAR(pearson(mapped(a, 2.5, -7.0), b, w), c, 1e-9);
    EXPECT_NEAR(pearson(a, mapped(b, 0.01, 100.0), w), c, 1e-9);
    EXPECT_EQ(pearson(b, a, w), c);
    EXPECT_LE(std::abs(c), 1.0 + 1e-9);
}

TEST(Pearson, ZeroVarianceAndMismatchedGrids) {
    const Series a = sampled([](double t) { return std::sin(t); }, 0.0, 20.0, 0.5);
    const Series flat = mapped(a, 0.0, 2.0);
    EXPECT_THROW(pearson(a, flat, {0.0, 10.0}), UndefinedCorrelationError);
    const Series other = sampled([](double t) { return std::sin(t); }, 0.0, 20.0, 0.25);
    EXPECT_THROW(pearson(a, other, {0.0, 10.0}), InvalidArgumentError);
}

TEST(PearsonProfile, MatchesPointwise) {
    const Series a = sampled([](double t) { return std::sin(0.3 * t); }, 0.0, 100.0, 0.5);
    const Series b = sampled([](double t) { return std::sin(0.3 * t + 0.01 * t); }, 0.0, 100.0, 0.5);
    const std::vector<double> starts{0.0, 10.0, 25.5, 50.0};
    const auto prof = pearson_profile(a, b, 40.0, starts);
    ASSERT_EQ(prof.size(), starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) EXPECT_DOUBLE_EQ(prof[k], pearson(a, b, {starts[k], 40.0}));
}
