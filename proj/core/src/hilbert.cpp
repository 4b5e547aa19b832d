#include "dcesync/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcesync/error.hpp"

namespace dcesync {

FockTruncation::FockTruncation(int n_max, double leakage_tol) : n_max_(n_max), leakage_tol_(leakage_tol) {
    if (n_max < 2) {
        throw InvalidArgumentError("Fock cutoff n_max must be at least 2, got " + std::to_string(n_max));
    }
    if (!(leakage_tol >= 0.0 && leakage_tol < 1.0)) {
        throw InvalidArgumentError("leakage tolerance must lie in [0, 1)");
    }
}

std::size_t basis_index(QubitLevel q1, QubitLevel q2, int m, const FockTruncation& trunc) {
    if (m < 0 || m > trunc.n_max()) {
        throw OutOfRangeError("Fock level " + std::to_string(m) + " outside [0, " +
                              std::to_string(trunc.n_max()) + "]");
    }
    return 4 * static_cast<std::size_t>(m) + 2 * (q1 == QubitLevel::e ? 1u : 0u) + (q2 == QubitLevel::e ? 1u : 0u);
}

BasisLabel basis_label(std::size_t index, const FockTruncation& trunc) {
    if (index >= trunc.dimension()) {
        throw OutOfRangeError("basis index " + std::to_string(index) + " outside dimension " +
                              std::to_string(trunc.dimension()));
    }
    return BasisLabel{(index & 2u) ? QubitLevel::e : QubitLevel::g, (index & 1u) ? QubitLevel::e : QubitLevel::g,
                      static_cast<int>(index / 4)};
}

StateVector::StateVector(std::vector<Complex> amplitudes, FockTruncation trunc)
    : amplitudes_(std::move(amplitudes)), trunc_(trunc) {
    if (amplitudes_.size() != trunc_.dimension()) {
        throw InvalidArgumentError("state has " + std::to_string(amplitudes_.size()) +
                                   " amplitudes, truncation expects " + std::to_string(trunc_.dimension()));
    }
}

double StateVector::norm() const noexcept {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return std::sqrt(sum);
}

StateVector prepare_initial(double theta1, double theta2, const FockTruncation& trunc) {
    std::vector<Complex> amps(trunc.dimension(), Complex{});
    const double c1 = std::cos(theta1), s1 = std::sin(theta1);
    const double c2 = std::cos(theta2), s2 = std::sin(theta2);
    amps[basis_index(QubitLevel::g, QubitLevel::g, 0, trunc)] = c1 * c2;
    amps[basis_index(QubitLevel::g, QubitLevel::e, 0, trunc)] = c1 * s2;
    amps[basis_index(QubitLevel::e, QubitLevel::g, 0, trunc)] = s1 * c2;
    amps[basis_index(QubitLevel::e, QubitLevel::e, 0, trunc)] = s1 * s2;
    return StateVector(std::move(amps), trunc);
}

StateVector extend_truncation(const StateVector& state, int new_n_max) {
    const auto& trunc = state.truncation();
    if (new_n_max < trunc.n_max()) {
        throw InvalidArgumentError("cannot extend n_max from " + std::to_string(trunc.n_max()) + " down to " +
                                   std::to_string(new_n_max));
    }
    const auto next = trunc.with_n_max(new_n_max);
    std::vector<Complex> amps(next.dimension(), Complex{});
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), amps.begin());
    return StateVector(std::move(amps), next);
}

StateVector project_truncation(const StateVector& state, int new_n_max) {
    const auto next = state.truncation().with_n_max(new_n_max);
    if (new_n_max > state.truncation().n_max()) return extend_truncation(state, new_n_max);
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().begin() + next.dimension());
    return StateVector(std::move(amps), next);
}

double top_fock_population(std::span<const Complex> amplitudes) {
    const std::size_t tail = std::min<std::size_t>(8, amplitudes.size());
    double sum = 0.0;
    for (std::size_t i = amplitudes.size() - tail; i < amplitudes.size(); ++i) sum += std::norm(amplitudes[i]);
    return sum;
}

double top_fock_population(const StateVector& state) { return top_fock_population(state.amplitudes()); }

}  // namespace dcesync
