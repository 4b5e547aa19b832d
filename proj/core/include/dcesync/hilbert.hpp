#pragma once

// Truncated product space |q1, q2, m> = qubit x qubit x Fock(0..n_max).
//
// Layout is Fock-major with the two qubits minor:
//   index = 4*m + 2*[q1 == e] + [q2 == e]

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dcesync {

using Complex = std::complex<double>;

enum class QubitLevel { g, e };

/// sigma_z eigenvalue: -1 for g, +1 for e.
constexpr int sigma_z(QubitLevel q) noexcept { return q == QubitLevel::e ? 1 : -1; }

class FockTruncation {
public:
    /// Throws InvalidArgumentError unless n_max >= 2 and 0 <= leakage_tol < 1.
    explicit FockTruncation(int n_max, double leakage_tol = 1e-6);

    int n_max() const noexcept { return n_max_; }
    double leakage_tol() const noexcept { return leakage_tol_; }
    std::size_t dimension() const noexcept { return 4 * static_cast<std::size_t>(n_max_ + 1); }

    FockTruncation with_n_max(int n_max) const { return FockTruncation(n_max, leakage_tol_); }

    friend bool operator==(const FockTruncation&, const FockTruncation&) = default;

private:
    int n_max_;
    double leakage_tol_;
};

struct BasisLabel {
    QubitLevel q1;
    QubitLevel q2;
    int m;

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

/// Throws OutOfRangeError if m < 0 or m > n_max.
std::size_t basis_index(QubitLevel q1, QubitLevel q2, int m, const FockTruncation& trunc);

/// Inverse of basis_index. Throws OutOfRangeError if index >= dimension.
BasisLabel basis_label(std::size_t index, const FockTruncation& trunc);

/// Pure state over the truncated basis. Immutable once constructed.
class StateVector {
public:
    /// Throws InvalidArgumentError when the amplitude count does not match the truncation.
    StateVector(std::vector<Complex> amplitudes, FockTruncation trunc);

    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    const FockTruncation& truncation() const noexcept { return trunc_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }

    Complex amplitude(QubitLevel q1, QubitLevel q2, int m) const {
        return amplitudes_[basis_index(q1, q2, m, trunc_)];
    }

    double norm() const noexcept;

private:
    std::vector<Complex> amplitudes_;
    FockTruncation trunc_;
};

/// (cos t1 |g> + sin t1 |e>) (x) (cos t2 |g> + sin t2 |e>) (x) |0>.
StateVector prepare_initial(double theta1, double theta2, const FockTruncation& trunc);

/// Pads with empty Fock levels. Throws InvalidArgumentError if new_n_max < n_max.
StateVector extend_truncation(const StateVector& state, int new_n_max);

/// Drops Fock levels above new_n_max (no renormalization).
StateVector project_truncation(const StateVector& state, int new_n_max);

/// Total population in the top two Fock levels.
double top_fock_population(const StateVector& state);
double top_fock_population(std::span<const Complex> amplitudes);

}  // namespace dcesync
