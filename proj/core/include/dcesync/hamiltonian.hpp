#pragma once

// Driven two-qubit Tavis-Cummings Hamiltonian (hbar = 1):
//
//   H(t)  = H_TC + alpha(t) (a^dag + a)^2
//   H_TC  = w a^dag a + sum_mu [ (wq_mu / 2) sz_mu + g_mu (s-_mu a^dag + s+_mu a) ]
//   alpha(t) = alpha0 cos(wd t) Theta(tau - t),   Theta(0) = 1

#include "dcesync/hilbert.hpp"
#include "dcesync/sparse_operator.hpp"

namespace dcesync {

struct SystemParams {
    double omega = 1.0;
    double omega_q1 = 1.0;
    double omega_q2 = 1.0;
    double g1 = 0.04;
    double g2 = 0.04;
    double alpha0 = 0.0;
    double omega_d = 1.0;
    double tau = 500.0;

    /// Throws InvalidArgumentError for non-finite values or negative tau.
    void validate() const;

    bool balanced() const noexcept { return g1 == g2; }
};

SparseOperator build_tc(const SystemParams& params, const FockTruncation& trunc);

/// (a^dag + a)^2 = a^dag^2 + a^2 + a^dag a + a a^dag, matrix elements of the untruncated operator.
SparseOperator build_drive(const FockTruncation& trunc);

/// N = a^dag a + sum_mu (sz_mu + 1) / 2
SparseOperator build_excitation_number(const FockTruncation& trunc);

/// H0 = w a^dag a + sum_mu (wq_mu / 2) sz_mu (diagonal).
SparseOperator build_free(const SystemParams& params, const FockTruncation& trunc);

double alpha_at(double t, const SystemParams& params) noexcept;

/// Throws InvalidArgumentError when the operators differ in dimension.
SparseOperator hamiltonian_at(double t, const SparseOperator& h_tc, const SparseOperator& drive,
                              const SystemParams& params);

}  // namespace dcesync

namespace dcesync {

/// amplitudes[i] *= exp(i * sign * E0_i * t), where E0 is the diagonal of H0.
/// sign = +1 maps Schrodinger amplitudes into the interaction picture, -1 maps back.
void apply_free_phase(std::span<Complex> amplitudes, const SystemParams& params, double t, int sign);

}  // namespace dcesync
