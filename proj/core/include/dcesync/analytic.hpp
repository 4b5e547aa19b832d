#pragma once

// Closed-form dynamics of the undriven (t > tau) resonant system.
//
// In the interaction picture the amplitudes split into independent blocks
//   block l = { A_{l+1}, B_l, C_l, D_{l-1} }     (A = |g,g>, B = |g,e>, C = |e,g>, D = |e,e>)
// Block 0 is the three-level vacuum block {A_1, B_0, C_0}. Blocks l >= 1 are written
// with the closed-form index m = l + 1. The closed forms use absolute time, so
// coefficients extracted at t0 are constants only in the interaction frame.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dcesync/hamiltonian.hpp"
#include "dcesync/hilbert.hpp"

namespace dcesync {

/// Frame for amplitudes handed to the extractors. `lab` keeps the raw Schrodinger
/// amplitudes; on resonance it differs from `interaction` by exp(-i l t) per block l.
enum class Frame { interaction, lab };

struct InteractionAmplitudes {
    std::vector<Complex> A;
    std::vector<Complex> B;
    std::vector<Complex> C;
    std::vector<Complex> D;
    double t = 0.0;

    int n_max() const noexcept { return static_cast<int>(A.size()) - 1; }
    double norm() const noexcept;
    /// |A_{l+1}|^2 + |B_l|^2 + |C_l|^2 + |D_{l-1}|^2 (missing members count as 0).
    double block_population(int block) const;
};

/// Multiplies every amplitude by exp(i E0 t), E0 being its free energy.
InteractionAmplitudes to_interaction_picture(const StateVector& state, double t, const SystemParams& params);
InteractionAmplitudes amplitudes_in_frame(const StateVector& state, double t, const SystemParams& params, Frame frame);

/// Inverse of to_interaction_picture.
StateVector to_schrodinger_picture(const InteractionAmplitudes& amps, const SystemParams& params,
                                   const FockTruncation& trunc);

/// One block's members; D is zero for the vacuum block.
struct BlockAmplitudes {
    int block = 0;
    Complex A;
    Complex B;
    Complex C;
    Complex D;
};

BlockAmplitudes block_amplitudes(const InteractionAmplitudes& amps, int block);

struct BalancedVacuumCoeffs {
    double g = 0.0;
    Complex c10;
    Complex c20;
    Complex c30;
};

struct BalancedBlockCoeffs {
    int m = 2;
    double g = 0.0;
    std::array<Complex, 4> c{};

    int block() const noexcept { return m - 1; }
    double K() const noexcept;
};

struct UnbalancedVacuumCoeffs {
    double g1 = 0.0;
    double g2 = 0.0;
    Complex c1;
    Complex c2;
    Complex c3;

    double G() const noexcept;
};

struct UnbalancedBlockCoeffs {
    int m = 2;
    double g1 = 0.0;
    double g2 = 0.0;
    /// Ordered (S,U) = (+1,+1), (+1,-1), (-1,+1), (-1,-1).
    std::array<Complex, 4> c{};

    int block() const noexcept { return m - 1; }
    static std::size_t slot(int S, int U);
    Complex at(int S, int U) const { return c[slot(S, U)]; }

    double G() const noexcept;
    double L() const noexcept;
    /// M_{S m}; the S = -1 branch is evaluated without cancellation.
    double M(int S) const;
    /// sqrt(2) M_S / 2
    double frequency(int S) const;
};

using BalancedCoeffs = std::variant<BalancedVacuumCoeffs, BalancedBlockCoeffs>;
using UnbalancedCoeffs = std::variant<UnbalancedVacuumCoeffs, UnbalancedBlockCoeffs>;
using BlockCoeffs = std::variant<BalancedVacuumCoeffs, BalancedBlockCoeffs, UnbalancedVacuumCoeffs, UnbalancedBlockCoeffs>;

/// Blocks below this population are not extracted.
inline constexpr double negligible_block_population = 1e-12;
/// Largest allowed |M c - amplitudes| after a solve.
inline constexpr double extraction_residual_tol = 1e-10;

int block_of(const BlockCoeffs& coeffs);

/// Solves the closed form of `block` at amps.t for its coefficients.
/// Returns nullopt for negligible blocks. Throws ExtractionError for singular systems,
/// OutOfRangeError for blocks outside the truncation, InvalidArgumentError for g <= 0.
std::optional<BalancedCoeffs> extract_balanced(const InteractionAmplitudes& amps, int block, double g);

/// As extract_balanced; throws ExtractionError when g1 == g2 (use extract_balanced).
std::optional<UnbalancedCoeffs> extract_unbalanced(const InteractionAmplitudes& amps, int block, double g1,
                                                   double g2);

/// Every non-negligible block 0 .. n_max-1, balanced or unbalanced according to
/// |g1 - g2| <= 1e-15. Throws InvalidArgumentError off resonance.
std::vector<BlockCoeffs> extract_all(const InteractionAmplitudes& amps, const SystemParams& params);

BlockAmplitudes analytic_evolve_balanced(const BalancedCoeffs& coeffs, double t);
BlockAmplitudes analytic_evolve_unbalanced(const UnbalancedCoeffs& coeffs, double t);
BlockAmplitudes analytic_evolve(const BlockCoeffs& coeffs, double t);

/// Copy of `reference` with every block listed in `coeffs` replaced by its closed form at t.
InteractionAmplitudes evolve_blocks(const InteractionAmplitudes& reference, std::span<const BlockCoeffs> coeffs,
                                    double t);

/// Population of the block described by `coeffs` (time independent).
double block_population(const BlockCoeffs& coeffs);

struct DeltaSigmaZ {
    /// per_block[l] = 2 (|C_l|^2 - |B_l|^2), so that the entries sum to <sz1> - <sz2>.
    std::vector<double> per_block;
    double total = 0.0;
};

DeltaSigmaZ delta_sigma_z_blocks(const InteractionAmplitudes& amps);

/// |c10|^2
double dark_state_probability(const BalancedVacuumCoeffs& coeffs);

enum class SyncMechanism { coefficient_vanishing, phase_quadrature, none };

std::string_view to_string(SyncMechanism mechanism);

struct SyncTolerances {
    double magnitude = 0.02;
    double phase = 0.05 * 3.14159265358979323846;
};

struct SyncVerdict {
    int block = 0;
    SyncMechanism mechanism = SyncMechanism::none;
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<std::string> flags;

    /// Throws InvalidArgumentError for unknown names.
    double residual(std::string_view name) const;
    bool has_flag(std::string_view flag) const;
};

/// Circular distance of `gap` to the nearest pi (k + 1/2), in [0, pi/2].
double quadrature_distance(double gap);
/// Circular distance of `gap` to the nearest pi k, in [0, pi/2].
double in_phase_distance(double gap);

/// Vacuum block: c10 = 0, or |c20| = |c30| with arg(c20 + c30) - arg(c10) = pi (k + 1/2).
/// Blocks m >= 2: c1 = 0, or |c3| = |c4| with arg(c3 + c4) - arg(c1) = pi k
/// (the condition under which |C|^2 - |B|^2 vanishes for all t).
SyncVerdict check_sync_balanced(const BalancedCoeffs& coeffs, const SyncTolerances& tol = {});

/// Blocks m >= 2: C_{-1,U} = 0, or |C_{-1,+1}| = |C_{-1,-1}|, |C_{+1,+1}| = |C_{+1,-1}| with
/// arg(C_{-1,+1} + C_{-1,-1}) - arg(C_{+1,+1} + C_{+1,-1}) = pi (k + 1/2).
/// Vacuum block: the balanced vacuum test on (G / sqrt 2) c_j.
/// These conditions hold only to first order in |g1 - g2|, so magnitude mismatches up to
/// twice the tolerance are still accepted and flagged "magnitude_near_miss".
SyncVerdict check_sync_unbalanced(const UnbalancedCoeffs& coeffs, const SyncTolerances& tol = {});

SyncVerdict check_sync(const BlockCoeffs& coeffs, const SyncTolerances& tol = {});

/// Labelled coefficient values in export order.
std::vector<std::pair<std::string, Complex>> labeled_coefficients(const BlockCoeffs& coeffs);

/// CSV `block,label,re,im,abs,arg` (arg in radians, %.17g).
std::string coefficient_csv(std::span<const BlockCoeffs> coeffs);
void write_coefficient_csv(std::span<const BlockCoeffs> coeffs, const std::string& path);

/// Inverse of coefficient_csv; g1, g2 restore the coupling constants not stored in the file.
/// Throws InvalidArgumentError for malformed input.
std::vector<BlockCoeffs> parse_coefficient_csv(std::string_view text, double g1, double g2);
std::vector<BlockCoeffs> read_coefficient_csv(const std::string& path, double g1, double g2);

/// CSV `block,mechanism,residual,value,flags`, one row per residual.
std::string verdict_csv(std::span<const SyncVerdict> verdicts);
void write_verdict_csv(std::span<const SyncVerdict> verdicts, const std::string& path);

}  // namespace dcesync
