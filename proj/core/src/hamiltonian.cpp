#include "dcesync/hamiltonian.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dcesync/error.hpp"

namespace dcesync {

namespace {

constexpr std::array<QubitLevel, 2> kLevels{QubitLevel::g, QubitLevel::e};

double free_energy(const SystemParams& p, QubitLevel q1, QubitLevel q2, int m) {
    return p.omega * m + 0.5 * (p.omega_q1 * sigma_z(q1) + p.omega_q2 * sigma_z(q2));
}

}  // namespace

void SystemParams::validate() const {
    const std::array<std::pair<const char*, double>, 8> fields{{{"omega", omega},
                                                                {"omega_q1", omega_q1},
                                                                {"omega_q2", omega_q2},
                                                                {"g1", g1},
                                                                {"g2", g2},
                                                                {"alpha0", alpha0},
                                                                {"omega_d", omega_d},
                                                                {"tau", tau}}};
    for (const auto& [name, value] : fields) {
        if (!std::isfinite(value)) throw InvalidArgumentError(std::string(name) + " must be finite");
    }
    if (tau < 0.0) throw InvalidArgumentError("tau must be non-negative");
}

SparseOperator build_tc(const SystemParams& params, const FockTruncation& trunc) {
    std::vector<SparseOperator::Entry> entries;
    entries.reserve(trunc.dimension() * 3);
    const int n_max = trunc.n_max();
    for (int m = 0; m <= n_max; ++m) {
        for (auto q1 : kLevels) {
            for (auto q2 : kLevels) {
                const auto i = basis_index(q1, q2, m, trunc);
                entries.push_back({i, i, free_energy(params, q1, q2, m)});
            }
        }
        if (m == 0) continue;
        const double amp = std::sqrt(static_cast<double>(m));
        // s+_1 a : |g, q2, m> -> sqrt(m) |e, q2, m-1>
        for (auto q2 : kLevels) {
            const auto from = basis_index(QubitLevel::g, q2, m, trunc);
            const auto to = basis_index(QubitLevel::e, q2, m - 1, trunc);
            entries.push_back({to, from, params.g1 * amp});
            entries.push_back({from, to, params.g1 * amp});
        }
        // s+_2 a : |q1, g, m> -> sqrt(m) |q1, e, m-1>
        for (auto q1 : kLevels) {
            const auto from = basis_index(q1, QubitLevel::g, m, trunc);
            const auto to = basis_index(q1, QubitLevel::e, m - 1, trunc);
            entries.push_back({to, from, params.g2 * amp});
            entries.push_back({from, to, params.g2 * amp});
        }
    }
    return SparseOperator(trunc.dimension(), std::move(entries));
}

SparseOperator build_drive(const FockTruncation& trunc) {
    std::vector<SparseOperator::Entry> entries;
    entries.reserve(trunc.dimension() * 3);
    const int n_max = trunc.n_max();
    for (int m = 0; m <= n_max; ++m) {
        for (auto q1 : kLevels) {
            for (auto q2 : kLevels) {
                const auto i = basis_index(q1, q2, m, trunc);
                entries.push_back({i, i, 2.0 * m + 1.0});
                if (m + 2 <= n_max) {
                    const auto j = basis_index(q1, q2, m + 2, trunc);
                    const double v = std::sqrt(static_cast<double>(m + 1) * (m + 2));
                    entries.push_back({j, i, v});
                    entries.push_back({i, j, v});
                }
            }
        }
    }
    return SparseOperator(trunc.dimension(), std::move(entries));
}

SparseOperator build_excitation_number(const FockTruncation& trunc) {
    std::vector<SparseOperator::Entry> entries;
    for (std::size_t i = 0; i < trunc.dimension(); ++i) {
        const auto label = basis_label(i, trunc);
        const double n = label.m + (label.q1 == QubitLevel::e ? 1 : 0) + (label.q2 == QubitLevel::e ? 1 : 0);
        entries.push_back({i, i, n});
    }
    return SparseOperator(trunc.dimension(), std::move(entries));
}

SparseOperator build_free(const SystemParams& params, const FockTruncation& trunc) {
    std::vector<SparseOperator::Entry> entries;
    for (std::size_t i = 0; i < trunc.dimension(); ++i) {
        const auto label = basis_label(i, trunc);
        entries.push_back({i, i, free_energy(params, label.q1, label.q2, label.m)});
    }
    return SparseOperator(trunc.dimension(), std::move(entries));
}

double alpha_at(double t, const SystemParams& params) noexcept {
    if (t > params.tau) return 0.0;
    return params.alpha0 * std::cos(params.omega_d * t);
}

SparseOperator hamiltonian_at(double t, const SparseOperator& h_tc, const SparseOperator& drive,
                              const SystemParams& params) {
    if (h_tc.dimension() != drive.dimension()) {
        throw InvalidArgumentError("H_TC and drive operator differ in dimension");
    }
    const double a = alpha_at(t, params);
    if (a == 0.0) return h_tc;
    return h_tc + drive.scaled(a);
}

}  // namespace dcesync

namespace dcesync {

void apply_free_phase(std::span<Complex> amplitudes, const SystemParams& params, double t, int sign) {
    const double s = sign >= 0 ? 1.0 : -1.0;
    const double half1 = 0.5 * params.omega_q1, half2 = 0.5 * params.omega_q2;
    const std::array<Complex, 4> qubit_phase{std::polar(1.0, s * t * (-half1 - half2)),
                                             std::polar(1.0, s * t * (-half1 + half2)),
                                             std::polar(1.0, s * t * (half1 - half2)),
                                             std::polar(1.0, s * t * (half1 + half2))};
    const std::size_t levels = amplitudes.size() / 4;
    for (std::size_t m = 0; m < levels; ++m) {
        const Complex cavity = std::polar(1.0, s * t * params.omega * static_cast<double>(m));
        for (std::size_t q = 0; q < 4; ++q) amplitudes[4 * m + q] *= cavity * qubit_phase[q];
    }
}

}  // namespace dcesync
