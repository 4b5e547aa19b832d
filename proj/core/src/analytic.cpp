#include "dcesync/analytic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dcesync/error.hpp"

namespace dcesync {

namespace {

using std::numbers::pi;
constexpr double balanced_g_tol = 1e-15;
constexpr double rank_tol = 1e-12;

Complex phase(double angle) { return std::polar(1.0, angle); }

void require_positive_coupling(double g, const char* name) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgumentError(std::string(name) + " must be positive and finite");
}

double sq(double x) { return x * x; }

// Closed-form matrices: columns are coefficient slots, rows are (A, B, C, D).
Eigen::Matrix4cd balanced_block_matrix(int m, double g, double t) {
    const double md = m;
    const double K = std::sqrt(2.0 * (2.0 * md - 1.0));
    const double root = std::sqrt(md) * std::sqrt(md - 1.0);
    const double half = K / (2.0 * std::sqrt(md - 1.0));
    const Complex ep = phase(g * K * t), em = phase(-g * K * t);
    Eigen::Matrix4cd M;
    M << 0.0, (1.0 - md) / root, md / root * ep, md / root * em,
        -1.0, 0.0, -half * ep, half * em,
        1.0, 0.0, -half * ep, half * em,
        0.0, 1.0, ep, em;
    return M;
}

Eigen::Matrix3cd balanced_vacuum_matrix(double g, double t) {
    const double w = std::sqrt(2.0) * g;
    const Complex ep = phase(w * t), em = phase(-w * t);
    Eigen::Matrix3cd M;
    M << 0.0, std::sqrt(2.0) * em, -std::sqrt(2.0) * ep,
        -1.0, em, ep,
        1.0, em, ep;
    return M;
}

Eigen::Matrix3cd unbalanced_vacuum_matrix(double g1, double g2, double t) {
    const double G = std::hypot(g1, g2);
    const Complex ep = phase(G * t), em = phase(-G * t);
    Eigen::Matrix3cd M;
    M << 0.0, G * em, -G * ep,
        -g1, g2 * em, g2 * ep,
        g2, g1 * em, g1 * ep;
    return M;
}

// (L + S (G^2 - 4 gx^2 m)) sqrt(2) M_S / (g1^2 - g2^2), rearranged so that nothing
// cancels as g2 -> g1.
double unbalanced_bc_factor(const UnbalancedBlockCoeffs& k, int S, bool first) {
    const double gx = first ? k.g1 : k.g2;
    const double m = k.m;
    const double G2 = sq(k.G());
    const double L = k.L();
    const double d = sq(k.g1) - sq(k.g2);
    const double rest = L - G2 + 4.0 * sq(gx) * m;  // strictly positive
    if (S > 0) {
        // L + G^2 - 4 gx^2 m = 8 gx^2 m (g1^2 - g2^2) s / rest, s = (1 - 2m) for g1, (2m - 1) for g2
        const double s = first ? (1.0 - 2.0 * m) : (2.0 * m - 1.0);
        return std::sqrt(2.0) * k.M(+1) * 8.0 * sq(gx) * m * s / rest;
    }
    // M_- / (g1^2 - g2^2) = sign(d) 2 sqrt(m (m - 1)) / M_+
    const double sign = d >= 0.0 ? 1.0 : -1.0;
    return std::sqrt(2.0) * rest * sign * 2.0 * std::sqrt(m * (m - 1.0)) / k.M(+1);
}

Eigen::Matrix4cd unbalanced_block_matrix(const UnbalancedBlockCoeffs& k, double t) {
    const double m = k.m;
    const double G2 = sq(k.G());
    const double L = k.L();
    const double root = std::sqrt(m) * std::sqrt(m - 1.0);
    Eigen::Matrix4cd M;
    for (int S : {+1, -1}) {
        const double a = (S > 0 ? G2 + L : G2 - L) / (4.0 * k.g1 * k.g2 * root);
        const double b = unbalanced_bc_factor(k, S, true) / (8.0 * k.g1 * m * std::sqrt(m - 1.0));
        const double c = unbalanced_bc_factor(k, S, false) / (8.0 * k.g2 * m * std::sqrt(m - 1.0));
        for (int U : {+1, -1}) {
            const auto col = static_cast<Eigen::Index>(UnbalancedBlockCoeffs::slot(S, U));
            const Complex e = phase(U * k.frequency(S) * t);
            M(0, col) = a * e;
            M(1, col) = static_cast<double>(S * U) * b * e;
            M(2, col) = -static_cast<double>(S * U) * c * e;
            M(3, col) = e;
        }
    }
    return M;
}

template <int N>
Eigen::Matrix<Complex, N, 1> solve_checked(const Eigen::Matrix<Complex, N, N>& M,
                                           const Eigen::Matrix<Complex, N, 1>& rhs, int block) {
    const Eigen::VectorXd s = Eigen::MatrixXcd(M).jacobiSvd().singularValues();
    if (!(s.minCoeff() > rank_tol * s.maxCoeff()))
        throw ExtractionError("closed-form system for block " + std::to_string(block) + " is singular");
    const Eigen::Matrix<Complex, N, 1> x = M.fullPivLu().solve(rhs);
    const double residual = (M * x - rhs).cwiseAbs().maxCoeff();
    if (!(residual < extraction_residual_tol))
        throw ExtractionError("reconstruction residual " + std::to_string(residual) + " for block " +
                              std::to_string(block));
    return x;
}

Eigen::Vector4cd block_vector(const BlockAmplitudes& b) { return {b.A, b.B, b.C, b.D}; }

BlockAmplitudes from_vector4(int block, const Eigen::Vector4cd& v) { return {block, v(0), v(1), v(2), v(3)}; }
BlockAmplitudes from_vector3(const Eigen::Vector3cd& v) { return {0, v(0), v(1), v(2), Complex{}}; }

void check_block(const InteractionAmplitudes& amps, int block) {
    if (block < 0 || block >= amps.n_max())
        throw OutOfRangeError("block " + std::to_string(block) + " outside the truncation");
}

double circular_distance(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    return std::min(r, period - r);
}

double arg_or_zero(Complex z) { return z == Complex{} ? 0.0 : std::arg(z); }

SyncVerdict vacuum_verdict(int block, Complex c1, Complex c2, Complex c3, const SyncTolerances& tol,
                           bool allow_near_miss) {
    SyncVerdict v;
    v.block = block;
    const double mismatch = std::abs(std::abs(c2) - std::abs(c3));
    const double gap = arg_or_zero(c2 + c3) - arg_or_zero(c1);
    const double dist = quadrature_distance(gap);
    v.residuals = {{"abs_c1", std::abs(c1)}, {"magnitude_mismatch", mismatch}, {"phase_distance", dist}};
    if (std::abs(c1) < tol.magnitude) {
        v.mechanism = SyncMechanism::coefficient_vanishing;
        return v;
    }
    const double limit = allow_near_miss ? 2.0 * tol.magnitude : tol.magnitude;
    if (mismatch < limit && dist < tol.phase) {
        v.mechanism = SyncMechanism::phase_quadrature;
        if (mismatch >= tol.magnitude) v.flags.emplace_back("magnitude_near_miss");
    }
    return v;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

double InteractionAmplitudes::norm() const noexcept {
    double s = 0.0;
    for (const auto* v : {&A, &B, &C, &D})
        for (const Complex& z : *v) s += std::norm(z);
    return std::sqrt(s);
}

double InteractionAmplitudes::block_population(int block) const {
    const auto pop = [](const std::vector<Complex>& v, int i) {
        return (i >= 0 && i < static_cast<int>(v.size())) ? std::norm(v[static_cast<std::size_t>(i)]) : 0.0;
    };
    return pop(A, block + 1) + pop(B, block) + pop(C, block) + pop(D, block - 1);
}

InteractionAmplitudes amplitudes_in_frame(const StateVector& state, double t, const SystemParams& params,
                                          Frame frame) {
    std::vector<Complex> raw(state.amplitudes().begin(), state.amplitudes().end());
    if (frame == Frame::interaction) apply_free_phase(raw, params, t, +1);
    const auto levels = static_cast<std::size_t>(state.truncation().n_max() + 1);
    InteractionAmplitudes out;
    out.t = t;
    out.A.resize(levels);
    out.B.resize(levels);
    out.C.resize(levels);
    out.D.resize(levels);
    for (std::size_t m = 0; m < levels; ++m) {
        out.A[m] = raw[4 * m + 0];
        out.B[m] = raw[4 * m + 1];
        out.C[m] = raw[4 * m + 2];
        out.D[m] = raw[4 * m + 3];
    }
    return out;
}

InteractionAmplitudes to_interaction_picture(const StateVector& state, double t, const SystemParams& params) {
    return amplitudes_in_frame(state, t, params, Frame::interaction);
}

StateVector to_schrodinger_picture(const InteractionAmplitudes& amps, const SystemParams& params,
                                   const FockTruncation& trunc) {
    if (amps.n_max() != trunc.n_max()) throw InvalidArgumentError("amplitude layout does not match truncation");
    std::vector<Complex> raw(trunc.dimension());
    for (std::size_t m = 0; m < amps.A.size(); ++m) {
        raw[4 * m + 0] = amps.A[m];
        raw[4 * m + 1] = amps.B[m];
        raw[4 * m + 2] = amps.C[m];
        raw[4 * m + 3] = amps.D[m];
    }
    apply_free_phase(raw, params, amps.t, -1);
    return StateVector(std::move(raw), trunc);
}

BlockAmplitudes block_amplitudes(const InteractionAmplitudes& amps, int block) {
    check_block(amps, block);
    const auto l = static_cast<std::size_t>(block);
    return {block, amps.A[l + 1], amps.B[l], amps.C[l], block > 0 ? amps.D[l - 1] : Complex{}};
}

double BalancedBlockCoeffs::K() const noexcept { return std::sqrt(2.0 * (2.0 * m - 1.0)); }

double UnbalancedVacuumCoeffs::G() const noexcept { return std::hypot(g1, g2); }

std::size_t UnbalancedBlockCoeffs::slot(int S, int U) {
    if ((S != 1 && S != -1) || (U != 1 && U != -1)) throw InvalidArgumentError("S and U must be +1 or -1");
    return static_cast<std::size_t>((S > 0 ? 0 : 2) + (U > 0 ? 0 : 1));
}

double UnbalancedBlockCoeffs::G() const noexcept { return std::hypot(g1, g2); }

double UnbalancedBlockCoeffs::L() const noexcept {
    const double G2 = sq(G());
    return std::sqrt(G2 * G2 + 16.0 * sq(g1) * sq(g2) * m * (m - 1.0));
}

double UnbalancedBlockCoeffs::M(int S) const {
    const double plus = std::sqrt(sq(G()) * (2.0 * m - 1.0) + L());
    if (S == 1) return plus;
    if (S == -1) return 2.0 * std::sqrt(m * (m - 1.0)) * std::abs(sq(g1) - sq(g2)) / plus;
    throw InvalidArgumentError("S must be +1 or -1");
}

double UnbalancedBlockCoeffs::frequency(int S) const { return std::sqrt(2.0) * M(S) / 2.0; }

int block_of(const BlockCoeffs& coeffs) {
    return std::visit(
        [](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, BalancedVacuumCoeffs> || std::is_same_v<T, UnbalancedVacuumCoeffs>)
                return 0;
            else
                return k.block();
        },
        coeffs);
}

std::optional<BalancedCoeffs> extract_balanced(const InteractionAmplitudes& amps, int block, double g) {
    require_positive_coupling(g, "g");
    check_block(amps, block);
    if (amps.block_population(block) < negligible_block_population) return std::nullopt;
    const BlockAmplitudes b = block_amplitudes(amps, block);
    if (block == 0) {
        const Eigen::Vector3cd x =
            solve_checked<3>(balanced_vacuum_matrix(g, amps.t), Eigen::Vector3cd(b.A, b.B, b.C), 0);
        return BalancedVacuumCoeffs{g, x(0), x(1), x(2)};
    }
    const int m = block + 1;
    const Eigen::Vector4cd x = solve_checked<4>(balanced_block_matrix(m, g, amps.t), block_vector(b), block);
    return BalancedBlockCoeffs{m, g, {x(0), x(1), x(2), x(3)}};
}

std::optional<UnbalancedCoeffs> extract_unbalanced(const InteractionAmplitudes& amps, int block, double g1,
                                                   double g2) {
    require_positive_coupling(g1, "g1");
    require_positive_coupling(g2, "g2");
    if (g1 == g2) throw ExtractionError("unbalanced closed form is degenerate for g1 == g2; use the balanced form");
    check_block(amps, block);
    if (amps.block_population(block) < negligible_block_population) return std::nullopt;
    const BlockAmplitudes b = block_amplitudes(amps, block);
    if (block == 0) {
        const Eigen::Vector3cd x =
            solve_checked<3>(unbalanced_vacuum_matrix(g1, g2, amps.t), Eigen::Vector3cd(b.A, b.B, b.C), 0);
        return UnbalancedVacuumCoeffs{g1, g2, x(0), x(1), x(2)};
    }
    UnbalancedBlockCoeffs k{block + 1, g1, g2, {}};
    const Eigen::Vector4cd x = solve_checked<4>(unbalanced_block_matrix(k, amps.t), block_vector(b), block);
    k.c = {x(0), x(1), x(2), x(3)};
    return k;
}

std::vector<BlockCoeffs> extract_all(const InteractionAmplitudes& amps, const SystemParams& params) {
    if (params.omega != params.omega_q1 || params.omega != params.omega_q2)
        throw InvalidArgumentError("closed forms require omega == omega_q1 == omega_q2");
    const bool balanced = std::abs(params.g1 - params.g2) <= balanced_g_tol;
    std::vector<BlockCoeffs> out;
    for (int l = 0; l < amps.n_max(); ++l) {
        if (balanced) {
            if (auto k = extract_balanced(amps, l, params.g1))
                std::visit([&](const auto& v) { out.emplace_back(v); }, *k);
        } else {
            if (auto k = extract_unbalanced(amps, l, params.g1, params.g2))
                std::visit([&](const auto& v) { out.emplace_back(v); }, *k);
        }
    }
    return out;
}

BlockAmplitudes analytic_evolve(const BlockCoeffs& coeffs, double t) {
    return std::visit(
        [t](const auto& k) -> BlockAmplitudes {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, BalancedVacuumCoeffs>) {
                return from_vector3(balanced_vacuum_matrix(k.g, t) * Eigen::Vector3cd(k.c10, k.c20, k.c30));
            } else if constexpr (std::is_same_v<T, UnbalancedVacuumCoeffs>) {
                return from_vector3(unbalanced_vacuum_matrix(k.g1, k.g2, t) * Eigen::Vector3cd(k.c1, k.c2, k.c3));
            } else if constexpr (std::is_same_v<T, BalancedBlockCoeffs>) {
                const Eigen::Vector4cd c(k.c[0], k.c[1], k.c[2], k.c[3]);
                return from_vector4(k.block(), balanced_block_matrix(k.m, k.g, t) * c);
            } else {
                const Eigen::Vector4cd c(k.c[0], k.c[1], k.c[2], k.c[3]);
                return from_vector4(k.block(), unbalanced_block_matrix(k, t) * c);
            }
        },
        coeffs);
}

BlockAmplitudes analytic_evolve_balanced(const BalancedCoeffs& coeffs, double t) {
    return std::visit([t](const auto& k) { return analytic_evolve(BlockCoeffs(k), t); }, coeffs);
}

BlockAmplitudes analytic_evolve_unbalanced(const UnbalancedCoeffs& coeffs, double t) {
    return std::visit([t](const auto& k) { return analytic_evolve(BlockCoeffs(k), t); }, coeffs);
}

InteractionAmplitudes evolve_blocks(const InteractionAmplitudes& reference, std::span<const BlockCoeffs> coeffs,
                                    double t) {
    InteractionAmplitudes out = reference;
    out.t = t;
    for (const BlockCoeffs& k : coeffs) {
        const BlockAmplitudes b = analytic_evolve(k, t);
        check_block(out, b.block);
        const auto l = static_cast<std::size_t>(b.block);
        out.A[l + 1] = b.A;
        out.B[l] = b.B;
        out.C[l] = b.C;
        if (l > 0) out.D[l - 1] = b.D;
    }
    return out;
}

double block_population(const BlockCoeffs& coeffs) {
    const BlockAmplitudes b = analytic_evolve(coeffs, 0.0);
    return std::norm(b.A) + std::norm(b.B) + std::norm(b.C) + std::norm(b.D);
}

DeltaSigmaZ delta_sigma_z_blocks(const InteractionAmplitudes& amps) {
    DeltaSigmaZ out;
    out.per_block.resize(amps.B.size());
    for (std::size_t l = 0; l < amps.B.size(); ++l) {
        out.per_block[l] = 2.0 * (std::norm(amps.C[l]) - std::norm(amps.B[l]));
        out.total += out.per_block[l];
    }
    return out;
}

double dark_state_probability(const BalancedVacuumCoeffs& coeffs) { return std::norm(coeffs.c10); }

std::string_view to_string(SyncMechanism mechanism) {
    switch (mechanism) {
        case SyncMechanism::coefficient_vanishing: return "coefficient-vanishing";
        case SyncMechanism::phase_quadrature: return "phase-quadrature";
        case SyncMechanism::none: return "none";
    }
    return "none";
}

double SyncVerdict::residual(std::string_view name) const {
    for (const auto& [key, value] : residuals)
        if (key == name) return value;
    throw InvalidArgumentError("no residual named " + std::string(name));
}

bool SyncVerdict::has_flag(std::string_view flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double quadrature_distance(double gap) { return circular_distance(gap - pi / 2.0, pi); }

double in_phase_distance(double gap) { return circular_distance(gap, pi); }

SyncVerdict check_sync_balanced(const BalancedCoeffs& coeffs, const SyncTolerances& tol) {
    if (const auto* v = std::get_if<BalancedVacuumCoeffs>(&coeffs))
        return vacuum_verdict(0, v->c10, v->c20, v->c30, tol, false);
    const auto& k = std::get<BalancedBlockCoeffs>(coeffs);
    SyncVerdict v;
    v.block = k.block();
    const double mismatch = std::abs(std::abs(k.c[2]) - std::abs(k.c[3]));
    const double dist = in_phase_distance(arg_or_zero(k.c[2] + k.c[3]) - arg_or_zero(k.c[0]));
    v.residuals = {{"abs_c1", std::abs(k.c[0])}, {"magnitude_mismatch", mismatch}, {"phase_distance", dist}};
    if (std::abs(k.c[0]) < tol.magnitude)
        v.mechanism = SyncMechanism::coefficient_vanishing;
    else if (mismatch < tol.magnitude && dist < tol.phase)
        v.mechanism = SyncMechanism::phase_quadrature;
    return v;
}

SyncVerdict check_sync_unbalanced(const UnbalancedCoeffs& coeffs, const SyncTolerances& tol) {
    if (const auto* u = std::get_if<UnbalancedVacuumCoeffs>(&coeffs)) {
        const double s = u->G() / std::sqrt(2.0);
        return vacuum_verdict(0, s * u->c1, s * u->c2, s * u->c3, tol, true);
    }
    const auto& k = std::get<UnbalancedBlockCoeffs>(coeffs);
    SyncVerdict v;
    v.block = k.block();
    const Complex pp = k.at(1, 1), pm = k.at(1, -1), mp = k.at(-1, 1), mm = k.at(-1, -1);
    const double vanish = std::max(std::abs(mp), std::abs(mm));
    const double mismatch_minus = std::abs(std::abs(mp) - std::abs(mm));
    const double mismatch_plus = std::abs(std::abs(pp) - std::abs(pm));
    const double dist = quadrature_distance(arg_or_zero(mp + mm) - arg_or_zero(pp + pm));
    v.residuals = {{"abs_c_minus", vanish},
                   {"magnitude_mismatch_minus", mismatch_minus},
                   {"magnitude_mismatch_plus", mismatch_plus},
                   {"phase_distance", dist}};
    if (std::abs(k.g1 - k.g2) > 0.1 * std::min(k.g1, k.g2)) v.flags.emplace_back("coupling_not_near_degenerate");
    if (vanish < tol.magnitude) {
        v.mechanism = SyncMechanism::coefficient_vanishing;
        return v;
    }
    const double worst = std::max(mismatch_minus, mismatch_plus);
    if (worst < 2.0 * tol.magnitude && dist < tol.phase) {
        v.mechanism = SyncMechanism::phase_quadrature;
        if (worst >= tol.magnitude) v.flags.emplace_back("magnitude_near_miss");
    }
    return v;
}

SyncVerdict check_sync(const BlockCoeffs& coeffs, const SyncTolerances& tol) {
    return std::visit(
        [&](const auto& k) -> SyncVerdict {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, BalancedVacuumCoeffs> || std::is_same_v<T, BalancedBlockCoeffs>)
                return check_sync_balanced(k, tol);
            else
                return check_sync_unbalanced(k, tol);
        },
        coeffs);
}

std::vector<std::pair<std::string, Complex>> labeled_coefficients(const BlockCoeffs& coeffs) {
    return std::visit(
        [](const auto& k) -> std::vector<std::pair<std::string, Complex>> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, BalancedVacuumCoeffs>)
                return {{"C10", k.c10}, {"C20", k.c20}, {"C30", k.c30}};
            else if constexpr (std::is_same_v<T, UnbalancedVacuumCoeffs>)
                return {{"C1", k.c1}, {"C2", k.c2}, {"C3", k.c3}};
            else if constexpr (std::is_same_v<T, BalancedBlockCoeffs>)
                return {{"C1", k.c[0]}, {"C2", k.c[1]}, {"C3", k.c[2]}, {"C4", k.c[3]}};
            else
                return {{"C+1+1", k.c[0]}, {"C+1-1", k.c[1]}, {"C-1+1", k.c[2]}, {"C-1-1", k.c[3]}};
        },
        coeffs);
}

std::string coefficient_csv(std::span<const BlockCoeffs> coeffs) {
    std::string out = "block,label,re,im,abs,arg\n";
    for (const BlockCoeffs& k : coeffs) {
        const std::string block = std::to_string(block_of(k));
        for (const auto& [label, z] : labeled_coefficients(k)) {
            out += block + ',' + label + ',' + format_double(z.real()) + ',' + format_double(z.imag()) + ',' +
                   format_double(std::abs(z)) + ',' + format_double(std::arg(z)) + '\n';
        }
    }
    return out;
}

namespace {

void write_text(const std::string& text, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << text;
    if (!file) throw IoError("failed writing " + path);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

double parse_number(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgumentError("line " + std::to_string(line) + ": bad number '" + s + "'");
}

}  // namespace

void write_coefficient_csv(std::span<const BlockCoeffs> coeffs, const std::string& path) {
    write_text(coefficient_csv(coeffs), path);
}

std::vector<BlockCoeffs> parse_coefficient_csv(std::string_view text, double g1, double g2) {
    struct Row {
        int block;
        std::string label;
        Complex value;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != "block,label,re,im,abs,arg")
                throw InvalidArgumentError("line 1: expected header block,label,re,im,abs,arg");
            header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 6) throw InvalidArgumentError("line " + std::to_string(number) + ": expected 6 fields");
        const double block = parse_number(f[0], number);
        if (block < 0 || block != std::floor(block))
            throw InvalidArgumentError("line " + std::to_string(number) + ": bad block index");
        rows.push_back({static_cast<int>(block), f[1], {parse_number(f[2], number), parse_number(f[3], number)}, number});
    }
    if (!header) throw InvalidArgumentError("empty coefficient file");

    std::vector<BlockCoeffs> out;
    std::size_t i = 0;
    const auto take = [&](int block, std::initializer_list<const char*> labels) {
        std::vector<Complex> values;
        for (const char* label : labels) {
            if (i >= rows.size() || rows[i].block != block || rows[i].label != label)
                throw InvalidArgumentError("line " + std::to_string(i < rows.size() ? rows[i].line : number) +
                                           ": expected label " + label + " for block " + std::to_string(block));
            values.push_back(rows[i++].value);
        }
        return values;
    };
    while (i < rows.size()) {
        const Row& r = rows[i];
        if (r.block == 0 && r.label == "C10") {
            const auto v = take(0, {"C10", "C20", "C30"});
            out.emplace_back(BalancedVacuumCoeffs{g1, v[0], v[1], v[2]});
        } else if (r.block == 0 && r.label == "C1") {
            const auto v = take(0, {"C1", "C2", "C3"});
            out.emplace_back(UnbalancedVacuumCoeffs{g1, g2, v[0], v[1], v[2]});
        } else if (r.block > 0 && r.label == "C1") {
            const auto v = take(r.block, {"C1", "C2", "C3", "C4"});
            out.emplace_back(BalancedBlockCoeffs{r.block + 1, g1, {v[0], v[1], v[2], v[3]}});
        } else if (r.block > 0 && r.label == "C+1+1") {
            const auto v = take(r.block, {"C+1+1", "C+1-1", "C-1+1", "C-1-1"});
            out.emplace_back(UnbalancedBlockCoeffs{r.block + 1, g1, g2, {v[0], v[1], v[2], v[3]}});
        } else {
            throw InvalidArgumentError("line " + std::to_string(r.line) + ": unexpected label " + r.label);
        }
    }
    return out;
}

std::vector<BlockCoeffs> read_coefficient_csv(const std::string& path, double g1, double g2) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_coefficient_csv(buf.str(), g1, g2);
}

std::string verdict_csv(std::span<const SyncVerdict> verdicts) {
    std::string out = "block,mechanism,residual,value,flags\n";
    for (const SyncVerdict& v : verdicts) {
        std::string flags;
        for (const auto& f : v.flags) flags += (flags.empty() ? "" : ";") + f;
        for (const auto& [name, value] : v.residuals) {
            out += std::to_string(v.block) + ',' + std::string(to_string(v.mechanism)) + ',' + name + ',' +
                   format_double(value) + ',' + flags + '\n';
        }
    }
    return out;
}

void write_verdict_csv(std::span<const SyncVerdict> verdicts, const std::string& path) {
    write_text(verdict_csv(verdicts), path);
}

}  // namespace dcesync
