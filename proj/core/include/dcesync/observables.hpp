#pragma once

#include <span>
#include <vector>

#include "dcesync/hilbert.hpp"

namespace dcesync {

/// <sz_mu> for qubit mu in {1, 2}. Throws InvalidArgumentError for other mu.
double sigma_z_expect(const StateVector& state, int mu);
double sigma_z_expect(std::span<const Complex> amplitudes, int mu);

/// <a^dag a>
double mean_photon(const StateVector& state);
double mean_photon(std::span<const Complex> amplitudes);

/// <a^dag a + sum_mu (sz_mu + 1)/2>
double mean_excitation(std::span<const Complex> amplitudes);

/// Population of each Fock level, summed over qubit states.
std::vector<double> fock_populations(std::span<const Complex> amplitudes);

/// Sampled real signal on a strictly increasing time grid.
class Series {
public:
    /// Throws InvalidArgumentError unless sizes match, size >= 2 and times strictly increase.
    Series(std::vector<double> times, std::vector<double> values);

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return times_.size(); }
    double front_time() const noexcept { return times_.front(); }
    double back_time() const noexcept { return times_.back(); }

    /// Linear interpolation; t must lie inside the support.
    double at(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

struct PearsonWindow {
    double t_start = 500.0;
    double delta_t = 1500.0;

    double t_end() const noexcept { return t_start + delta_t; }
};

/// Time average over the window (trapezoidal rule on the sample grid, endpoints linearly interpolated).
/// Throws OutOfRangeError when the window leaves the series support.
double windowed_mean(const Series& series, const PearsonWindow& window);

/// Windowed Pearson correlation C_dt(t). Both series must share one time grid.
/// Throws UndefinedCorrelationError when either series has zero variance over the window.
double pearson(const Series& s1, const Series& s2, const PearsonWindow& window);

/// C_dt(t) evaluated for every window start in `starts`.
std::vector<double> pearson_profile(const Series& s1, const Series& s2, double delta_t, std::span<const double> starts);

}  // namespace dcesync
