#include "dcesync/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcesync/error.hpp"

namespace dcesync {

double sigma_z_expect(std::span<const Complex> amplitudes, int mu) {
    if (mu != 1 && mu != 2) throw InvalidArgumentError("qubit index must be 1 or 2, got " + std::to_string(mu));
    const std::size_t bit = mu == 1 ? 2u : 1u;
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double p = std::norm(amplitudes[i]);
        sum += (i & bit) ? p : -p;
    }
    return sum;
}

double sigma_z_expect(const StateVector& state, int mu) { return sigma_z_expect(state.amplitudes(), mu); }

double mean_photon(std::span<const Complex> amplitudes) {
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) sum += static_cast<double>(i / 4) * std::norm(amplitudes[i]);
    return sum;
}

double mean_photon(const StateVector& state) { return mean_photon(state.amplitudes()); }

double mean_excitation(std::span<const Complex> amplitudes) {
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double n = static_cast<double>(i / 4) + ((i & 2u) ? 1 : 0) + ((i & 1u) ? 1 : 0);
        sum += n * std::norm(amplitudes[i]);
    }
    return sum;
}

std::vector<double> fock_populations(std::span<const Complex> amplitudes) {
    std::vector<double> pops(amplitudes.size() / 4, 0.0);
    for (std::size_t i = 0; i < amplitudes.size(); ++i) pops[i / 4] += std::norm(amplitudes[i]);
    return pops;
}

Series::Series(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size()) throw InvalidArgumentError("series times and values differ in length");
    if (times_.size() < 2) throw InvalidArgumentError("series needs at least two samples");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw InvalidArgumentError("series times must strictly increase");
    }
}

double Series::at(double t) const {
    if (t < times_.front() || t > times_.back()) throw OutOfRangeError("time outside series support");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return values_.back();
    const auto hi = static_cast<std::size_t>(it - times_.begin());
    const auto lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
}

namespace {

// Relative slack when matching window edges to sample times.
constexpr double kGridSlack = 1e-9;

struct Quadrature {
    std::vector<double> weights;
    std::vector<double> x;
    std::vector<double> y;
};

// Trapezoid nodes for [t_start, t_end]: interpolated endpoints plus every interior sample.
template <typename Fill>
Quadrature window_nodes(std::span<const double> times, const PearsonWindow& window, Fill fill) {
    if (!(window.delta_t > 0.0)) throw InvalidArgumentError("window length must be positive");
    const double a = window.t_start, b = window.t_end();
    const double slack = kGridSlack * std::max(1.0, std::abs(b));
    if (a < times.front() - slack || b > times.back() + slack) {
        throw OutOfRangeError("window [" + std::to_string(a) + ", " + std::to_string(b) +
                              "] outside series support [" + std::to_string(times.front()) + ", " +
                              std::to_string(times.back()) + "]");
    }
    std::vector<double> nodes;
    nodes.push_back(a);
    auto first = std::upper_bound(times.begin(), times.end(), a + slack);
    for (auto it = first; it != times.end() && *it < b - slack; ++it) nodes.push_back(*it);
    nodes.push_back(b);

    Quadrature q;
    q.weights.assign(nodes.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double h = 0.5 * (nodes[i + 1] - nodes[i]);
        q.weights[i] += h;
        q.weights[i + 1] += h;
    }
    fill(nodes, q);
    return q;
}

double interpolate(std::span<const double> times, std::span<const double> values, double t) {
    const double slack = kGridSlack * std::max(1.0, std::abs(t));
    if (t <= times.front() + slack) return values.front();
    if (t >= times.back() - slack) return values.back();
    auto it = std::lower_bound(times.begin(), times.end(), t);
    const auto hi = static_cast<std::size_t>(it - times.begin());
    if (std::abs(times[hi] - t) <= slack) return values[hi];
    const auto lo = hi - 1;
    if (std::abs(times[lo] - t) <= slack) return values[lo];
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

bool same_grid(const Series& a, const Series& b) {
    return std::equal(a.times().begin(), a.times().end(), b.times().begin(), b.times().end());
}

}  // namespace

double windowed_mean(const Series& series, const PearsonWindow& window) {
    const auto q = window_nodes(series.times(), window, [&](const std::vector<double>& nodes, Quadrature& out) {
        for (double t : nodes) out.x.push_back(interpolate(series.times(), series.values(), t));
    });
    double sum = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) sum += q.weights[i] * q.x[i];
    return sum / window.delta_t;
}

double pearson(const Series& s1, const Series& s2, const PearsonWindow& window) {
    if (!same_grid(s1, s2)) throw InvalidArgumentError("pearson requires both series on one time grid");
    const auto q = window_nodes(s1.times(), window, [&](const std::vector<double>& nodes, Quadrature& out) {
        for (double t : nodes) {
            out.x.push_back(interpolate(s1.times(), s1.values(), t));
            out.y.push_back(interpolate(s2.times(), s2.values(), t));
        }
    });
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        mx += q.weights[i] * q.x[i];
        my += q.weights[i] * q.y[i];
    }
    mx /= window.delta_t;
    my /= window.delta_t;

    double sxy = 0.0, sxx = 0.0, syy = 0.0, scale_x = 0.0, scale_y = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        const double dx = q.x[i] - mx, dy = q.y[i] - my;
        sxy += q.weights[i] * (dx * dy);
        sxx += q.weights[i] * dx * dx;
        syy += q.weights[i] * dy * dy;
        scale_x = std::max(scale_x, std::abs(q.x[i]));
        scale_y = std::max(scale_y, std::abs(q.y[i]));
    }
    // Variance at the level of rounding noise counts as zero.
    const auto negligible = [&](double s, double scale) {
        const double floor = 1e-13 * std::max(scale, 1e-300);
        return s <= floor * floor * window.delta_t;
    };
    if (negligible(sxx, scale_x) || negligible(syy, scale_y)) {
        throw UndefinedCorrelationError("correlation undefined: series constant over window starting at " +
                                        std::to_string(window.t_start));
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> pearson_profile(const Series& s1, const Series& s2, double delta_t,
                                    std::span<const double> starts) {
    std::vector<double> out;
    out.reserve(starts.size());
    for (double t : starts) out.push_back(pearson(s1, s2, PearsonWindow{t, delta_t}));
    return out;
}

}  // namespace dcesync
