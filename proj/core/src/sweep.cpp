#include "dcesync/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "dcesync/error.hpp"
#include "dcesync/hilbert.hpp"

namespace dcesync {

namespace {

constexpr double identical_series_tol = 1e-12;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Attempt {
    double pearson;
    int n_max;
};

Attempt run_at(const SweepSpec& spec, const SystemParams& params, double theta2, int n_max,
               const std::optional<std::string>& dump_path) {
    const FockTruncation trunc(n_max, spec.leakage_tol);
    const Trajectory traj = evolve(prepare_initial(spec.theta1, theta2, trunc), spec.integrator, params);
    if (dump_path) write_trajectory_csv(traj, *dump_path);
    return {cell_correlation(traj, spec.window), n_max};
}

}  // namespace

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::delta_theta ? "delta_theta" : "delta_g"; }

std::string_view to_string(CellStatus status) {
    switch (status) {
        case CellStatus::ok: return "ok";
        case CellStatus::zero_variance: return "zero-variance";
        case CellStatus::truncation_error: return "truncation-error";
        case CellStatus::divergence: return "divergence";
    }
    return "ok";
}

void SweepSpec::validate() const {
    base.validate();
    integrator.validate();
    if (axis_values.empty() || alpha0_values.empty()) throw InvalidArgumentError("sweep axes must be non-empty");
    for (double v : axis_values)
        if (!std::isfinite(v)) throw InvalidArgumentError("sweep axis values must be finite");
    for (double a : alpha0_values)
        if (!std::isfinite(a)) throw InvalidArgumentError("alpha0 values must be finite");
    if (window.delta_t <= 0.0 || window.t_start < 0.0) throw InvalidArgumentError("invalid Pearson window");
    if (window.t_end() > integrator.t_end + 1e-9)
        throw InvalidArgumentError("Pearson window ends after the integration");
    if (n_max < 2 || max_n_max < n_max) throw InvalidArgumentError("invalid cutoff range");
    if (!(pearson_tol > 0.0)) throw InvalidArgumentError("pearson_tol must be positive");
    if (axis == SweepAxis::delta_g)
        for (double v : axis_values)
            if (!(base.g1 * (1.0 - v) > 0.0)) throw InvalidArgumentError("delta_g axis drives g2 to zero or below");
}

SystemParams SweepSpec::cell_params(std::size_t i, std::size_t j) const {
    SystemParams p = base;
    p.alpha0 = alpha0_values.at(j);
    if (axis == SweepAxis::delta_g) p.g2 = base.g1 * (1.0 - axis_values.at(i));
    return p;
}

double SweepSpec::cell_theta2(std::size_t i) const {
    return axis == SweepAxis::delta_theta ? theta1 * (1.0 - axis_values.at(i)) : theta2;
}

double cell_correlation(const Trajectory& trajectory, const PearsonWindow& window) {
    const double lo = window.t_start - 1e-9, hi = window.t_end() + 1e-9;
    bool identical = true;
    for (std::size_t k = 0; k < trajectory.times.size() && identical; ++k) {
        if (trajectory.times[k] < lo || trajectory.times[k] > hi) continue;
        identical = std::abs(trajectory.sz1[k] - trajectory.sz2[k]) <= identical_series_tol;
    }
    if (identical) return 1.0;
    return pearson(trajectory.sz1_series(), trajectory.sz2_series(), window);
}

SweepCell run_cell(const SweepSpec& spec, std::size_t i, std::size_t j, const std::optional<std::string>& dump_dir) {
    SweepCell cell;
    cell.axis_value = spec.axis_values.at(i);
    cell.alpha0 = spec.alpha0_values.at(j);
    const SystemParams params = spec.cell_params(i, j);
    const double theta2 = spec.cell_theta2(i);
    std::optional<std::string> dump_path;
    if (dump_dir)
        dump_path = (std::filesystem::path(*dump_dir) / ("cell_" + std::to_string(i) + "_" + std::to_string(j) + ".csv"))
                        .string();

    const auto fail = [&](CellStatus status, const std::string& what, int n_max) {
        cell.status = status;
        cell.message = what;
        cell.n_max_used = n_max;
        cell.pearson = cell.abs_pearson = std::numeric_limits<double>::quiet_NaN();
        return cell;
    };

    int n = spec.n_max;
    std::optional<Attempt> previous;
    while (true) {
        try {
            const Attempt a = run_at(spec, params, theta2, n, dump_path);
            const bool done = spec.cutoff == CutoffMode::fixed ||
                              (previous && std::abs(std::abs(a.pearson) - std::abs(previous->pearson)) < spec.pearson_tol);
            if (done) {
                cell.pearson = a.pearson;
                cell.abs_pearson = std::abs(a.pearson);
                cell.n_max_used = a.n_max;
                return cell;
            }
            previous = a;
        } catch (const TruncationError& e) {
            if (spec.cutoff == CutoffMode::fixed) return fail(CellStatus::truncation_error, e.what(), n);
            previous.reset();
        } catch (const UndefinedCorrelationError& e) {
            return fail(CellStatus::zero_variance, e.what(), n);
        } catch (const DivergenceError& e) {
            return fail(CellStatus::divergence, e.what(), n);
        }
        if (2 * n > spec.max_n_max)
            return fail(CellStatus::truncation_error, "cutoff did not converge below n_max " + std::to_string(spec.max_n_max), n);
        n *= 2;
    }
}

SweepGrid run_sweep(const SweepSpec& spec, const SweepOptions& options) {
    spec.validate();
    if (options.dump_dir) std::filesystem::create_directories(*options.dump_dir);

    SweepGrid grid;
    grid.axis = spec.axis;
    grid.axis_values = spec.axis_values;
    grid.alpha0_values = spec.alpha0_values;
    const std::size_t cols = spec.alpha0_values.size();
    const std::size_t total = spec.axis_values.size() * cols;
    grid.cells.resize(total);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                grid.cells[k] = run_cell(spec, k / cols, k % cols, options.dump_dir);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = total;
            }
        }
    };
    unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), total));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (error) std::rethrow_exception(error);
    return grid;
}

std::string grid_csv(const SweepGrid& grid) {
    std::string out = "axis_value,alpha0,pearson,abs_pearson,n_max_used,status\n";
    for (const SweepCell& c : grid.cells) {
        out += format_double(c.axis_value) + ',' + format_double(c.alpha0) + ',' + format_double(c.pearson) + ',' +
               format_double(c.abs_pearson) + ',' + std::to_string(c.n_max_used) + ',' +
               std::string(to_string(c.status)) + '\n';
    }
    return out;
}

void export_grid(const SweepGrid& grid, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << grid_csv(grid);
    if (!file) throw IoError("failed writing " + path);
}

}  // namespace dcesync
