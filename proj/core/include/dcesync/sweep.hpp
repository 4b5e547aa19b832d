#pragma once

// Two-dimensional (detuning axis x alpha0) grids of the windowed sz1/sz2 correlation.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcesync/hamiltonian.hpp"
#include "dcesync/observables.hpp"
#include "dcesync/propagator.hpp"

namespace dcesync {

/// delta_theta: theta2 = theta1 (1 - v);  delta_g: g2 = g1 (1 - v).
enum class SweepAxis { delta_theta, delta_g };

std::string_view to_string(SweepAxis axis);

enum class CutoffMode { fixed, converge };

struct SweepSpec {
    SystemParams base;
    double theta1 = 0.7853981633974483;
    double theta2 = 0.7853981633974483;
    SweepAxis axis = SweepAxis::delta_theta;
    std::vector<double> axis_values;
    std::vector<double> alpha0_values;
    PearsonWindow window;
    IntegratorConfig integrator;
    CutoffMode cutoff = CutoffMode::fixed;
    /// Cutoff for fixed mode and the starting cutoff for converge mode.
    int n_max = 40;
    double leakage_tol = 1e-2;
    /// Converge mode: double n_max until |C| moves by less than this.
    double pearson_tol = 1e-3;
    int max_n_max = 640;

    /// Throws InvalidArgumentError for empty axes or a window beyond integrator.t_end.
    void validate() const;

    /// Parameters and angles of cell (i, j) = (axis_values[i], alpha0_values[j]).
    SystemParams cell_params(std::size_t i, std::size_t j) const;
    double cell_theta2(std::size_t i) const;
};

enum class CellStatus { ok, zero_variance, truncation_error, divergence };

std::string_view to_string(CellStatus status);

struct SweepCell {
    double axis_value = 0.0;
    double alpha0 = 0.0;
    /// NaN unless status is ok.
    double pearson = 0.0;
    double abs_pearson = 0.0;
    int n_max_used = 0;
    CellStatus status = CellStatus::ok;
    std::string message;
};

struct SweepGrid {
    SweepAxis axis = SweepAxis::delta_theta;
    std::vector<double> axis_values;
    std::vector<double> alpha0_values;
    /// Row-major: row i = axis value, column j = alpha0.
    std::vector<SweepCell> cells;

    const SweepCell& cell(std::size_t i, std::size_t j) const { return cells.at(i * alpha0_values.size() + j); }
};

struct SweepOptions {
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 1;
    /// When set, cell (i, j) writes its trajectory to <dir>/cell_<i>_<j>.csv.
    std::optional<std::string> dump_dir;
};

/// Signed and absolute correlation of one trajectory; identical series give exactly 1.
/// Throws UndefinedCorrelationError for a zero-variance window on distinct series.
double cell_correlation(const Trajectory& trajectory, const PearsonWindow& window);

/// Runs one cell; never throws for physics failures (they land in the status).
SweepCell run_cell(const SweepSpec& spec, std::size_t i, std::size_t j, const std::optional<std::string>& dump_dir = {});

/// Result is independent of thread count and scheduling.
SweepGrid run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// CSV `axis_value,alpha0,pearson,abs_pearson,n_max_used,status`, row-major.
std::string grid_csv(const SweepGrid& grid);
void export_grid(const SweepGrid& grid, const std::string& path);

}  // namespace dcesync
