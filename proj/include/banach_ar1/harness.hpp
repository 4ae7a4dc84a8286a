#pragma once

#include "banach_ar1/diagnostics.hpp"
#include "banach_ar1/estimation.hpp"
#include "banach_ar1/model.hpp"
#include "banach_ar1/wavelet.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace banach_ar1::harness {

enum class InitialCondition { TruncatedGaussian, Zero };

/**
 * Everything one Monte Carlo run needs. Parsed from a line-oriented file:
 *
 *     # comment
 *     key = value
 *
 * Keys (defaults in brackets):
 *   beta [0.6]  gamma [1.21]  width [0.4]  modes [50]  grid_len [2048]
 *   wavelet_order [10]  coarse_level [2]  max_level [log2(grid_len) - 1]
 *   sample_sizes [500, 2000, 8000]  replications [50]
 *   truncation [logceil | fixed:K]  burn_in [0, or 500 with initial_condition = zero]
 *   initial_condition [truncated_gaussian | zero]
 *   spline_mode [false]  coarse_step [0.0372]
 *   noise_psd_repair [clip | strict]  j0_max [10]  kernel_points [64]
 *   output_dir [out]  seed [20240601]
 */
struct ExperimentConfig {
    model::ModelParams model;
    wavelet::BasisSpec wavelet;
    std::vector<int> sample_sizes{500, 2000, 8000};
    int replications = 50;
    estimation::TruncationRule truncation = estimation::TruncationRule::log_ceil();
    InitialCondition initial_condition = InitialCondition::TruncatedGaussian;
    std::optional<int> burn_in;  ///< unset: 0 for the truncated Gaussian start, 500 otherwise
    bool spline_mode = false;
    double coarse_step = 0.0372;
    model::PsdRepair psd_repair = model::PsdRepair::Clip;
    int j0_max = 10;
    int kernel_points = 64;
    std::filesystem::path output_dir = "out";
    std::uint64_t master_seed = 20240601;

    int effective_burn_in() const;
    void validate() const;
};

/// Parses the key = value format; unknown keys and malformed lines throw ConfigError
/// with the line number.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Seed of replication r at sample size n.
std::uint64_t replication_seed(std::uint64_t master_seed, int n, int replication);

/// The model pieces shared by every replication.
struct ModelSetup {
    model::ModelParams params;
    model::SpectralOperator covariance;
    model::SpectralOperator rho;
    model::NoiseCovariance noise;
    model::StationarityCheck stationarity;
    double tail_mass = 0.0;  ///< sum_{j>p} C_j, dropped by the truncation to p modes
    diagnostics::TraceDiagnostics trace;
};

/// Builds C, rho and C_eps and enforces the stationarity gate (ModelGateError).
ModelSetup build_model(const ExperimentConfig& config);

struct KernelPoint {
    double s = 0.0;
    double t = 0.0;
    double value = 0.0;
};

std::vector<KernelPoint> kernel_surface(const model::SpectralOperator& covariance, int points);

struct ExperimentOutput {
    std::vector<diagnostics::ExperimentResult> results;      ///< sorted by (n, replication)
    std::vector<diagnostics::ConsistencyReport> reports;     ///< one per sample size
    std::vector<diagnostics::EigenDecayRow> eigen_decay;     ///< replication 0 of every n
    std::vector<KernelPoint> kernel;
    std::vector<std::string> log_lines;
};

/// Simulates, fits and scores every (n, replication) pair. Replications run on
/// `threads` workers; results do not depend on the thread count.
ExperimentOutput run_experiment(const ExperimentConfig& config, int threads = 1);

/// Writes results.csv, exceedance_table.csv, mse_curve.csv, consistency.csv,
/// eigen_decay.csv, kernel_surface.csv, run_log.txt and the SVG charts.
void write_outputs(const ExperimentOutput& output, const std::filesystem::path& dir);

// CSV emission, one schema per table.
std::string results_csv(std::span<const diagnostics::ExperimentResult> results);
std::string exceedance_csv(std::span<const diagnostics::ExceedanceRow> rows);
std::string mse_csv(std::span<const diagnostics::MseRow> rows);
std::string consistency_csv(std::span<const diagnostics::ConsistencyReport> rows);
std::string eigen_decay_csv(std::span<const diagnostics::EigenDecayRow> rows);
std::string kernel_csv(std::span<const KernelPoint> rows);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Estimator bundle: estimator_meta.csv, estimator_eigenvalues.csv,
/// estimator_eigenvectors.csv, estimator_d_matrix.csv, estimator_rho_hat.csv.
void save_estimator(const estimation::EstimatorState& state, const std::filesystem::path& dir);
estimation::EstimatorState load_estimator(const std::filesystem::path& dir);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

/// Minimal SVG line chart.
std::string svg_line_chart(std::span<const Series> series, const ChartOptions& options);

}  // namespace banach_ar1::harness
