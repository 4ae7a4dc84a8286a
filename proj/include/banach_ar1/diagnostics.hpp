#pragma once

#include "banach_ar1/estimation.hpp"
#include "banach_ar1/model.hpp"
#include "banach_ar1/wavelet.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace banach_ar1::diagnostics {

/// Where the spectrum behind a_j, Lambda and xi came from.
enum class SpectrumMode { Model, Empirical };

std::string_view to_string(SpectrumMode mode);

struct TraceDiagnostics {
    double trace_sum = 0.0;  ///< sum_j ||phi_j||_H^2 over the retained modes
    double n_sup = 0.0;      ///< max_m sum_j F_m(phi_j)^2
    double v_sup = 0.0;      ///< max_j ||phi_j||_B
    int modes = 0;           ///< truncation in j
    int max_level = 0;       ///< truncation in wavelet level
};

struct ConsistencyReport {
    int n = 0;
    int k_n = 0;
    double lambda = 0.0;
    double a_sum = 0.0;
    double ratio = 0.0;
    double xi = 0.0;
    double trace_check = 0.0;
    double n_sup = 0.0;
    double v_sup = 0.0;
    SpectrumMode mode = SpectrumMode::Model;
    int modes = 0;
    int max_level = 0;
};

struct ExperimentResult {
    int n = 0;
    int replication = 0;
    double error_B = 0.0;
    double xi = 0.0;
    bool exceeded = false;  ///< error_B > xi
    double squared_error_B = 0.0;

    static ExperimentResult make(int n, int replication, double error_B, double xi);
};

/// (k_n C_{k_n}^{-1} sum_{j<=k_n} a_j) / sqrt(n / ln n).
double consistency_ratio(int n, int k_n, std::span<const double> c_values, std::span<const double> a_values);

/// exp(-n / (C_{k_n}^{-2} k_n^2 (sum_{j<=k_n} a_j)^2)).
double error_bound_xi(int n, int k_n, std::span<const double> c_values, std::span<const double> a_values);

/// Gathers Lambda, sum a_j, the ratio and xi for one sample size. `spectrum` needs k_n + 1 values.
ConsistencyReport consistency_report(int n, int k_n, std::span<const double> spectrum, SpectrumMode mode,
                                     const TraceDiagnostics& trace);

struct ExceedanceRow {
    int n = 0;
    int total = 0;
    int exceeded = 0;
    double proportion = 0.0;
};

/// Per-n count of exceedances, ascending in n.
std::vector<ExceedanceRow> exceedance_table(std::span<const ExperimentResult> results);

struct MseRow {
    int n = 0;
    double mean_sq_error_B = 0.0;
    double reference = 0.0;  ///< n^{-1/4}
};

std::vector<MseRow> empirical_mse_curve(std::span<const ExperimentResult> results);

/// `eigenfunctions` holds one grid-evaluated eigenfunction per row.
TraceDiagnostics basis_trace_diagnostics(const Eigen::MatrixXd& eigenfunctions, const wavelet::BasisSpec& spec);

struct EigenDecayRow {
    int n = 0;
    int j = 0;
    double value = 0.0;
};

/// The first k_n empirical eigenvalues.
std::vector<EigenDecayRow> eigen_decay_report(const estimation::EstimatorState& state);

/// Frobenius norm of A - B.
double hs_distance(const model::SpectralOperator& a, const model::SpectralOperator& b);

}  // namespace banach_ar1::diagnostics
