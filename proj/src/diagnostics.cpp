#include "banach_ar1/diagnostics.hpp"

#include "banach_ar1/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace banach_ar1::diagnostics {

namespace {

void check_inputs(int n, int k_n, std::span<const double> c_values, std::span<const double> a_values) {
    if (n < 2) {
        throw ConfigError("sample size must be >= 2");
    }
    if (k_n < 1 || c_values.size() < static_cast<std::size_t>(k_n) ||
        a_values.size() < static_cast<std::size_t>(k_n)) {
        throw ConfigError("need k_n >= 1 eigenvalues and gap quantities");
    }
    if (!(c_values[k_n - 1] > 0.0)) {
        throw NumericError("C_{k_n} must be positive");
    }
}

double numerator(int k_n, std::span<const double> c_values, std::span<const double> a_values) {
    const double a_sum = std::accumulate(a_values.begin(), a_values.begin() + k_n, 0.0);
    return static_cast<double>(k_n) * a_sum / c_values[k_n - 1];
}

}  // namespace

std::string_view to_string(SpectrumMode mode) {
    return mode == SpectrumMode::Model ? "model" : "empirical";
}

ExperimentResult ExperimentResult::make(int n, int replication, double error_B, double xi) {
    return {n, replication, error_B, xi, error_B > xi, error_B * error_B};
}

double consistency_ratio(int n, int k_n, std::span<const double> c_values, std::span<const double> a_values) {
    check_inputs(n, k_n, c_values, a_values);
    const double nn = static_cast<double>(n);
    return numerator(k_n, c_values, a_values) / std::sqrt(nn / std::log(nn));
}

double error_bound_xi(int n, int k_n, std::span<const double> c_values, std::span<const double> a_values) {
    check_inputs(n, k_n, c_values, a_values);
    const double q = numerator(k_n, c_values, a_values);
    return std::exp(-static_cast<double>(n) / (q * q));
}

ConsistencyReport consistency_report(int n, int k_n, std::span<const double> spectrum, SpectrumMode mode,
                                     const TraceDiagnostics& trace) {
    const auto a = estimation::spectral_gap_a(spectrum, k_n);
    ConsistencyReport r;
    r.n = n;
    r.k_n = k_n;
    r.lambda = estimation::lambda_kn(spectrum, k_n);
    r.a_sum = std::accumulate(a.begin(), a.end(), 0.0);
    r.ratio = consistency_ratio(n, k_n, spectrum, a);
    r.xi = error_bound_xi(n, k_n, spectrum, a);
    r.trace_check = trace.trace_sum;
    r.n_sup = trace.n_sup;
    r.v_sup = trace.v_sup;
    r.mode = mode;
    r.modes = trace.modes;
    r.max_level = trace.max_level;
    return r;
}

std::vector<ExceedanceRow> exceedance_table(std::span<const ExperimentResult> results) {
    if (results.empty()) {
        throw ConfigError("exceedance table needs at least one result");
    }
    std::map<int, ExceedanceRow> rows;
    for (const auto& r : results) {
        auto& row = rows[r.n];
        row.n = r.n;
        ++row.total;
        row.exceeded += r.exceeded ? 1 : 0;
    }
    std::vector<ExceedanceRow> out;
    for (auto& [n, row] : rows) {
        row.proportion = static_cast<double>(row.exceeded) / static_cast<double>(row.total);
        out.push_back(row);
    }
    return out;
}

std::vector<MseRow> empirical_mse_curve(std::span<const ExperimentResult> results) {
    if (results.empty()) {
        throw ConfigError("MSE curve needs at least one result");
    }
    std::map<int, std::pair<double, int>> acc;
    for (const auto& r : results) {
        auto& [sum, count] = acc[r.n];
        sum += r.squared_error_B;
        ++count;
    }
    std::vector<MseRow> out;
    for (const auto& [n, entry] : acc) {
        out.push_back({n, entry.first / entry.second, std::pow(static_cast<double>(n), -0.25)});
    }
    return out;
}

TraceDiagnostics basis_trace_diagnostics(const Eigen::MatrixXd& eigenfunctions, const wavelet::BasisSpec& spec) {
    TraceDiagnostics out;
    out.modes = static_cast<int>(eigenfunctions.rows());
    out.max_level = spec.max_level;
    std::vector<double> energy_per_coeff;
    for (Eigen::Index j = 0; j < eigenfunctions.rows(); ++j) {
        const Eigen::VectorXd row = eigenfunctions.row(j);
        const auto coeffs = wavelet::dwt_forward(std::span<const double>(row.data(), row.size()), spec);
        const auto flat = coeffs.flatten();
        if (energy_per_coeff.empty()) {
            energy_per_coeff.assign(flat.size(), 0.0);
        }
        double norm2 = 0.0;
        for (std::size_t m = 0; m < flat.size(); ++m) {
            const double sq = flat[m] * flat[m];
            norm2 += sq;
            energy_per_coeff[m] += sq;
        }
        out.trace_sum += norm2;
        out.v_sup = std::max(out.v_sup, wavelet::besov_sup_norm(coeffs));
    }
    if (!energy_per_coeff.empty()) {
        out.n_sup = *std::max_element(energy_per_coeff.begin(), energy_per_coeff.end());
    }
    return out;
}

std::vector<EigenDecayRow> eigen_decay_report(const estimation::EstimatorState& state) {
    std::vector<EigenDecayRow> out;
    for (int j = 1; j <= state.k_n; ++j) {
        out.push_back({state.n, j, state.eigenvalues(j - 1)});
    }
    return out;
}

double hs_distance(const model::SpectralOperator& a, const model::SpectralOperator& b) {
    if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols()) {
        throw ConfigError("hs_distance: operators differ in shape");
    }
    return (a.matrix - b.matrix).norm();
}

}  // namespace banach_ar1::diagnostics
