#pragma once

#include "banach_ar1/model.hpp"
#include "banach_ar1/wavelet.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace banach_ar1::estimation {

using model::FunctionCoeffs;
using model::SpectralOperator;
using model::Trajectory;

/// Columns of `sample` are states X_0 .. X_{m-1}; returns (1/m) sum X_i X_i^T.
SpectralOperator empirical_covariance(const Eigen::Ref<const Eigen::MatrixXd>& sample);

/// (1/(m-1)) sum_{i<m-1} X_{i+1} X_i^T over the columns of `sample`.
SpectralOperator empirical_cross_covariance(const Eigen::Ref<const Eigen::MatrixXd>& sample);

struct EigenPairs {
    Eigen::VectorXd values;        ///< descending
    Eigen::MatrixXd vectors;       ///< orthonormal columns, same order as values
    std::vector<int> near_degenerate;  ///< 1-based j where (v_j - v_{j+1}) / v_1 < 1e-8
};

/// Full symmetric eigendecomposition sorted in descending order.
EigenPairs eigen_decompose(const SpectralOperator& op);

/// reference * (+1 if <empirical, reference> >= 0 else -1).
Eigen::VectorXd sign_align(const Eigen::Ref<const Eigen::VectorXd>& empirical,
                           const Eigen::Ref<const Eigen::VectorXd>& reference);

struct TruncationRule {
    enum class Kind { LogCeil, Fixed };
    Kind kind = Kind::LogCeil;
    int fixed = 0;

    static TruncationRule log_ceil() { return {}; }
    static TruncationRule fixed_order(int k) { return {Kind::Fixed, k}; }
};

/// ceil(ln n) or the fixed order, clamped to [1, p].
int truncation_order(int n, TruncationRule rule, int p);

/// a_1 = 2 sqrt2 / (C_1 - C_2), a_j = 2 sqrt2 max(1/(C_{j-1} - C_j), 1/(C_j - C_{j+1})).
/// Needs k+1 values; throws NumericError on a gap below 1e-12.
std::vector<double> spectral_gap_a(std::span<const double> values, int k);

/// max_{j <= k} 1 / (C_j - C_{j+1}).
double lambda_kn(std::span<const double> values, int k);

struct EstimatorState {
    int n = 0;
    int k_n = 0;
    Eigen::VectorXd eigenvalues;   ///< C_{n,1} >= ... >= C_{n,p} >= 0
    Eigen::MatrixXd eigenvectors;  ///< columns phi_{n,j} in model-basis coordinates
    Eigen::MatrixXd d_matrix;      ///< (j,k) entry <D_n(phi_{n,j}), phi_{n,k}>
    Eigen::MatrixXd rho_hat;       ///< the truncated estimator in the model basis
    std::vector<int> near_degenerate;

    int dim() const { return static_cast<int>(rho_hat.rows()); }
};

/**
 * Fits the componentwise estimator
 *   rho_hat = P_k D_n C_n^{-1} P_k,  P_k the projector on the top k_n empirical eigenvectors,
 * from a trajectory X_0 .. X_n. C_n averages X_0 .. X_{n-1}; D_n averages the n lag pairs
 * (X_i, X_{i+1}). The eigenpairs of C_n come from a thin SVD of the data matrix, which keeps
 * small eigenvalues accurate when C_n is badly conditioned.
 *
 * Throws NumericError when C_{n,k_n} <= 1e-14 C_{n,1} (ask for a smaller k_n).
 */
EstimatorState fit_estimator(const Trajectory& traj, TruncationRule rule);
EstimatorState fit_estimator(const Eigen::Ref<const Eigen::MatrixXd>& states, TruncationRule rule);

/// rho_hat * x.
FunctionCoeffs plug_in_predict(const EstimatorState& state, const FunctionCoeffs& x);

/// || truth - predicted ||_B after evaluating both on the grid and transforming.
double prediction_error_B(const FunctionCoeffs& truth, const FunctionCoeffs& predicted,
                          const model::GridEvaluator& grid, const wavelet::BasisSpec& spec);
double prediction_error_B(const FunctionCoeffs& truth, const FunctionCoeffs& predicted,
                          std::size_t grid_len, const wavelet::BasisSpec& spec);

}  // namespace banach_ar1::estimation
