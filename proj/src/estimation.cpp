#include "banach_ar1/estimation.hpp"

#include "banach_ar1/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace banach_ar1::estimation {

namespace {

constexpr double kMinGap = 1e-12;
constexpr double kDegenerateRelGap = 1e-8;
constexpr double kRankFloor = 1e-14;

std::vector<int> flag_near_degenerate(const Eigen::VectorXd& values, int upto) {
    std::vector<int> flags;
    const double top = values.size() > 0 ? std::abs(values(0)) : 0.0;
    if (top == 0.0) {
        return flags;
    }
    const int last = std::min<int>(upto, static_cast<int>(values.size()) - 1);
    for (int j = 1; j <= last; ++j) {
        if ((values(j - 1) - values(j)) / top < kDegenerateRelGap) {
            flags.push_back(j);
        }
    }
    return flags;
}

void require_gaps(std::span<const double> values, int k) {
    if (k < 1) {
        throw ConfigError("truncation order must be >= 1");
    }
    if (values.size() < static_cast<std::size_t>(k) + 1) {
        throw ConfigError("need " + std::to_string(k + 1) + " eigenvalues, got " +
                          std::to_string(values.size()));
    }
    for (int j = 1; j <= k; ++j) {
        const double gap = values[j - 1] - values[j];
        if (!(gap > kMinGap)) {
            throw NumericError("eigenvalue gap C_" + std::to_string(j) + " - C_" + std::to_string(j + 1) +
                               " = " + std::to_string(gap) +
                               " is not positive; the simple-eigenvalue assumption fails");
        }
    }
}

}  // namespace

SpectralOperator empirical_covariance(const Eigen::Ref<const Eigen::MatrixXd>& sample) {
    const Eigen::Index m = sample.cols();
    if (m < 2) {
        throw ConfigError("empirical covariance needs at least two states");
    }
    SpectralOperator c;
    c.matrix = (sample * sample.transpose()) / static_cast<double>(m);
    c.matrix = 0.5 * (c.matrix + c.matrix.transpose());
    c.symmetric = true;
    return c;
}

SpectralOperator empirical_cross_covariance(const Eigen::Ref<const Eigen::MatrixXd>& sample) {
    const Eigen::Index m = sample.cols();
    if (m < 2) {
        throw ConfigError("empirical cross-covariance needs at least two states");
    }
    SpectralOperator d;
    d.matrix = (sample.rightCols(m - 1) * sample.leftCols(m - 1).transpose()) / static_cast<double>(m - 1);
    d.symmetric = false;
    return d;
}

EigenPairs eigen_decompose(const SpectralOperator& op) {
    const auto& a = op.matrix;
    if (a.rows() != a.cols()) {
        throw ConfigError("eigen_decompose needs a square matrix");
    }
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ConfigError("eigen_decompose needs a symmetric matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (a + a.transpose()));
    if (solver.info() != Eigen::Success) {
        throw NumericError("symmetric eigensolver failed");
    }
    // Eigen returns ascending order.
    EigenPairs out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    out.near_degenerate = flag_near_degenerate(out.values, static_cast<int>(out.values.size()) - 1);
    return out;
}

Eigen::VectorXd sign_align(const Eigen::Ref<const Eigen::VectorXd>& empirical,
                           const Eigen::Ref<const Eigen::VectorXd>& reference) {
    if (empirical.size() != reference.size()) {
        throw ConfigError("sign_align: vectors differ in length");
    }
    return empirical.dot(reference) >= 0.0 ? Eigen::VectorXd(reference) : Eigen::VectorXd(-reference);
}

int truncation_order(int n, TruncationRule rule, int p) {
    if (n < 2) {
        throw ConfigError("truncation order needs n >= 2, got " + std::to_string(n));
    }
    const int raw = rule.kind == TruncationRule::Kind::LogCeil
                        ? static_cast<int>(std::ceil(std::log(static_cast<double>(n))))
                        : rule.fixed;
    return std::clamp(raw, 1, std::max(p, 1));
}

std::vector<double> spectral_gap_a(std::span<const double> values, int k) {
    require_gaps(values, k);
    const double c = 2.0 * std::numbers::sqrt2;
    std::vector<double> a(static_cast<std::size_t>(k));
    a[0] = c / (values[0] - values[1]);
    for (int j = 2; j <= k; ++j) {
        a[j - 1] = c * std::max(1.0 / (values[j - 2] - values[j - 1]), 1.0 / (values[j - 1] - values[j]));
    }
    return a;
}

double lambda_kn(std::span<const double> values, int k) {
    require_gaps(values, k);
    double best = 0.0;
    for (int j = 1; j <= k; ++j) {
        best = std::max(best, 1.0 / (values[j - 1] - values[j]));
    }
    return best;
}

EstimatorState fit_estimator(const Trajectory& traj, TruncationRule rule) {
    return fit_estimator(traj.states, rule);
}

EstimatorState fit_estimator(const Eigen::Ref<const Eigen::MatrixXd>& states, TruncationRule rule) {
    const int n = static_cast<int>(states.cols()) - 1;
    if (n < 2) {
        throw ConfigError("fit_estimator needs a trajectory X_0..X_n with n >= 2");
    }
    const int p = static_cast<int>(states.rows());
    const auto past = states.leftCols(n);     // X_0 .. X_{n-1}
    const auto future = states.rightCols(n);  // X_1 .. X_n
    const double root_n = std::sqrt(static_cast<double>(n));

    // past / sqrt(n) = U S W^T, so C_n = U S^2 U^T.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(past / root_n, Eigen::ComputeFullU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();

    EstimatorState state;
    state.n = n;
    state.k_n = truncation_order(n, rule, p);
    state.eigenvalues = Eigen::VectorXd::Zero(p);
    state.eigenvalues.head(sigma.size()) = sigma.cwiseAbs2();
    state.eigenvectors = svd.matrixU();

    const int k = state.k_n;
    const double top = state.eigenvalues(0);
    if (!(top > 0.0) || !(state.eigenvalues(k - 1) > kRankFloor * top)) {
        throw NumericError("empirical eigenvalue C_{n," + std::to_string(k) + "} = " +
                           std::to_string(state.eigenvalues(k - 1)) +
                           " is not positive; choose a smaller truncation order k_n");
    }

    const Eigen::MatrixXd d_n = (future * past.transpose()) / static_cast<double>(n);
    state.d_matrix = state.eigenvectors.transpose() * d_n.transpose() * state.eigenvectors;

    // D_n phi_j / C_{n,j} = future * w_j / (sqrt(n) sigma_j).
    const auto u_k = state.eigenvectors.leftCols(k);
    Eigen::MatrixXd image = future * svd.matrixV().leftCols(k);
    for (int j = 0; j < k; ++j) {
        image.col(j) /= root_n * sigma(j);
    }
    state.rho_hat = u_k * (u_k.transpose() * image) * u_k.transpose();
    state.near_degenerate = flag_near_degenerate(state.eigenvalues, std::min(k, p - 1));
    return state;
}

FunctionCoeffs plug_in_predict(const EstimatorState& state, const FunctionCoeffs& x) {
    if (x.size() != state.rho_hat.cols()) {
        throw ConfigError("prediction input has " + std::to_string(x.size()) + " coordinates, estimator has " +
                          std::to_string(state.rho_hat.cols()));
    }
    return FunctionCoeffs(state.rho_hat * x.values);
}

double prediction_error_B(const FunctionCoeffs& truth, const FunctionCoeffs& predicted,
                          const model::GridEvaluator& grid, const wavelet::BasisSpec& spec) {
    if (truth.size() != predicted.size()) {
        throw ConfigError("truth and prediction differ in dimension");
    }
    const auto samples = grid(FunctionCoeffs(truth.values - predicted.values));
    return wavelet::besov_sup_norm(wavelet::dwt_forward(samples, spec));
}

double prediction_error_B(const FunctionCoeffs& truth, const FunctionCoeffs& predicted,
                          std::size_t grid_len, const wavelet::BasisSpec& spec) {
    const model::GridEvaluator grid(static_cast<int>(truth.size()), grid_len);
    return prediction_error_B(truth, predicted, grid, spec);
}

}  // namespace banach_ar1::estimation
