#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

/**
 * @file
 * The concrete ARB(1) model X_n = rho(X_{n-1}) + eps_n, expressed in the
 * eigenbasis phi_j(t) = sqrt(2) sin(j pi t) of the Dirichlet Laplacian on [0,1].
 * Every function is carried by its first p coordinates in that basis.
 */
namespace banach_ar1::model {

using Rng = std::mt19937_64;

struct ModelParams {
    double gamma = 1.21;          ///< exponent of (I - Laplacian)^{-gamma}
    double beta_exponent = 0.6;
    double width = 0.4;           ///< W, correlation width of rho and C_eps
    int modes = 50;               ///< p
    std::size_t grid_len = 2048;  ///< L
    std::uint64_t seed = 20240601;

    /// gamma > 2 beta > 1, p >= 2, W > 0, L a power of two.
    void validate() const;
};

/// Coordinates of one function in the model eigenbasis.
struct FunctionCoeffs {
    Eigen::VectorXd values;

    FunctionCoeffs() = default;
    explicit FunctionCoeffs(Eigen::VectorXd v) : values(std::move(v)) {}

    Eigen::Index size() const { return values.size(); }
    static FunctionCoeffs zeros(int p) { return FunctionCoeffs(Eigen::VectorXd::Zero(p)); }
    static FunctionCoeffs unit(int p, int j);  ///< e_j, j is 1-based
};

/// Matrix of <A(phi_j), phi_h> in the model basis.
struct SpectralOperator {
    Eigen::MatrixXd matrix;
    bool symmetric = false;

    Eigen::Index dim() const { return matrix.rows(); }
    FunctionCoeffs apply(const FunctionCoeffs& x) const;
};

/// States X_0 .. X_n stored as the columns of a p x (n+1) matrix.
struct Trajectory {
    ModelParams params;
    Eigen::MatrixXd states;

    /// n, the index of the last state.
    int last_index() const { return static_cast<int>(states.cols()) - 1; }
    FunctionCoeffs state(int i) const { return FunctionCoeffs(states.col(i)); }
};

/// Diagonal covariance with C_j = (1 + pi^2 j^2)^{-gamma}, j = 1..p.
SpectralOperator build_covariance(const ModelParams& params);

/// Eigenvalue C_j of the model covariance for any j >= 1 (not truncated at p).
double covariance_eigenvalue(double gamma, int j);

/// sqrt(2) sin(j pi t_i) at the grid midpoints t_i = (i + 1/2) / L.
std::vector<double> eigenfunction_on_grid(int j, std::size_t grid_len);

/// p x L matrix whose row j-1 is eigenfunction_on_grid(j, L).
Eigen::MatrixXd eigenbasis_on_grid(int modes, std::size_t grid_len);

/// rho_{jj} = (1 + j)^{-1.5}, rho_{jh} = exp(-|j-h| / W).
SpectralOperator build_rho(const ModelParams& params);

enum class PsdRepair {
    Clip,    ///< always clip negative eigenvalues at zero
    Strict,  ///< clip only when the most negative eigenvalue is >= -1e-10 ||C_eps||
};

struct NoiseCovariance {
    SpectralOperator op;             ///< the repaired, positive semi-definite matrix
    Eigen::MatrixXd raw;             ///< entries exactly as given by the formula
    double min_eigenvalue = 0.0;     ///< most negative eigenvalue of raw
    double clipped_mass = 0.0;       ///< sum of the magnitudes of clipped eigenvalues
    bool repaired = false;
};

/// (C_eps)_{jj} = C_j (1 - rho_{jj}^2), (C_eps)_{jh} = exp(-|j-h|^2 / W^2), then PSD repair.
NoiseCovariance build_noise_covariance(const ModelParams& params, const SpectralOperator& covariance,
                                       const SpectralOperator& rho,
                                       PsdRepair policy = PsdRepair::Clip);

struct StationarityCheck {
    bool holds = false;
    int j0 = 0;          ///< first power with ||rho^j0|| < 1, 0 when none
    double norm = 0.0;   ///< ||rho^j0||, or ||rho^j0_max|| when the check fails
};

/// Looks for j0 <= j0_max with operator norm ||rho^j0|| < 1.
StationarityCheck check_stationarity(const SpectralOperator& rho, int j0_max = 10);

/// Independent N(0, C_j) coordinates, each resampled until |xi_j| <= 3 sqrt(C_j).
FunctionCoeffs sample_initial_condition(const SpectralOperator& covariance, Rng& rng);

/// Runs burn_in + n steps of the recursion and keeps X_0 .. X_n.
/// The innovations are Gaussian with covariance C_eps, drawn through its
/// symmetric square root.
Trajectory simulate_trajectory(int n, const SpectralOperator& rho, const SpectralOperator& noise_cov,
                               const FunctionCoeffs& x0, Rng& rng, int burn_in = 0,
                               const ModelParams& params = {});

/// Symmetric square root of a positive semi-definite matrix.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& psd);

/// Sum_j x_j phi_j(t_i) on the grid midpoints.
std::vector<double> evaluate_on_grid(const FunctionCoeffs& x, std::size_t grid_len);

/// Sum_j C_jj phi_j(s) phi_j(t).
double covariance_kernel(const SpectralOperator& covariance, double s, double t);

/// Solution of Sigma = rho Sigma rho^T + Q, by the doubling iteration.
Eigen::MatrixXd stationary_covariance(const SpectralOperator& rho, const SpectralOperator& noise_cov);

/// Turns spectral coordinates into samples on the fine grid, either directly
/// or through the coarse-grid-then-natural-cubic-spline path.
class GridEvaluator {
public:
    GridEvaluator(int modes, std::size_t grid_len, std::optional<double> coarse_step = std::nullopt);

    std::vector<double> operator()(const FunctionCoeffs& x) const;

    std::size_t grid_len() const { return grid_len_; }
    int modes() const { return modes_; }
    bool spline_mode() const { return !coarse_nodes_.empty(); }

private:
    int modes_;
    std::size_t grid_len_;
    Eigen::MatrixXd basis_;        // p x L when direct, p x K on the coarse nodes otherwise
    std::vector<double> coarse_nodes_;
    std::vector<double> fine_points_;
};

}  // namespace banach_ar1::model
