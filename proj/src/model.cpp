#include "banach_ar1/model.hpp"

#include "banach_ar1/errors.hpp"
#include "banach_ar1/spline.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <string>

namespace banach_ar1::model {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double eigenfunction(int j, double t) {
    return std::numbers::sqrt2 * std::sin(static_cast<double>(j) * std::numbers::pi * t);
}

Eigen::VectorXd basis_at(int modes, double t) {
    Eigen::VectorXd v(modes);
    for (int j = 1; j <= modes; ++j) {
        v(j - 1) = eigenfunction(j, t);
    }
    return v;
}

double midpoint(std::size_t i, std::size_t grid_len) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(grid_len);
}

}  // namespace

void ModelParams::validate() const {
    if (!(beta_exponent > 0.5)) {
        throw ConfigError("beta must exceed 1/2, got " + std::to_string(beta_exponent));
    }
    if (!(gamma > 2.0 * beta_exponent)) {
        throw ConfigError("gamma must exceed 2*beta (gamma > 2 beta > 1), got gamma=" +
                          std::to_string(gamma) + ", beta=" + std::to_string(beta_exponent));
    }
    if (!(width > 0.0)) {
        throw ConfigError("correlation width W must be positive");
    }
    if (modes < 2) {
        throw ConfigError("number of modes p must be >= 2, got " + std::to_string(modes));
    }
    if (!is_power_of_two(grid_len) || grid_len < 4) {
        throw ConfigError("grid length must be a power of two >= 4, got " + std::to_string(grid_len));
    }
}

FunctionCoeffs FunctionCoeffs::unit(int p, int j) {
    if (j < 1 || j > p) {
        throw ConfigError("unit index out of range");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    v(j - 1) = 1.0;
    return FunctionCoeffs(std::move(v));
}

FunctionCoeffs SpectralOperator::apply(const FunctionCoeffs& x) const {
    if (x.size() != matrix.cols()) {
        throw ConfigError("operator of size " + std::to_string(matrix.cols()) +
                          " applied to a vector of size " + std::to_string(x.size()));
    }
    return FunctionCoeffs(matrix * x.values);
}

double covariance_eigenvalue(double gamma, int j) {
    const double lambda = std::numbers::pi * std::numbers::pi * static_cast<double>(j) * j;
    return std::pow(1.0 + lambda, -gamma);
}

SpectralOperator build_covariance(const ModelParams& params) {
    params.validate();
    SpectralOperator c;
    c.matrix = Eigen::MatrixXd::Zero(params.modes, params.modes);
    for (int j = 1; j <= params.modes; ++j) {
        c.matrix(j - 1, j - 1) = covariance_eigenvalue(params.gamma, j);
    }
    c.symmetric = true;
    return c;
}

std::vector<double> eigenfunction_on_grid(int j, std::size_t grid_len) {
    if (j < 1) {
        throw ConfigError("eigenfunction index must be >= 1");
    }
    std::vector<double> out(grid_len);
    for (std::size_t i = 0; i < grid_len; ++i) {
        out[i] = eigenfunction(j, midpoint(i, grid_len));
    }
    return out;
}

Eigen::MatrixXd eigenbasis_on_grid(int modes, std::size_t grid_len) {
    Eigen::MatrixXd basis(modes, static_cast<Eigen::Index>(grid_len));
    for (std::size_t i = 0; i < grid_len; ++i) {
        basis.col(static_cast<Eigen::Index>(i)) = basis_at(modes, midpoint(i, grid_len));
    }
    return basis;
}

SpectralOperator build_rho(const ModelParams& params) {
    params.validate();
    const int p = params.modes;
    SpectralOperator rho;
    rho.matrix.resize(p, p);
    for (int j = 1; j <= p; ++j) {
        for (int h = 1; h <= p; ++h) {
            rho.matrix(j - 1, h - 1) = j == h ? std::pow(1.0 + j, -1.5)
                                              : std::exp(-std::abs(j - h) / params.width);
        }
    }
    rho.symmetric = true;
    return rho;
}

NoiseCovariance build_noise_covariance(const ModelParams& params, const SpectralOperator& covariance,
                                       const SpectralOperator& rho, PsdRepair policy) {
    params.validate();
    const Eigen::Index p = covariance.dim();
    if (rho.dim() != p) {
        throw ConfigError("rho and C must have the same size");
    }
    if (!covariance.matrix.isDiagonal(0.0)) {
        throw ConfigError("the covariance operator must be diagonal in the model basis");
    }
    NoiseCovariance out;
    out.raw.resize(p, p);
    const double w2 = params.width * params.width;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index h = 0; h < p; ++h) {
            if (j == h) {
                const double r = rho.matrix(j, j);
                out.raw(j, j) = covariance.matrix(j, j) * (1.0 - r * r);
            } else {
                const double d = static_cast<double>(j - h);
                out.raw(j, h) = std::exp(-d * d / w2);
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.raw);
    Eigen::VectorXd values = eig.eigenvalues();
    out.min_eigenvalue = values.minCoeff();
    const double scale = values.cwiseAbs().maxCoeff();
    if (out.min_eigenvalue < 0.0) {
        if (policy == PsdRepair::Strict && out.min_eigenvalue < -1e-10 * scale) {
            throw NumericError("noise covariance is indefinite: most negative eigenvalue " +
                               std::to_string(out.min_eigenvalue) + " (largest |eigenvalue| " +
                               std::to_string(scale) + ")");
        }
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            if (values(i) < 0.0) {
                out.clipped_mass += -values(i);
                values(i) = 0.0;
            }
        }
        out.repaired = true;
        Eigen::MatrixXd fixed = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
        out.op.matrix = 0.5 * (fixed + fixed.transpose());
    } else {
        out.op.matrix = out.raw;
    }
    out.op.symmetric = true;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(out.op.matrix, Eigen::EigenvaluesOnly);
    if (check.eigenvalues().minCoeff() < -1e-12 * std::max(scale, 1e-300)) {
        throw NumericError("noise covariance still indefinite after repair: most negative eigenvalue " +
                           std::to_string(check.eigenvalues().minCoeff()));
    }
    return out;
}

StationarityCheck check_stationarity(const SpectralOperator& rho, int j0_max) {
    if (rho.matrix.rows() != rho.matrix.cols()) {
        throw ConfigError("rho must be square");
    }
    StationarityCheck out;
    Eigen::MatrixXd power = rho.matrix;
    for (int j = 1; j <= j0_max; ++j) {
        if (j > 1) {
            power = power * rho.matrix;
        }
        const double norm = power.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(power).singularValues()(0);
        out.norm = norm;
        if (norm < 1.0) {
            out.holds = true;
            out.j0 = j;
            return out;
        }
    }
    return out;
}

FunctionCoeffs sample_initial_condition(const SpectralOperator& covariance, Rng& rng) {
    const Eigen::Index p = covariance.dim();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double variance = covariance.matrix(j, j);
        if (!(variance > 0.0)) {
            throw ConfigError("initial-condition covariance must be diagonal positive");
        }
        double z = normal(rng);
        while (std::abs(z) > 3.0) {
            z = normal(rng);
        }
        x(j) = z * std::sqrt(variance);
    }
    return FunctionCoeffs(std::move(x));
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& psd) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(psd);
    const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

Trajectory simulate_trajectory(int n, const SpectralOperator& rho, const SpectralOperator& noise_cov,
                               const FunctionCoeffs& x0, Rng& rng, int burn_in,
                               const ModelParams& params) {
    if (n < 2) {
        throw ConfigError("trajectory length n must be >= 2, got " + std::to_string(n));
    }
    if (burn_in < 0) {
        throw ConfigError("burn-in must be non-negative");
    }
    const Eigen::Index p = rho.dim();
    if (noise_cov.dim() != p || x0.size() != p) {
        throw ConfigError("rho, C_eps and x0 dimensions differ");
    }
    const Eigen::MatrixXd root = symmetric_sqrt(noise_cov.matrix);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(p);
    const auto innovation = [&]() -> Eigen::VectorXd {
        for (Eigen::Index j = 0; j < p; ++j) {
            z(j) = normal(rng);
        }
        return root * z;
    };

    Eigen::VectorXd x = x0.values;
    for (int i = 0; i < burn_in; ++i) {
        x = rho.matrix * x + innovation();
    }
    Trajectory traj;
    traj.params = params;
    traj.states.resize(p, n + 1);
    traj.states.col(0) = x;
    for (int i = 1; i <= n; ++i) {
        traj.states.col(i) = rho.matrix * traj.states.col(i - 1) + innovation();
    }
    return traj;
}

std::vector<double> evaluate_on_grid(const FunctionCoeffs& x, std::size_t grid_len) {
    if (!is_power_of_two(grid_len)) {
        throw ConfigError("grid length must be a power of two");
    }
    std::vector<double> out(grid_len, 0.0);
    for (std::size_t i = 0; i < grid_len; ++i) {
        const double t = midpoint(i, grid_len);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            acc += x.values(j) * eigenfunction(static_cast<int>(j) + 1, t);
        }
        out[i] = acc;
    }
    return out;
}

double covariance_kernel(const SpectralOperator& covariance, double s, double t) {
    const int p = static_cast<int>(covariance.dim());
    return basis_at(p, s).dot(covariance.matrix * basis_at(p, t));
}

Eigen::MatrixXd stationary_covariance(const SpectralOperator& rho, const SpectralOperator& noise_cov) {
    Eigen::MatrixXd a = rho.matrix;
    Eigen::MatrixXd sigma = noise_cov.matrix;
    for (int it = 0; it < 200; ++it) {
        sigma += a * sigma * a.transpose();
        a = a * a;
        if (a.cwiseAbs().maxCoeff() < 1e-18) {
            return 0.5 * (sigma + sigma.transpose());
        }
        if (!a.allFinite()) {
            break;
        }
    }
    throw ModelGateError("Lyapunov iteration did not converge; rho is not stable");
}

GridEvaluator::GridEvaluator(int modes, std::size_t grid_len, std::optional<double> coarse_step)
    : modes_(modes), grid_len_(grid_len) {
    if (!is_power_of_two(grid_len)) {
        throw ConfigError("grid length must be a power of two");
    }
    if (!coarse_step) {
        basis_ = eigenbasis_on_grid(modes, grid_len);
        return;
    }
    const double step = *coarse_step;
    if (!(step > 0.0) || step >= 1.0) {
        throw ConfigError("coarse step must lie in (0, 1)");
    }
    const auto count = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        coarse_nodes_.push_back(static_cast<double>(k) * step);
    }
    if (coarse_nodes_.back() < 1.0 - 1e-12) {
        coarse_nodes_.push_back(1.0);
    }
    basis_.resize(modes, static_cast<Eigen::Index>(coarse_nodes_.size()));
    for (std::size_t k = 0; k < coarse_nodes_.size(); ++k) {
        basis_.col(static_cast<Eigen::Index>(k)) = basis_at(modes, coarse_nodes_[k]);
    }
    fine_points_.resize(grid_len);
    for (std::size_t i = 0; i < grid_len; ++i) {
        fine_points_[i] = midpoint(i, grid_len);
    }
}

std::vector<double> GridEvaluator::operator()(const FunctionCoeffs& x) const {
    if (x.size() != modes_) {
        throw ConfigError("grid evaluator built for " + std::to_string(modes_) + " modes, got " +
                          std::to_string(x.size()));
    }
    const Eigen::VectorXd values = basis_.transpose() * x.values;
    if (!spline_mode()) {
        return std::vector<double>(values.data(), values.data() + values.size());
    }
    const NaturalCubicSpline spline(coarse_nodes_, std::span<const double>(values.data(), values.size()));
    std::vector<double> out(grid_len_);
    for (std::size_t i = 0; i < grid_len_; ++i) {
        out[i] = spline(fine_points_[i]);
    }
    return out;
}

}  // namespace banach_ar1::model
