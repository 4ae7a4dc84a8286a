#pragma once

#include <cstddef>
#include <span>
#include <vector>

/**
 * @file
 * Periodized Daubechies wavelets on [0,1]: filters, the pyramid transform and
 * the sequence-space norms computed from wavelet coefficients.
 *
 * Samples live on the dyadic grid of L = 2^(M+1) points. The forward transform
 * multiplies them by 2^{-(M+1)/2} before running the orthonormal filter bank, so
 * the resulting coefficients approximate the integrals of f against the
 * father functions phi_{J,k} and the mother functions psi_{j,k}, j = J..M.
 */
namespace banach_ar1::wavelet {

enum class Boundary { Periodic };

struct BasisSpec {
    int order = 10;         ///< vanishing moments N; the filter has 2N taps
    int coarse_level = 2;   ///< J
    int max_level = 10;     ///< M
    Boundary boundary = Boundary::Periodic;

    /// L = 2^(M+1).
    std::size_t grid_length() const { return std::size_t{1} << (max_level + 1); }

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;

    bool operator==(const BasisSpec&) const = default;
};

/// Father coefficients alpha_{J,k} (2^J of them) and mother coefficients
/// beta_{j,k}, stored level by level for j = J..M (2^j each).
struct Coeffs {
    BasisSpec spec;
    std::vector<double> alpha;
    std::vector<std::vector<double>> beta;

    /// All-zero coefficients of the right shape.
    static Coeffs zeros(const BasisSpec& spec);

    /// Mother coefficients of level j (J <= j <= M).
    std::span<const double> level(int j) const;
    std::span<double> level(int j);

    /// Total number of coefficients, 2^(M+1).
    std::size_t size() const;

    /// alpha followed by beta levels J..M.
    std::vector<double> flatten() const;

    /// Throws ConfigError when any array has the wrong length or a non-finite entry.
    void check_shape() const;
};

/// Orthonormal minimum-phase Daubechies scaling filter with 2*order taps,
/// built by spectral factorization of the Daubechies polynomial.
/// Supported orders are 1..10.
std::vector<double> daubechies_filter(int order);

/// Quadrature-mirror wavelet filter g[m] = (-1)^m h[2N-1-m].
std::vector<double> wavelet_filter(std::span<const double> scaling);

Coeffs dwt_forward(std::span<const double> samples, const BasisSpec& spec);
std::vector<double> dwt_inverse(const Coeffs& coeffs);

/// B^0_{inf,inf} norm: the largest coefficient magnitude.
double besov_sup_norm(const Coeffs& coeffs);
/// B^0_{1,1} norm: the sum of coefficient magnitudes.
double besov_l1_norm(const Coeffs& coeffs);

struct GelfandWeights {
    BasisSpec spec;
    double beta_exponent = 0.6;
    std::vector<double> t_alpha;
    std::vector<std::vector<double>> t_beta;
    bool renormalized = true;
    double total_mass = 0.0;  ///< sum of the raw weights, before any renormalization

    double sum() const;
};

/// Weights t^phi_{J,k} = 2^{-J} and
/// t^psi_{j,k} = (2^{2b} - 1) 2^{-2b(1-J)} 2^{-2jb} on the truncated levels J..M.
/// With renormalize the weights are divided by their total so they sum to one.
GelfandWeights make_gelfand_weights(const BasisSpec& spec, double beta_exponent,
                                    bool renormalize = true);

enum class NormMode {
    Direct,  ///< sqrt(sum t c^2), the H^{-beta} norm
    Dual,    ///< sqrt(sum c^2 / t), the H^{beta} norm
    Flat,    ///< sqrt(sum c^2), the L^2 norm
};

double weighted_norm(const Coeffs& coeffs, const GelfandWeights& weights, NormMode mode);

}  // namespace banach_ar1::wavelet
