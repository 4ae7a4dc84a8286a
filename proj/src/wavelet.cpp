#include "banach_ar1/wavelet.hpp"

#include "banach_ar1/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

namespace banach_ar1::wavelet {

namespace {

using cld = std::complex<long double>;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Coefficients (ascending powers of y) of sum_{k<N} binom(N-1+k, k) y^k.
std::vector<long double> daubechies_polynomial(int order) {
    std::vector<long double> c(static_cast<std::size_t>(order));
    long double binom = 1.0L;
    for (int k = 0; k < order; ++k) {
        c[k] = binom;
        binom = binom * static_cast<long double>(order + k) / static_cast<long double>(k + 1);
    }
    return c;
}

cld eval_poly(const std::vector<long double>& c, cld y, cld* derivative) {
    cld value = 0.0L;
    cld slope = 0.0L;
    for (std::size_t i = c.size(); i-- > 0;) {
        slope = slope * y + value;
        value = value * y + c[i];
    }
    if (derivative != nullptr) {
        *derivative = slope;
    }
    return value;
}

std::vector<cld> polynomial_roots(const std::vector<long double>& c) {
    const int degree = static_cast<int>(c.size()) - 1;
    std::vector<cld> roots;
    if (degree < 1) {
        return roots;
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (int i = 0; i < degree; ++i) {
        companion(i, degree - 1) = -static_cast<double>(c[i] / c[degree]);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& eig = solver.eigenvalues();
    for (int i = 0; i < degree; ++i) {
        cld y(eig[i].real(), eig[i].imag());
        // Newton polish in extended precision.
        for (int it = 0; it < 50; ++it) {
            cld slope;
            const cld value = eval_poly(c, y, &slope);
            if (std::abs(slope) == 0.0L) {
                break;
            }
            const cld step = value / slope;
            y -= step;
            if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(y))) {
                break;
            }
        }
        roots.push_back(y);
    }
    return roots;
}

void periodic_analysis(std::span<const double> in, std::span<const double> h,
                       std::span<const double> g, std::span<double> approx,
                       std::span<double> detail) {
    const std::size_t n = in.size();
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < h.size(); ++m) {
            const double x = in[(2 * k + m) % n];
            a += h[m] * x;
            d += g[m] * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

void periodic_synthesis(std::span<const double> approx, std::span<const double> detail,
                        std::span<const double> h, std::span<const double> g,
                        std::span<double> out) {
    const std::size_t n = out.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
        for (std::size_t m = 0; m < h.size(); ++m) {
            out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
        }
    }
}

}  // namespace

void BasisSpec::validate() const {
    if (order < 1 || order > 10) {
        throw ConfigError("wavelet order " + std::to_string(order) +
                          " unsupported; supported orders are 1..10");
    }
    if (coarse_level < 1) {
        throw ConfigError("coarse level J must be >= 1, got " + std::to_string(coarse_level));
    }
    if (max_level < coarse_level) {
        throw ConfigError("max level M (" + std::to_string(max_level) +
                          ") must be >= coarse level J (" + std::to_string(coarse_level) + ")");
    }
    if (max_level > 24) {
        throw ConfigError("max level M too large: " + std::to_string(max_level));
    }
}

Coeffs Coeffs::zeros(const BasisSpec& spec) {
    spec.validate();
    Coeffs c;
    c.spec = spec;
    c.alpha.assign(std::size_t{1} << spec.coarse_level, 0.0);
    for (int j = spec.coarse_level; j <= spec.max_level; ++j) {
        c.beta.emplace_back(std::size_t{1} << j, 0.0);
    }
    return c;
}

std::span<const double> Coeffs::level(int j) const {
    return beta.at(static_cast<std::size_t>(j - spec.coarse_level));
}

std::span<double> Coeffs::level(int j) {
    return beta.at(static_cast<std::size_t>(j - spec.coarse_level));
}

std::size_t Coeffs::size() const {
    std::size_t total = alpha.size();
    for (const auto& lvl : beta) {
        total += lvl.size();
    }
    return total;
}

std::vector<double> Coeffs::flatten() const {
    std::vector<double> out(alpha);
    for (const auto& lvl : beta) {
        out.insert(out.end(), lvl.begin(), lvl.end());
    }
    return out;
}

void Coeffs::check_shape() const {
    spec.validate();
    if (alpha.size() != (std::size_t{1} << spec.coarse_level)) {
        throw ConfigError("alpha has " + std::to_string(alpha.size()) + " entries, expected " +
                          std::to_string(std::size_t{1} << spec.coarse_level));
    }
    const auto levels = static_cast<std::size_t>(spec.max_level - spec.coarse_level + 1);
    if (beta.size() != levels) {
        throw ConfigError("beta has " + std::to_string(beta.size()) + " levels, expected " +
                          std::to_string(levels));
    }
    for (std::size_t i = 0; i < levels; ++i) {
        const std::size_t expected = std::size_t{1} << (spec.coarse_level + static_cast<int>(i));
        if (beta[i].size() != expected) {
            throw ConfigError("beta level " + std::to_string(spec.coarse_level + i) + " has " +
                              std::to_string(beta[i].size()) + " entries, expected " +
                              std::to_string(expected));
        }
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    bool ok = std::all_of(alpha.begin(), alpha.end(), finite);
    for (const auto& lvl : beta) {
        ok = ok && std::all_of(lvl.begin(), lvl.end(), finite);
    }
    if (!ok) {
        throw ConfigError("wavelet coefficients contain non-finite values");
    }
}

std::vector<double> daubechies_filter(int order) {
    if (order < 1 || order > 10) {
        throw ConfigError("Daubechies order " + std::to_string(order) +
                          " unsupported; supported orders are 1..10");
    }
    // |L(z)|^2 = P(y) with y = (2 - z - 1/z)/4. Each root y_r of P yields a pair
    // (z_r, 1/z_r); keeping the root inside the unit circle gives minimum phase.
    const auto roots = polynomial_roots(daubechies_polynomial(order));

    std::vector<cld> poly{1.0L};
    const auto multiply = [&poly](cld c0, cld c1) {
        std::vector<cld> next(poly.size() + 1, cld{0.0L});
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i] * c0;
            next[i + 1] += poly[i] * c1;
        }
        poly = std::move(next);
    };
    for (int i = 0; i < order; ++i) {
        multiply(1.0L, 1.0L);
    }
    for (const cld& y : roots) {
        const cld b = 2.0L - 4.0L * y;
        const cld disc = std::sqrt(b * b - 4.0L);
        cld z = (b - disc) / 2.0L;
        if (std::abs(z) > 1.0L) {
            z = (b + disc) / 2.0L;
        }
        multiply(1.0L, -z);
    }

    long double total = 0.0L;
    for (const cld& c : poly) {
        total += c.real();
    }
    const long double scale = std::sqrt(2.0L) / total;
    std::vector<double> h(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
        h[i] = static_cast<double>(poly[i].real() * scale);
    }
    return h;
}

std::vector<double> wavelet_filter(std::span<const double> scaling) {
    const std::size_t taps = scaling.size();
    std::vector<double> g(taps);
    for (std::size_t m = 0; m < taps; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        g[m] = sign * scaling[taps - 1 - m];
    }
    return g;
}

Coeffs dwt_forward(std::span<const double> samples, const BasisSpec& spec) {
    spec.validate();
    const std::size_t n = samples.size();
    if (!is_power_of_two(n) || n < (std::size_t{2} << spec.coarse_level)) {
        throw ConfigError("sample length " + std::to_string(n) +
                          " must be a power of two and at least 2^(J+1)");
    }
    if (n != spec.grid_length()) {
        throw ConfigError("sample length " + std::to_string(n) + " does not match 2^(M+1) = " +
                          std::to_string(spec.grid_length()));
    }
    const auto h = daubechies_filter(spec.order);
    const auto g = wavelet_filter(h);

    const double scale = std::pow(2.0, -0.5 * static_cast<double>(spec.max_level + 1));
    std::vector<double> current(n);
    std::transform(samples.begin(), samples.end(), current.begin(),
                   [scale](double v) { return v * scale; });

    Coeffs out = Coeffs::zeros(spec);
    std::vector<double> approx;
    for (int j = spec.max_level; j >= spec.coarse_level; --j) {
        approx.assign(current.size() / 2, 0.0);
        periodic_analysis(current, h, g, approx, out.level(j));
        current.swap(approx);
    }
    out.alpha = std::move(current);
    return out;
}

std::vector<double> dwt_inverse(const Coeffs& coeffs) {
    coeffs.check_shape();
    const auto& spec = coeffs.spec;
    const auto h = daubechies_filter(spec.order);
    const auto g = wavelet_filter(h);

    std::vector<double> current(coeffs.alpha);
    std::vector<double> finer;
    for (int j = spec.coarse_level; j <= spec.max_level; ++j) {
        finer.assign(current.size() * 2, 0.0);
        periodic_synthesis(current, coeffs.level(j), h, g, finer);
        current.swap(finer);
    }
    const double scale = std::pow(2.0, 0.5 * static_cast<double>(spec.max_level + 1));
    for (double& v : current) {
        v *= scale;
    }
    return current;
}

double besov_sup_norm(const Coeffs& coeffs) {
    coeffs.check_shape();
    double best = 0.0;
    for (double v : coeffs.alpha) {
        best = std::max(best, std::abs(v));
    }
    for (const auto& lvl : coeffs.beta) {
        for (double v : lvl) {
            best = std::max(best, std::abs(v));
        }
    }
    return best;
}

double besov_l1_norm(const Coeffs& coeffs) {
    coeffs.check_shape();
    double total = 0.0;
    for (double v : coeffs.alpha) {
        total += std::abs(v);
    }
    for (const auto& lvl : coeffs.beta) {
        for (double v : lvl) {
            total += std::abs(v);
        }
    }
    return total;
}

double GelfandWeights::sum() const {
    double total = std::accumulate(t_alpha.begin(), t_alpha.end(), 0.0);
    for (const auto& lvl : t_beta) {
        total = std::accumulate(lvl.begin(), lvl.end(), total);
    }
    return total;
}

GelfandWeights make_gelfand_weights(const BasisSpec& spec, double beta_exponent,
                                    bool renormalize) {
    spec.validate();
    if (!(beta_exponent > 0.5)) {
        throw ConfigError("beta exponent must exceed 1/2 for the Sobolev embedding, got " +
                          std::to_string(beta_exponent));
    }
    const double J = spec.coarse_level;
    const double b = beta_exponent;
    GelfandWeights w;
    w.spec = spec;
    w.beta_exponent = beta_exponent;
    w.renormalized = renormalize;
    w.t_alpha.assign(std::size_t{1} << spec.coarse_level, std::pow(2.0, -J));
    const double level_constant = (std::pow(2.0, 2.0 * b) - 1.0) * std::pow(2.0, -2.0 * b * (1.0 - J));
    // Levels are constant, so count * value keeps the mass exact even with millions of entries.
    w.total_mass = 1.0;
    for (int j = spec.coarse_level; j <= spec.max_level; ++j) {
        const double t = level_constant * std::pow(2.0, -2.0 * j * b);
        w.t_beta.emplace_back(std::size_t{1} << j, t);
        w.total_mass += std::ldexp(t, j);
    }
    if (renormalize) {
        for (double& t : w.t_alpha) {
            t /= w.total_mass;
        }
        for (auto& lvl : w.t_beta) {
            for (double& t : lvl) {
                t /= w.total_mass;
            }
        }
    }
    return w;
}

double weighted_norm(const Coeffs& coeffs, const GelfandWeights& weights, NormMode mode) {
    coeffs.check_shape();
    if (!(coeffs.spec == weights.spec)) {
        throw ConfigError("weights and coefficients were built for different wavelet bases");
    }
    const auto term = [mode](double c, double t) {
        switch (mode) {
            case NormMode::Direct: return t * c * c;
            case NormMode::Dual: return c * c / t;
            case NormMode::Flat: break;
        }
        return c * c;
    };
    double total = 0.0;
    for (std::size_t k = 0; k < coeffs.alpha.size(); ++k) {
        total += term(coeffs.alpha[k], weights.t_alpha[k]);
    }
    for (std::size_t i = 0; i < coeffs.beta.size(); ++i) {
        for (std::size_t k = 0; k < coeffs.beta[i].size(); ++k) {
            total += term(coeffs.beta[i][k], weights.t_beta[i][k]);
        }
    }
    return std::sqrt(total);
}

}  // namespace banach_ar1::wavelet
