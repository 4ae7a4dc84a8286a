#include "banach_ar1/spline.hpp"

#include "banach_ar1/errors.hpp"

#include <algorithm>
#include <iterator>

namespace banach_ar1 {

NaturalCubicSpline::NaturalCubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw ConfigError("cubic spline needs at least two nodes and matching value count");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw ConfigError("cubic spline nodes must be strictly increasing");
        }
    }
    if (n == 2) {
        return;
    }
    // Thomas algorithm on the interior second derivatives.
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
        const double lower = x_[i + 1] - x_[i];  // h_{i} couples row i to row i-1
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) {
        m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
    }
}

double NaturalCubicSpline::operator()(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(std::distance(x_.begin(), it)) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

}  // namespace banach_ar1
