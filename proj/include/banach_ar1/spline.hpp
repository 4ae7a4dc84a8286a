#pragma once

#include <span>
#include <vector>

namespace banach_ar1 {

/// Natural cubic spline through (x_i, y_i), x strictly increasing, at least two nodes.
/// Outside [x_0, x_last] the end cubic pieces are extended.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::span<const double> x, std::span<const double> y);

    double operator()(double t) const;

    /// Second derivatives at the nodes (zero at both ends).
    const std::vector<double>& second_derivatives() const { return m_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

}  // namespace banach_ar1
