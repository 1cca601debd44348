#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qsd {

/// Piecewise cubic Hermite interpolant with caller-supplied slopes.
/// Knots must be strictly increasing.
class CubicHermite {
public:
    CubicHermite() = default;
    CubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dy);

    double operator()(double x) const;
    double derivative(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

private:
    std::size_t segment(double x) const;
    std::vector<double> x_, y_, dy_;
};

/// Linear interpolation on a sorted table, clamped at the ends.
double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x);

}  // namespace qsd
