#pragma once

#include <functional>
#include <vector>

#include "qsd/quadrature.hpp"

namespace qsd {

double log_add_exp(double a, double b);
/// log(e^a - e^b); requires a >= b.
double log_sub_exp(double a, double b);

/// log of the integral of exp(phi) over [a,b], computed in shifted
/// coordinates so that huge |phi| never overflows.
double log_integrate_exp(const Fn& phi, double a, double b, double rel_tol = 1e-11);

/// Running log-integral of exp(phi) from `lo`: value(x) = log int_lo^x exp(phi).
/// Knot values come from panel-by-panel shifted quadrature; between knots the
/// missing piece is integrated on demand, so evaluation is exact to quadrature
/// tolerance everywhere.
class LogForwardCumulative {
public:
    LogForwardCumulative(Fn phi, double lo, std::vector<double> knots);

    double log_value(double x) const;
    double log_between(double a, double b) const;  // log int_a^b exp(phi)
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& knot_log_values() const { return cum_; }

private:
    Fn phi_;
    double lo_;
    std::vector<double> knots_;
    std::vector<double> cum_;  // cum_[i] = log int_lo^knot_i exp(phi)
};

/// Log of the tail integral M(y) = int_y^Z exp(phi), built backward from Z.
/// Valid as an approximation of int_y^inf exp(phi) for y with
/// phi(y) well above phi near Z (the builder enforces a margin).
class LogBackwardTail {
public:
    LogBackwardTail(Fn phi, std::vector<double> knots);

    double log_value(double y) const;  // y <= Z
    double z_far() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& knot_log_values() const { return tail_; }

private:
    Fn phi_;
    std::vector<double> knots_;
    std::vector<double> tail_;  // tail_[i] = log int_knot_i^Z exp(phi)
};

/// Knot ladder for the tables: linear spacing near the origin, geometric
/// growth beyond `linear_to`.
std::vector<double> make_knots(double lo, double hi, double linear_to, std::size_t n_linear = 128,
                               double geo_ratio = 1.1);

}  // namespace qsd
