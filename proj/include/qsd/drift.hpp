#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsd/expr.hpp"

namespace qsd {

enum class DriftFamily { Constant, Linear, Power, Polynomial, Logistic, Expression };

const char* to_string(DriftFamily f);

/// The drift q of dX = dB - q(X) dt, either a named parametric family or a
/// parsed expression in x. The SDE drift is -q.
struct DriftSpec {
    DriftFamily family = DriftFamily::Constant;
    double a = 0.0, b = 0.0, c = 0.0, p = 0.0;  // family coefficients
    std::vector<double> coeffs;                 // Polynomial: c0 + c1 x + ...
    std::string text;                           // Expression source
    expr::Program program;                      // compiled Expression

    double q(double x) const;

    /// Q(y) = int_0^y 2 q, when the family admits a closed form.
    std::optional<double> closed_form_Q(double y) const;
    bool has_closed_form_Q() const;

    std::string describe() const;

    static DriftSpec constant(double c);
    static DriftSpec linear(double a);
    static DriftSpec power(double a, double p);
    static DriftSpec polynomial(std::vector<double> coeffs);
    static DriftSpec logistic(double a, double b);  // q = a x - b x^2
    static DriftSpec expression(const std::string& text);
};

/// Parse an expression drift; throws ParseError on bad input.
DriftSpec parse_drift(const std::string& text);

struct SmoothnessReport {
    bool pass = false;
    std::string reason;          // empty on pass
    double worst_x = 0.0;        // probe location backing the verdict
    double worst_jump = 0.0;     // derivative jump there
    double jump_threshold = 0.0;
};

/// Finite-difference C^1 probe on [0, R]. Advisory: catches gross
/// violations (non-finite values, derivative blow-up near a point), not a
/// proof of smoothness.
SmoothnessReport smoothness_probe(const DriftSpec& spec, double R);

}  // namespace qsd
