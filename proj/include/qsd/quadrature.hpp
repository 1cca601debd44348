#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsd {

using Fn = std::function<double(double)>;

/// Raised when an integrand evaluates to NaN.
class NonFiniteEvaluation : public std::runtime_error {
public:
    NonFiniteEvaluation(const std::string& what, double where)
        : std::runtime_error(what + " (x = " + std::to_string(where) + ")"), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

class MaxSubdivision : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadResult {
    double value;
    double error;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Integrable endpoint
/// singularities are handled by subdivision; an overflowing integrand
/// yields {+-inf, inf} rather than an error.
QuadResult integrate_finite(const Fn& f, double a, double b, double rel_tol,
                            double abs_tol = 0.0, std::size_t max_panels = 40000);

enum class IntegralStatus { Convergent, Divergent, Inconclusive };

const char* to_string(IntegralStatus s);

/// Doubling policy for deciding integrals over [a, infinity).
struct TailPolicy {
    double r0 = 1.0;                  // first truncation offset
    int max_doublings = 40;
    double divergence_ceiling = 1e12;
    double slope_divergent = -0.98;   // log-log tail slope at/above: not integrable
    double slope_convergent = -1.02;  // at/below: integrable power decay
    int consecutive = 3;
    double seg_rel_tol = 1e-10;       // per-segment quadrature tolerance
    double abs_floor = 1e-300;
};

struct IntegralVerdict {
    IntegralStatus status = IntegralStatus::Inconclusive;
    double value = std::numeric_limits<double>::quiet_NaN();
    double error_estimate = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> evidence;  // (R_k, partial integral)
    double tail_slope = std::numeric_limits<double>::quiet_NaN();
    std::string note;

    bool convergent() const { return status == IntegralStatus::Convergent; }
    bool divergent() const { return status == IntegralStatus::Divergent; }
};

/// Classify the improper integral of an eventually nonnegative f over
/// [a, infinity). Inconclusive is a first-class outcome; callers must
/// surface it.
IntegralVerdict classify_improper(const Fn& f, double a, double rel_tol,
                                  const TailPolicy& policy = {});

struct SupResult {
    double argsup;
    double sup;
};

/// Dense geometric scan of g on (a, b_max], optionally followed by
/// golden-section refinement around the best grid point.
SupResult sup_scan(const Fn& g, double a, double b_max, bool refine = true,
                   std::size_t n_points = 4096);

}  // namespace qsd
