#pragma once

#include <memory>

#include "qsd/coefficients.hpp"
#include "qsd/logint.hpp"
#include "qsd/quadrature.hpp"

namespace qsd {

/// Shared log-domain integral tables for one drift: the scale integral
/// Lambda(x) = int_0^x e^Q and the speed tail M(y) = int_y^inf e^-Q.
/// Values live in log space so steep Q never overflows. Tables grow on
/// demand behind a lock.
class DiffusionIntegrals {
public:
    explicit DiffusionIntegrals(const CoefficientTable& table, double rel_tol = 1e-8);

    const IntegralVerdict& mu_verdict() const { return mu_verdict_; }
    const IntegralVerdict& lambda_verdict() const { return lambda_verdict_; }

    double log_Lambda(double x) const;
    double log_Lambda_between(double a, double b) const;

    /// log M(y); requires the speed measure to be finite.
    double log_mu_tail(double y) const;
    double mu_total() const;

    /// Grow the tail table until log_mu_tail is trustworthy at y
    /// (tail beyond the truncation is e^-46 small relative to M(y)).
    void ensure_mu_tail_covers(double y) const;

    /// Knot ladders exposed for dense scans.
    std::vector<double> scan_knots(double lo, double hi, std::size_t at_least) const;

    double Q(double y) const { return table_.Q(y); }
    const CoefficientTable& table() const { return table_; }

private:
    const CoefficientTable& table_;
    double rel_tol_;
    IntegralVerdict mu_verdict_, lambda_verdict_;

    mutable std::shared_ptr<const LogForwardCumulative> lambda_;
    mutable std::shared_ptr<const LogBackwardTail> mu_tail_;
    mutable double mu_tail_valid_to_ = 0.0;
    mutable std::mutex mu_;

    void extend_lambda(double x) const;
    void rebuild_mu_tail(double need) const;
};

struct ScaleSpeed {
    std::shared_ptr<DiffusionIntegrals> integrals;
    IntegralVerdict lambda_at_infinity;
    IntegralVerdict mu_total;
    Fn Lambda;      // scale function, 0 at 0
    Fn mu_density;  // e^{-Q}
};

ScaleSpeed scale_speed(const CoefficientTable& table);

/// (H) convergent but a consequence it implies fails numerically; signals a
/// quadrature misconfiguration, since the implication is a theorem.
class InconsistentVerdicts : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Verdict on int_0^inf e^Q(y) (int_y^inf e^-Q) dy. On convergence the
/// cross-implications (finite speed measure, infinite scale) are asserted.
IntegralVerdict check_hypothesis_h(const CoefficientTable& table, double rel_tol = 1e-8);
IntegralVerdict check_hypothesis_h(const DiffusionIntegrals& di, double rel_tol = 1e-8);

/// Throws InconsistentVerdicts when h is convergent but the speed measure is
/// not finite or the scale integral is not infinite.
void assert_h_consistency(const IntegralVerdict& h, const IntegralVerdict& mu,
                          const IntegralVerdict& lambda);

enum class Endpoint { Zero, Infinity };
enum class BoundaryKind { Regular, Exit, Entrance, Natural, Unclassified };

const char* to_string(BoundaryKind k);
const char* to_string(Endpoint e);

/// Feller's table: sigma is the entrance-type integral, nu the exit-type one.
BoundaryKind feller_kind(IntegralStatus sigma, IntegralStatus nu);

struct BoundaryClassification {
    Endpoint endpoint;
    BoundaryKind kind = BoundaryKind::Unclassified;
    IntegralVerdict sigma;  // int e^Q (int_0^y e^-Q) dy   (at infinity)
    IntegralVerdict nu;     // int e^Q (int_y^inf e^-Q) dy (at infinity)
    std::string detail;
};

BoundaryClassification classify_boundary(const CoefficientTable& table, Endpoint endpoint);

}  // namespace qsd
