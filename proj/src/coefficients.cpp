#include "qsd/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "qsd/interp.hpp"
#include "qsd/quadrature.hpp"

namespace qsd {

/// Cumulative quadrature values of 2q at knots, cubic Hermite (with the
/// exact slope 2q) in between. Knots are refined until the interpolant
/// matches a direct panel integral at segment midpoints.
class CoefficientTable::QCache {
public:
    QCache(const DriftSpec& spec, double R) : spec_(spec) {
        build(std::max(R, 1.0) * 1.5);
    }

    double value(double y) {
        {
            std::shared_lock lock(mu_);
            if (y <= hi_) return eval_locked(y);
        }
        std::unique_lock lock(mu_);
        while (y > hi_) build(hi_ * 2.0);
        return eval_locked(y);
    }

private:
    double eval_locked(double y) const {
        if (y == 0.0) return 0.0;
        if (y < 0.0) {
            // left of the origin only the probe machinery ever looks; fall
            // back to a direct panel
            return -integrate_finite([this](double t) { return 2 * spec_.q(t); }, y, 0.0, 1e-12)
                        .value;
        }
        return interp_(y);
    }

    void build(double hi) {
        std::vector<double> knots;
        const double lin = std::min(hi, 4.0);
        const std::size_t n_lin = 256;
        for (std::size_t i = 0; i <= n_lin; ++i)
            knots.push_back(lin * static_cast<double>(i) / n_lin);
        double x = lin;
        while (x < hi) {
            x = std::min(x * 1.05, hi);
            knots.push_back(x);
        }

        auto f2q = [this](double t) { return 2 * spec_.q(t); };
        // refine until the Hermite interpolant reproduces midpoint values
        for (int round = 0; round < 14; ++round) {
            std::vector<double> vals(knots.size()), slopes(knots.size());
            vals[0] = 0.0;
            slopes[0] = f2q(knots[0]);
            for (std::size_t i = 1; i < knots.size(); ++i) {
                QuadResult seg = integrate_finite(f2q, knots[i - 1], knots[i], 1e-12, 1e-300);
                if (!std::isfinite(seg.value))
                    throw std::runtime_error("drift quadrature failed: non-finite panel");
                vals[i] = vals[i - 1] + seg.value;
                slopes[i] = f2q(knots[i]);
            }
            CubicHermite interp(knots, vals, slopes);
            std::vector<double> refined;
            for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
                double m = 0.5 * (knots[i] + knots[i + 1]);
                double exact =
                    vals[i] + integrate_finite(f2q, knots[i], m, 1e-12, 1e-300).value;
                double tol = 1e-11 * (1.0 + std::abs(exact));
                if (std::abs(interp(m) - exact) > tol) refined.push_back(m);
            }
            if (refined.empty()) {
                interp_ = std::move(interp);
                hi_ = hi;
                return;
            }
            knots.insert(knots.end(), refined.begin(), refined.end());
            std::sort(knots.begin(), knots.end());
        }
        throw std::runtime_error("drift quadrature failed: Q knot refinement stalled");
    }

    const DriftSpec spec_;
    mutable std::shared_mutex mu_;
    CubicHermite interp_;
    double hi_ = 0.0;
};

double CoefficientTable::Q(double y) const {
    if (auto cf = spec_.closed_form_Q(y)) return *cf;
    return qcache_->value(y);
}

CoefficientTable build_coefficients(const DriftSpec& spec, double R, std::size_t n) {
    if (!(R > 0)) throw std::invalid_argument("build_coefficients: R must be positive");
    if (n < 16) throw std::invalid_argument("build_coefficients: n must be >= 16");

    CoefficientTable t;
    t.spec_ = spec;
    t.R_ = R;

    for (std::size_t i = 0; i <= n; ++i) {
        double x = R * static_cast<double>(i) / static_cast<double>(n);
        if (!std::isfinite(spec.q(x)))
            throw std::runtime_error("drift is non-finite on [0, R] (x = " + std::to_string(x) +
                                     ")");
        t.grid_.push_back(x);
    }
    if (!spec.has_closed_form_Q())
        t.qcache_ = std::make_shared<CoefficientTable::QCache>(spec, R);
    for (double x : t.grid_) {
        double Q = t.Q(x);
        t.Q_grid_.push_back(Q);
        t.expQ_grid_.push_back(std::exp(Q));
        t.expmQ_grid_.push_back(std::exp(-Q));
    }
    return t;
}

}  // namespace qsd
