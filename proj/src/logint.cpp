#include "qsd/logint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsd {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sub_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (!(a >= b)) throw std::invalid_argument("log_sub_exp: requires a >= b");
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

namespace {

// One-sided dyadic ladder toward the peak at `anchor`. Handles boundary
// layers far thinner than the interval, where a single quadrature panel
// underflows to an exact zero and gives the subdivision nothing to work on.
// rounding of the shifted exponent phi(x) - c bounds the achievable
// relative accuracy; demanding more makes the subdivision spin forever
double noise_floored_tol(double rel_tol, double c) {
    return std::max(rel_tol,
                    64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(c)));
}

double log_int_ladder(const Fn& phi, double anchor, double far, double rel_tol) {
    if (anchor == far) return kNegInf;
    const double sign = (far > anchor) ? 1.0 : -1.0;
    const double W = std::abs(far - anchor);
    const double p0 = phi(anchor);
    double acc = kNegInf;
    double t_hi = W;
    for (int k = 0; k < 900; ++k) {
        const double t_lo = t_hi / 2;
        const double x_lo = anchor + sign * t_lo;
        const double x_hi = anchor + sign * t_hi;
        // innermost stub: phi variation small, one shifted panel suffices
        if (p0 - phi(x_lo) <= 0.7 || t_hi <= 1e-290 * (1.0 + std::abs(anchor))) {
            if (x_hi == anchor) return acc;
            double cs = std::max(p0, phi(x_lo));
            double tol = noise_floored_tol(rel_tol, cs);
            auto fs = [&](double x) { return std::exp(phi(x) - cs); };
            QuadResult q = sign > 0 ? integrate_finite(fs, anchor, x_hi, tol, 1e-320)
                                    : integrate_finite(fs, x_hi, anchor, tol, 1e-320);
            if (q.value > 0) acc = log_add_exp(acc, cs + std::log(q.value));
            return acc;
        }
        if (x_lo == x_hi) return acc;
        double cp = std::max(phi(x_lo), std::max(phi(x_hi), phi(anchor + sign * 0.75 * t_hi)));
        if (cp > -std::numeric_limits<double>::infinity()) {
            double tol = noise_floored_tol(rel_tol, cp);
            auto fp = [&](double x) { return std::exp(phi(x) - cp); };
            QuadResult q = sign > 0 ? integrate_finite(fp, x_lo, x_hi, tol, 1e-320)
                                    : integrate_finite(fp, x_hi, x_lo, tol, 1e-320);
            if (q.value > 0) acc = log_add_exp(acc, cp + std::log(q.value));
        }
        t_hi = t_lo;
    }
    return acc;
}

}  // namespace

double log_integrate_exp(const Fn& phi, double a, double b, double rel_tol) {
    if (a == b) return kNegInf;
    if (!(a < b)) throw std::invalid_argument("log_integrate_exp: requires a <= b");
    // shift by a coarse scan maximum; rescan denser if the shift proves low
    double c = kNegInf;
    double xmax = a;
    int n_scan = 33;
    for (int round = 0; round < 4; ++round) {
        for (int i = 0; i < n_scan; ++i) {
            double x = a + (b - a) * i / (n_scan - 1);
            double p = phi(x);
            if (std::isnan(p)) throw NonFiniteEvaluation("log_integrate_exp: phi is NaN", x);
            if (p > c) {
                c = p;
                xmax = x;
            }
        }
        if (c == kNegInf) return kNegInf;  // phi identically -inf on samples
        auto shifted = [&](double x) { return std::exp(phi(x) - c); };
        QuadResult q = integrate_finite(shifted, a, b, noise_floored_tol(rel_tol, c), 1e-320);
        if (std::isfinite(q.value)) {
            if (q.value > 0) return c + std::log(q.value);
            // the mass sits in a layer too thin for the panel to see;
            // climb toward the peak dyadically from both sides
            double left = (xmax > a) ? log_int_ladder(phi, xmax, a, rel_tol) : kNegInf;
            double right = (xmax < b) ? log_int_ladder(phi, xmax, b, rel_tol) : kNegInf;
            return log_add_exp(left, right);
        }
        // interior spike missed by the scan; look harder
        n_scan = n_scan * 4 - 3;
    }
    throw std::runtime_error("log_integrate_exp: could not bound the integrand shift");
}

std::vector<double> make_knots(double lo, double hi, double linear_to, std::size_t n_linear,
                               double geo_ratio) {
    std::vector<double> k;
    linear_to = std::min(linear_to, hi);
    if (linear_to > lo) {
        for (std::size_t i = 0; i <= n_linear; ++i)
            k.push_back(lo + (linear_to - lo) * static_cast<double>(i) / n_linear);
    } else {
        k.push_back(lo);
    }
    double x = k.back();
    while (x < hi) {
        double step = std::max(x * (geo_ratio - 1.0), (linear_to - lo) / n_linear);
        x = std::min(x + step, hi);
        k.push_back(x);
    }
    return k;
}

LogForwardCumulative::LogForwardCumulative(Fn phi, double lo, std::vector<double> knots)
    : phi_(std::move(phi)), lo_(lo), knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("LogForwardCumulative: need >= 2 knots");
    cum_.resize(knots_.size());
    double acc = (knots_.front() > lo_) ? log_integrate_exp(phi_, lo_, knots_.front()) : kNegInf;
    cum_[0] = acc;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        acc = log_add_exp(acc, log_integrate_exp(phi_, knots_[i - 1], knots_[i]));
        cum_[i] = acc;
    }
}

double LogForwardCumulative::log_value(double x) const {
    if (x <= lo_) return kNegInf;
    if (x >= knots_.back()) {
        double extra = log_integrate_exp(phi_, knots_.back(), std::max(x, knots_.back()));
        return x > knots_.back() ? log_add_exp(cum_.back(), extra) : cum_.back();
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    if (i == 0) return log_integrate_exp(phi_, lo_, x);
    double base = cum_[i - 1];
    if (x == knots_[i - 1]) return base;
    return log_add_exp(base, log_integrate_exp(phi_, knots_[i - 1], x));
}

double LogForwardCumulative::log_between(double a, double b) const {
    if (!(a <= b)) throw std::invalid_argument("log_between: requires a <= b");
    if (a == b) return kNegInf;
    // subtract in log space when both ends are on the table; the difference
    // may cancel badly for a ~ b, so integrate short spans directly
    auto ia = std::lower_bound(knots_.begin(), knots_.end(), a) - knots_.begin();
    auto ib = std::lower_bound(knots_.begin(), knots_.end(), b) - knots_.begin();
    if (ib - ia <= 4) return log_integrate_exp(phi_, a, b);
    double la = log_value(a), lb = log_value(b);
    if (lb <= la + 1e-9) return log_integrate_exp(phi_, a, b);  // cancellation risk
    return log_sub_exp(lb, la);
}

LogBackwardTail::LogBackwardTail(Fn phi, std::vector<double> knots)
    : phi_(std::move(phi)), knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("LogBackwardTail: need >= 2 knots");
    tail_.resize(knots_.size());
    double acc = kNegInf;
    tail_.back() = acc;
    for (std::size_t i = knots_.size() - 1; i-- > 0;) {
        acc = log_add_exp(acc, log_integrate_exp(phi_, knots_[i], knots_[i + 1]));
        tail_[i] = acc;
    }
}

double LogBackwardTail::log_value(double y) const {
    if (y <= knots_.front()) {
        double extra = (y < knots_.front()) ? log_integrate_exp(phi_, y, knots_.front()) : kNegInf;
        return log_add_exp(tail_.front(), extra);
    }
    if (y >= knots_.back()) return kNegInf;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    // y lies in [knots_[i-1], knots_[i])
    double rest = tail_[i];
    return log_add_exp(rest, log_integrate_exp(phi_, y, knots_[i]));
}

}  // namespace qsd
