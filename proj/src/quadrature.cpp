#include "qsd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace qsd {

namespace {

// QUADPACK (G7,K15) abscissae and weights on [-1,1].
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    if (std::isnan(fc)) throw NonFiniteEvaluation("integrand is NaN", c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        double f1 = f(c - dx);
        double f2 = f(c + dx);
        if (std::isnan(f1)) throw NonFiniteEvaluation("integrand is NaN", c - dx);
        if (std::isnan(f2)) throw NonFiniteEvaluation("integrand is NaN", c + dx);
        const double fsum = f1 + f2;
        resk += kWgk[j] * fsum;
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    if (!std::isfinite(p.value)) {
        p.error = std::numeric_limits<double>::infinity();
        return p;
    }
    double err = std::abs((resk - resg) * h);
    // QUADPACK-style sharpening of the raw difference
    const double resasc = resabs * std::abs(h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    p.error = err;
    return p;
}

}  // namespace

const char* to_string(IntegralStatus s) {
    switch (s) {
        case IntegralStatus::Convergent: return "convergent";
        case IntegralStatus::Divergent: return "divergent";
        case IntegralStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

QuadResult integrate_finite(const Fn& f, double a, double b, double rel_tol, double abs_tol,
                            std::size_t max_panels) {
    if (!(a < b)) throw std::invalid_argument("integrate_finite: requires a < b");
    std::priority_queue<Panel> panels;
    Panel first = gk15(f, a, b);
    if (!std::isfinite(first.value)) return {first.value, first.error};
    panels.push(first);
    double total = first.value;
    double total_err = first.error;
    while (total_err > std::max(rel_tol * std::abs(total), abs_tol)) {
        if (panels.size() >= max_panels)
            throw MaxSubdivision("integrate_finite: panel budget exhausted");
        Panel worst = panels.top();
        const double width = worst.b - worst.a;
        if (width < 16 * std::numeric_limits<double>::epsilon() *
                        (std::abs(worst.a) + std::abs(worst.b) + 1.0)) {
            // panel no longer refinable; accept its estimate
            break;
        }
        panels.pop();
        double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        if (!std::isfinite(left.value) || !std::isfinite(right.value))
            return {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    return {total, total_err};
}

namespace {

// Least-squares slope of log f against log y over the last octaves.
// Returns NaN when too few positive samples exist (tail effectively zero).
double fit_tail_slope(const Fn& f, double lo, double hi) {
    const int m = 24;
    std::vector<double> lx, ly;
    lx.reserve(m);
    ly.reserve(m);
    for (int i = 0; i < m; ++i) {
        double y = lo * std::pow(hi / lo, (i + 0.5) / m);
        double v = f(y);
        if (std::isfinite(v) && v > 0) {
            lx.push_back(std::log(y));
            ly.push_back(std::log(v));
        }
    }
    if (lx.size() < 6) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom <= 0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

IntegralVerdict classify_improper(const Fn& f, double a, double rel_tol,
                                  const TailPolicy& policy) {
    if (a < 0) throw std::invalid_argument("classify_improper: requires a >= 0");
    IntegralVerdict v;
    const int K = policy.max_doublings;
    std::vector<double> partial, increment;
    double quad_err = 0.0;
    double prev_V = std::numeric_limits<double>::quiet_NaN();
    double prev_V2 = std::numeric_limits<double>::quiet_NaN();
    double last_slope = std::numeric_limits<double>::quiet_NaN();
    double last_rem = std::numeric_limits<double>::infinity();
    int stable = 0;
    int critical = 0;

    auto R_of = [&](int k) { return a + policy.r0 * std::pow(2.0, k); };

    // a steeply decaying tail whose extrapolated remainder is already far
    // below tolerance needs no further doublings
    auto tail_negligible = [&]() {
        if (partial.empty()) return false;
        const double I = partial.back();
        return last_slope <= -2.0 && last_rem <= 0.05 * rel_tol * std::abs(I) &&
               std::abs(increment.back()) <= 1e-6 * std::abs(I);
    };

    for (int k = 0; k <= K; ++k) {
        const double lo = (k == 0) ? a : R_of(k - 1);
        const double hi = R_of(k);
        double seg, seg_err;
        // segment accuracy matters relative to the running total, not to
        // the segment's own (possibly tiny) value
        const double abs_seg =
            std::max(policy.abs_floor,
                     0.01 * rel_tol * (partial.empty() ? 0.0 : std::abs(partial.back())));
        try {
            QuadResult q = integrate_finite(f, lo, hi, policy.seg_rel_tol, abs_seg, 4000);
            seg = q.value;
            seg_err = q.error;
        } catch (const MaxSubdivision&) {
            if (tail_negligible()) {
                v.status = IntegralStatus::Convergent;
                v.value = partial.back() + last_rem;
                v.error_estimate = quad_err + 2 * last_rem;
                v.tail_slope = last_slope;
                v.note = "tail remainder negligible; farther segments not computable";
                return v;
            }
            v.status = IntegralStatus::Inconclusive;
            v.note = "segment quadrature exhausted its panel budget";
            return v;
        } catch (const NonFiniteEvaluation&) {
            if (tail_negligible()) {
                v.status = IntegralStatus::Convergent;
                v.value = partial.back() + last_rem;
                v.error_estimate = quad_err + 2 * last_rem;
                v.tail_slope = last_slope;
                v.note = "tail remainder negligible; farther segments not computable";
                return v;
            }
            v.status = IntegralStatus::Inconclusive;
            v.note = "integrand not finitely evaluable on a far segment";
            return v;
        }
        double I = (partial.empty() ? 0.0 : partial.back());
        I = std::isfinite(seg) ? I + seg : seg;
        quad_err += std::isfinite(seg_err) ? seg_err : 0.0;
        partial.push_back(I);
        increment.push_back(seg);
        v.evidence.emplace_back(hi, I);
        if (static_cast<int>(partial.size()) < policy.consecutive) continue;

        // --- divergence ---
        if (!std::isfinite(I) || I > policy.divergence_ceiling) {
            v.status = IntegralStatus::Divergent;
            v.note = "partial integral exceeded the divergence ceiling";
            v.tail_slope = fit_tail_slope(f, hi / 4, hi);
            return v;
        }
        const std::size_t m = increment.size();
        const double d0 = increment[m - 3], d1 = increment[m - 2], d2 = increment[m - 1];
        const bool significant = d2 > std::max(policy.abs_floor, rel_tol * std::abs(I));
        if (significant && d1 >= d0 * (1 - 1e-9) && d2 >= d1 * (1 - 1e-9)) {
            v.status = IntegralStatus::Divergent;
            v.note = "increments non-decreasing across doublings";
            v.tail_slope = fit_tail_slope(f, hi / 4, hi);
            return v;
        }
        double slope = fit_tail_slope(f, hi / 4, hi);
        v.tail_slope = slope;
        const bool tail_zero = std::isnan(slope);
        if (significant && !tail_zero && slope >= policy.slope_divergent &&
            d2 >= 0.8 * d1 && d1 >= 0.8 * d0) {
            v.status = IntegralStatus::Divergent;
            v.note = "tail slope indicates non-integrable decay";
            return v;
        }
        // near-critical tails: slope ~ -1 with near-constant increments
        if (significant && !tail_zero && slope >= -1.001 && d2 >= d1 * (1 - 1e-6) &&
            d1 >= d0 * (1 - 1e-6)) {
            if (++critical >= policy.consecutive) {
                v.status = IntegralStatus::Divergent;
                v.note = "near-critical tail with non-shrinking increments";
                return v;
            }
        } else {
            critical = 0;
        }

        // --- convergence ---
        double rem;
        if (tail_zero) {
            rem = 0.0;
        } else if (slope <= policy.slope_convergent) {
            double fR = f(hi);
            rem = (std::isfinite(fR) && fR > 0) ? fR * hi / (-1.0 - slope) : 0.0;
        } else {
            rem = std::numeric_limits<double>::infinity();
        }
        last_slope = slope;
        last_rem = rem;
        if (tail_negligible()) {
            v.status = IntegralStatus::Convergent;
            v.value = I + rem;
            v.error_estimate = quad_err + 2 * rem;
            v.note = "tail remainder negligible under the fitted decay";
            return v;
        }
        const double V = I + rem;
        bool cauchy = true;
        for (std::size_t j = m - policy.consecutive; j < m; ++j)
            cauchy = cauchy && std::abs(increment[j]) < rel_tol * std::abs(partial[j]);
        bool extrapolated = false;
        if (std::isfinite(V) && std::isfinite(prev_V) && rem <= 0.25 * std::abs(V) &&
            std::abs(V - prev_V) <= 0.5 * rel_tol * std::abs(V)) {
            ++stable;
            extrapolated = stable >= 2;
        } else if (!cauchy) {
            stable = 0;
        }
        if (cauchy || extrapolated) {
            v.status = IntegralStatus::Convergent;
            v.value = V;
            double vjump = 0.0;
            if (std::isfinite(prev_V)) vjump = std::abs(V - prev_V);
            if (std::isfinite(prev_V2)) vjump = std::max(vjump, std::abs(prev_V - prev_V2));
            v.error_estimate = quad_err + vjump + (cauchy ? std::abs(d2) : 0.0);
            v.note = cauchy ? "Cauchy increments" : "tail-extrapolated value stabilized";
            return v;
        }
        prev_V2 = prev_V;
        prev_V = V;
    }
    v.status = IntegralStatus::Inconclusive;
    v.note = "doubling budget exhausted without a decision";
    return v;
}

SupResult sup_scan(const Fn& g, double a, double b_max, bool refine, std::size_t n_points) {
    if (!(b_max > a)) throw std::invalid_argument("sup_scan: requires b_max > a");
    if (n_points < 8) n_points = 8;
    const double lo = (a > 0) ? a : b_max * 1e-9;
    const double ratio = std::pow(b_max / lo, 1.0 / static_cast<double>(n_points - 1));
    double best_x = lo, best_v = -std::numeric_limits<double>::infinity();
    double x = lo;
    std::vector<double> xs(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        xs[i] = x;
        double val = g(x);
        if (std::isnan(val)) throw NonFiniteEvaluation("sup_scan: g is NaN", x);
        if (val > best_v) {
            best_v = val;
            best_x = x;
        }
        x *= ratio;
    }
    if (!refine) return {best_x, best_v};
    // golden-section around the best grid point
    auto it = std::lower_bound(xs.begin(), xs.end(), best_x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    double left = (i == 0) ? lo : xs[i - 1];
    double right = (i + 1 >= n_points) ? b_max : xs[i + 1];
    const double gr = 0.6180339887498949;
    double x1 = right - gr * (right - left);
    double x2 = left + gr * (right - left);
    double f1 = g(x1), f2 = g(x2);
    for (int it2 = 0; it2 < 80 && (right - left) > 1e-13 * (std::abs(left) + std::abs(right));
         ++it2) {
        if (f1 < f2) {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + gr * (right - left);
            f2 = g(x2);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - gr * (right - left);
            f1 = g(x1);
        }
    }
    double xm = 0.5 * (left + right);
    double fm = g(xm);
    if (fm > best_v) return {xm, fm};
    return {best_x, best_v};
}

}  // namespace qsd
