#include "qsd/drift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qsd {

const char* to_string(DriftFamily f) {
    switch (f) {
        case DriftFamily::Constant: return "constant";
        case DriftFamily::Linear: return "linear";
        case DriftFamily::Power: return "power";
        case DriftFamily::Polynomial: return "polynomial";
        case DriftFamily::Logistic: return "logistic";
        case DriftFamily::Expression: return "expr";
    }
    return "?";
}

double DriftSpec::q(double x) const {
    switch (family) {
        case DriftFamily::Constant: return c;
        case DriftFamily::Linear: return a * x;
        case DriftFamily::Power: return a * std::pow(x, p);
        case DriftFamily::Polynomial: {
            double r = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
            return r;
        }
        case DriftFamily::Logistic: return a * x - b * x * x;
        case DriftFamily::Expression: return program.eval(x);
    }
    return 0.0;
}

std::optional<double> DriftSpec::closed_form_Q(double y) const {
    switch (family) {
        case DriftFamily::Constant: return 2.0 * c * y;
        case DriftFamily::Linear: return a * y * y;
        case DriftFamily::Power:
            if (p <= -1.0) return std::nullopt;
            return 2.0 * a * std::pow(y, p + 1.0) / (p + 1.0);
        case DriftFamily::Polynomial: {
            double r = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;)
                r = r * y + 2.0 * coeffs[i] / static_cast<double>(i + 1);
            return r * y;
        }
        case DriftFamily::Logistic: return a * y * y - (2.0 / 3.0) * b * y * y * y;
        case DriftFamily::Expression: return std::nullopt;
    }
    return std::nullopt;
}

bool DriftSpec::has_closed_form_Q() const {
    if (family == DriftFamily::Expression) return false;
    if (family == DriftFamily::Power && p <= -1.0) return false;
    return true;
}

std::string DriftSpec::describe() const {
    char buf[128];
    switch (family) {
        case DriftFamily::Constant: std::snprintf(buf, sizeof buf, "q = %.6g", c); break;
        case DriftFamily::Linear: std::snprintf(buf, sizeof buf, "q = %.6g*x", a); break;
        case DriftFamily::Power: std::snprintf(buf, sizeof buf, "q = %.6g*x^%.6g", a, p); break;
        case DriftFamily::Polynomial: {
            std::string s = "q = poly(";
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", coeffs[i]);
                s += buf;
            }
            return s + ")";
        }
        case DriftFamily::Logistic:
            std::snprintf(buf, sizeof buf, "q = %.6g*x - %.6g*x^2", a, b);
            break;
        case DriftFamily::Expression: return "q = " + text;
    }
    return buf;
}

DriftSpec DriftSpec::constant(double c) {
    DriftSpec s;
    s.family = DriftFamily::Constant;
    s.c = c;
    return s;
}

DriftSpec DriftSpec::linear(double a) {
    DriftSpec s;
    s.family = DriftFamily::Linear;
    s.a = a;
    return s;
}

DriftSpec DriftSpec::power(double a, double p) {
    DriftSpec s;
    s.family = DriftFamily::Power;
    s.a = a;
    s.p = p;
    return s;
}

DriftSpec DriftSpec::polynomial(std::vector<double> coeffs) {
    DriftSpec s;
    s.family = DriftFamily::Polynomial;
    s.coeffs = std::move(coeffs);
    return s;
}

DriftSpec DriftSpec::logistic(double a, double b) {
    DriftSpec s;
    s.family = DriftFamily::Logistic;
    s.a = a;
    s.b = b;
    return s;
}

DriftSpec DriftSpec::expression(const std::string& text) { return parse_drift(text); }

DriftSpec parse_drift(const std::string& text) {
    DriftSpec s;
    s.family = DriftFamily::Expression;
    s.text = text;
    expr::Ast ast = expr::parse(text);
    s.program = ast.compile();
    return s;
}

SmoothnessReport smoothness_probe(const DriftSpec& spec, double R) {
    if (!(R > 0)) throw std::invalid_argument("smoothness_probe: R must be positive");
    SmoothnessReport rep;

    // probe points: geometric ladder down to R*1e-12 plus a uniform overlay
    std::vector<double> xs;
    xs.push_back(0.0);
    for (double x = R * 1e-12; x < R; x *= 1.3) xs.push_back(x);
    for (int i = 1; i <= 256; ++i) xs.push_back(R * i / 256.0);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> d(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        double der;
        if (x == 0.0) {
            const double h = R * 1e-7;
            der = (-3 * spec.q(0.0) + 4 * spec.q(h) - spec.q(2 * h)) / (2 * h);
        } else {
            const double h = std::min(x / 8.0, R * 1e-5);
            der = (spec.q(x + h) - spec.q(x - h)) / (2 * h);
        }
        if (!std::isfinite(der) || !std::isfinite(spec.q(x))) {
            rep.pass = false;
            rep.reason = "non-finite value or derivative";
            rep.worst_x = x;
            return rep;
        }
        d[i] = der;
    }

    // local scale: the bulk magnitude of q'; jumps far beyond it flag a kink
    std::vector<double> mags(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mags[i] = std::abs(d[i]);
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double median = mags[mags.size() / 2];
    const double dmax = *std::max_element(mags.begin(), mags.end());
    const double scale = std::max({median, 1e-8 * dmax, 1e-300});
    rep.jump_threshold = 1e3 * scale;

    rep.pass = true;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        const double jump = std::abs(d[i + 1] - d[i]);
        if (jump > rep.worst_jump) {
            rep.worst_jump = jump;
            rep.worst_x = xs[i];
        }
        if (jump > rep.jump_threshold) {
            rep.pass = false;
            rep.reason = "derivative jump exceeds 1e3 x local scale";
            rep.worst_x = xs[i];
            rep.worst_jump = jump;
        }
    }
    return rep;
}

}  // namespace qsd
