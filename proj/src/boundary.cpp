#include "qsd/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace qsd {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailMargin = 46.0;  // e^-46 ~ 1e-20 relative truncation
}  // namespace

DiffusionIntegrals::DiffusionIntegrals(const CoefficientTable& table, double rel_tol)
    : table_(table), rel_tol_(rel_tol) {
    auto eQ = [&](double y) { return std::exp(table_.Q(y)); };
    auto emQ = [&](double y) { return std::exp(-table_.Q(y)); };
    mu_verdict_ = classify_improper(emQ, 0.0, rel_tol_);
    lambda_verdict_ = classify_improper(eQ, 0.0, rel_tol_);
}

void DiffusionIntegrals::extend_lambda(double x) const {
    if (lambda_ && lambda_->knots().back() >= x) return;
    double hi = std::max({4.0, x * 1.25, lambda_ ? lambda_->knots().back() * 2 : 0.0});
    auto phi = [this](double y) { return table_.Q(y); };
    lambda_ = std::make_shared<const LogForwardCumulative>(phi, 0.0,
                                                           make_knots(0.0, hi, 4.0, 256, 1.05));
}

double DiffusionIntegrals::log_Lambda(double x) const {
    if (x <= 0) return kNegInf;
    std::lock_guard lock(mu_);
    extend_lambda(x);
    return lambda_->log_value(x);
}

double DiffusionIntegrals::log_Lambda_between(double a, double b) const {
    std::lock_guard lock(mu_);
    extend_lambda(b);
    return lambda_->log_between(a, b);
}

void DiffusionIntegrals::rebuild_mu_tail(double need) const {
    if (!mu_verdict_.convergent())
        throw std::logic_error("mu tail table requested for an infinite speed measure");
    double z = mu_tail_ ? mu_tail_->z_far() : std::max(4.0, need);
    const double Qneed = table_.Q(need);
    while (table_.Q(z) < Qneed + kTailMargin || z < need * 1.25) {
        z *= 1.5;
        if (z > 1e13) throw std::runtime_error("mu tail table: truncation grew beyond 1e13");
    }
    auto phi = [this](double y) { return -table_.Q(y); };
    mu_tail_ = std::make_shared<const LogBackwardTail>(phi, make_knots(0.0, z, 4.0, 256, 1.05));
    mu_tail_valid_to_ = need;
    // validity actually extends to the largest y whose Q clears the margin
    double lo = need, hi = z;
    for (int i = 0; i < 60; ++i) {
        double m = 0.5 * (lo + hi);
        if (table_.Q(m) + kTailMargin <= table_.Q(z) && m * 1.25 <= z)
            lo = m;
        else
            hi = m;
    }
    mu_tail_valid_to_ = lo;
}

void DiffusionIntegrals::ensure_mu_tail_covers(double y) const {
    std::lock_guard lock(mu_);
    if (!mu_tail_ || y > mu_tail_valid_to_) rebuild_mu_tail(y);
}

double DiffusionIntegrals::log_mu_tail(double y) const {
    std::lock_guard lock(mu_);
    if (!mu_tail_ || y > mu_tail_valid_to_) rebuild_mu_tail(std::max(y, 1.0));
    return mu_tail_->log_value(std::max(y, 0.0));
}

double DiffusionIntegrals::mu_total() const { return std::exp(log_mu_tail(0.0)); }

std::vector<double> DiffusionIntegrals::scan_knots(double lo, double hi,
                                                   std::size_t at_least) const {
    std::vector<double> ks;
    double ratio = std::pow(hi / std::max(lo, hi * 1e-9), 1.0 / static_cast<double>(at_least));
    double x = std::max(lo, hi * 1e-9);
    while (x < hi) {
        ks.push_back(x);
        x *= ratio;
    }
    ks.push_back(hi);
    return ks;
}

ScaleSpeed scale_speed(const CoefficientTable& table) {
    ScaleSpeed s;
    s.integrals = std::make_shared<DiffusionIntegrals>(table);
    s.lambda_at_infinity = s.integrals->lambda_verdict();
    s.mu_total = s.integrals->mu_verdict();
    auto integrals = s.integrals;
    s.Lambda = [integrals](double x) { return std::exp(integrals->log_Lambda(x)); };
    s.mu_density = [&table](double y) { return std::exp(-table.Q(y)); };
    return s;
}

IntegralVerdict check_hypothesis_h(const CoefficientTable& table, double rel_tol) {
    DiffusionIntegrals di(table, rel_tol);
    return check_hypothesis_h(di, rel_tol);
}

IntegralVerdict check_hypothesis_h(const DiffusionIntegrals& di, double rel_tol) {
    const CoefficientTable& table = di.table();
    const IntegralVerdict& mu = di.mu_verdict();
    IntegralVerdict v;
    if (mu.status == IntegralStatus::Divergent) {
        v.status = IntegralStatus::Divergent;
        v.note = "inner integral int_y^inf e^-Q diverges; the integrand is identically infinite";
        const double inf = std::numeric_limits<double>::infinity();
        v.evidence = {{1.0, inf}, {2.0, inf}, {4.0, inf}};
        return v;
    }
    if (mu.status == IntegralStatus::Inconclusive) {
        v.status = IntegralStatus::Inconclusive;
        v.note = "inner integral int_y^inf e^-Q is inconclusive";
        v.evidence = mu.evidence;
        return v;
    }
    auto integrand = [&](double y) {
        di.ensure_mu_tail_covers(y);
        return std::exp(table.Q(y) + di.log_mu_tail(y));
    };
    v = classify_improper(integrand, 0.0, rel_tol);
    assert_h_consistency(v, di.mu_verdict(), di.lambda_verdict());
    return v;
}

void assert_h_consistency(const IntegralVerdict& h, const IntegralVerdict& mu,
                          const IntegralVerdict& lambda) {
    if (!h.convergent()) return;
    if (!lambda.divergent() || !mu.convergent())
        throw InconsistentVerdicts("hypothesis (H) converged but a consequence failed: mu(0,inf) " +
                                   std::string(to_string(mu.status)) + ", Lambda(inf) " +
                                   std::string(to_string(lambda.status)));
}

const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::Regular: return "regular";
        case BoundaryKind::Exit: return "exit";
        case BoundaryKind::Entrance: return "entrance";
        case BoundaryKind::Natural: return "natural";
        case BoundaryKind::Unclassified: return "unclassified";
    }
    return "?";
}

const char* to_string(Endpoint e) { return e == Endpoint::Zero ? "0" : "+inf"; }

BoundaryKind feller_kind(IntegralStatus sigma, IntegralStatus nu) {
    if (sigma == IntegralStatus::Inconclusive || nu == IntegralStatus::Inconclusive)
        return BoundaryKind::Unclassified;
    const bool sc = sigma == IntegralStatus::Convergent;
    const bool nc = nu == IntegralStatus::Convergent;
    if (sc && nc) return BoundaryKind::Regular;
    if (!sc && nc) return BoundaryKind::Entrance;
    if (sc && !nc) return BoundaryKind::Exit;
    return BoundaryKind::Natural;
}

BoundaryClassification classify_boundary(const CoefficientTable& table, Endpoint endpoint) {
    BoundaryClassification out;
    out.endpoint = endpoint;
    if (endpoint == Endpoint::Infinity) {
        DiffusionIntegrals di(table);
        // sigma: int e^Q(y) (int_0^y e^-Q dz) dy, inner via a forward table
        LogForwardCumulative mu_fwd([&table](double y) { return -table.Q(y); }, 0.0,
                                    make_knots(0.0, 64.0, 4.0, 256, 1.05));
        auto sigma_f = [&](double y) { return std::exp(table.Q(y) + mu_fwd.log_value(y)); };
        out.sigma = classify_improper(sigma_f, 0.0, 1e-8);
        out.nu = check_hypothesis_h(di);
        out.kind = feller_kind(out.sigma.status, out.nu.status);
        if (out.kind == BoundaryKind::Unclassified)
            out.detail = "a Feller integral was inconclusive";
        return out;
    }
    // endpoint 0: with q in C1[0,inf) both local integrals are finite and 0
    // is regular; computed as a redundant check over shrinking windows
    const double d = std::min(1.0, table.R());
    auto inner_emQ = [&](double y, double dd) {
        return integrate_finite([&](double z) { return std::exp(-table.Q(z)); }, y, dd, 1e-10)
            .value;
    };
    auto inner_eQ = [&](double y, double dd) {
        return integrate_finite([&](double z) { return std::exp(table.Q(z)); }, y, dd, 1e-10)
            .value;
    };
    auto finite_verdict = [&](bool exit_type) {
        IntegralVerdict v;
        double last = 0;
        for (double dd : {d / 4, d / 2, d}) {
            auto f = [&](double y) {
                return exit_type ? std::exp(-table.Q(y)) * inner_eQ(y, dd)
                                 : std::exp(table.Q(y)) * inner_emQ(y, dd);
            };
            QuadResult q = integrate_finite(f, 0.0, dd, 1e-8);
            v.evidence.emplace_back(dd, q.value);
            last = q.value;
            v.error_estimate = q.error;
        }
        v.status = std::isfinite(last) ? IntegralStatus::Convergent : IntegralStatus::Divergent;
        v.value = last;
        return v;
    };
    out.sigma = finite_verdict(false);
    out.nu = finite_verdict(true);
    out.kind = feller_kind(out.sigma.status, out.nu.status);
    out.detail = "0 is regular for C1 drifts; local integrals computed as a check";
    return out;
}

}  // namespace qsd
