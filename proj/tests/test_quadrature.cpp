#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qsd/logint.hpp"
#include "qsd/quadrature.hpp"

using namespace qsd;

namespace {

// Independent oracle for int_0^x e^{-t^2} dt: the all-positive-term series
// sqrt(pi)/2 erf(x) = x e^{-x^2} sum_n (2x^2)^n / (2n+1)!!
double erf_integral_series(double x) {
    double term = x;
    double sum = term;
    const double tx2 = 2 * x * x;
    for (int n = 1; n < 400; ++n) {
        term *= tx2 / (2 * n + 1);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-x * x);
}

}  // namespace

TEST_CASE("integrate_finite basics") {
    auto one = [](double) { return 1.0; };
    auto r = integrate_finite(one, 0.0, 1.0, 1e-12);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));

    auto gauss = [](double x) { return std::exp(-x * x); };
    double expected = erf_integral_series(6.0);
    CHECK(expected == doctest::Approx(0.886226925452758).epsilon(1e-12));  // frozen from oracle
    auto g = integrate_finite(gauss, 0.0, 6.0, 1e-10);
    CHECK(g.value == doctest::Approx(expected).epsilon(1e-8));

    // integrable endpoint singularity
    auto invsqrt = [](double x) { return 1.0 / std::sqrt(x); };
    auto s = integrate_finite(invsqrt, 0.0, 1.0, 1e-8);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("integrate_finite error paths") {
    auto nanf = [](double x) { return x < 0.5 ? 1.0 : std::nan(""); };
    CHECK_THROWS_AS(integrate_finite(nanf, 0.0, 1.0, 1e-10), NonFiniteEvaluation);
    CHECK_THROWS_AS(integrate_finite([](double) { return 1.0; }, 1.0, 1.0, 1e-10),
                    std::invalid_argument);
    // overflow reports +inf rather than throwing
    auto big = [](double x) { return std::exp(x); };
    auto r = integrate_finite(big, 0.0, 2000.0, 1e-10);
    CHECK(std::isinf(r.value));
}

TEST_CASE("additivity over random smooth integrands") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(0.2, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        double w1 = U(rng), w2 = U(rng), amp = U(rng);
        auto f = [=](double x) { return amp * std::sin(w1 * x) + std::exp(-w2 * x) + 0.3 * x; };
        double a = U(rng), span1 = U(rng), span2 = U(rng);
        double b = a + span1, c = b + span2;
        auto full = integrate_finite(f, a, c, 1e-11);
        auto left = integrate_finite(f, a, b, 1e-11);
        auto right = integrate_finite(f, b, c, 1e-11);
        CHECK(std::abs(full.value - left.value - right.value) <=
              1e-9 + full.error + left.error + right.error + 1e-13 * std::abs(full.value));
    }
}

TEST_CASE("classify_improper: exponential tail converges") {
    auto f = [](double y) { return std::exp(-y); };
    auto v = classify_improper(f, 0.0, 1e-8);
    REQUIRE(v.status == IntegralStatus::Convergent);
    CHECK(v.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(v.error_estimate <= 1e-8 * std::abs(v.value) + 1e-12);
}

TEST_CASE("classify_improper: constants diverge with growing evidence") {
    auto f = [](double) { return 0.5; };  // the (H) integrand for q = 0.5... rises linearly
    auto v = classify_improper(f, 0.0, 1e-8);
    REQUIRE(v.status == IntegralStatus::Divergent);
    CHECK(v.evidence.size() >= 3);
    for (std::size_t i = 1; i < v.evidence.size(); ++i)
        CHECK(v.evidence[i].first > v.evidence[i - 1].first);
}

TEST_CASE("classify_improper: 1/(2y)-like tail diverges") {
    auto f = [](double y) { return 1.0 / (2.0 * y); };
    auto v = classify_improper(f, 1.0, 1e-8);
    REQUIRE(v.status == IntegralStatus::Divergent);
    CHECK(v.tail_slope == doctest::Approx(-1.0).epsilon(0.02));

    auto offset = [](double y) { return 1.0 / (2.0 * (1.0 + y)); };
    CHECK(classify_improper(offset, 0.0, 1e-8).status == IntegralStatus::Divergent);
}

TEST_CASE("classify_improper: power-law calibration family on [1,inf)") {
    for (double p : {1.5, 2.0, 3.0}) {
        auto f = [p](double y) { return std::pow(y, -p); };
        auto v = classify_improper(f, 1.0, 1e-8);
        CAPTURE(p);
        REQUIRE(v.status == IntegralStatus::Convergent);
        CHECK(v.value == doctest::Approx(1.0 / (p - 1.0)).epsilon(1e-8));
    }
    for (double p : {0.5, 1.0}) {
        auto f = [p](double y) { return std::pow(y, -p); };
        auto v = classify_improper(f, 1.0, 1e-8);
        CAPTURE(p);
        CHECK(v.status == IntegralStatus::Divergent);
    }
}

TEST_CASE("monotone consistency: f below a convergent g is never divergent") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> U(0.3, 2.5);
    for (int trial = 0; trial < 25; ++trial) {
        double rate = U(rng), amp = U(rng), frac = 0.2 + 0.3 * U(rng);
        auto g = [=](double y) { return amp * std::exp(-rate * y) + std::pow(1.0 + y, -2.5); };
        auto f = [=](double y) { return frac * g(y) / (1.0 + 0.1 * y); };
        auto vg = classify_improper(g, 0.0, 1e-8);
        REQUIRE(vg.status == IntegralStatus::Convergent);
        auto vf = classify_improper(f, 0.0, 1e-8);
        CHECK(vf.status != IntegralStatus::Divergent);
    }
}

TEST_CASE("sup_scan finds simple maxima") {
    auto parab = [](double x) { return x * (1.0 - x); };
    auto r = sup_scan(parab, 0.0, 1.0);
    CHECK(r.argsup == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.sup == doctest::Approx(0.25).epsilon(1e-8));

    auto s = sup_scan([](double x) { return std::sin(x); }, 0.0, 6.0);
    CHECK(s.argsup == doctest::Approx(M_PI / 2).epsilon(1e-6));
    CHECK(s.sup == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("log-space helpers") {
    CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(log_add_exp(-std::numeric_limits<double>::infinity(), 1.5) == 1.5);
    CHECK(log_sub_exp(std::log(5.0), std::log(3.0)) == doctest::Approx(std::log(2.0)));
    // int_0^10 e^{-y} dy in log space
    double lv = log_integrate_exp([](double y) { return -y; }, 0.0, 10.0);
    CHECK(std::exp(lv) == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-10));
    // steep integrand: int_0^20 e^{-y^4/2} dy, dominated by the boundary layer
    double lsteep = log_integrate_exp([](double y) { return -y * y * y * y / 2; }, 3.0, 40.0);
    // Laplace check: ~ e^{-Q(3)}/Q'(3)
    double approx_log = -40.5 - std::log(4 * 27.0 / 2.0);
    CHECK(lsteep == doctest::Approx(approx_log).epsilon(0.05));
}

TEST_CASE("forward and backward log tables agree with direct integrals") {
    auto phi = [](double y) { return -(y * y); };  // e^{-y^2}
    LogForwardCumulative fwd(phi, 0.0, make_knots(0.0, 12.0, 4.0, 64, 1.1));
    double direct = integrate_finite([](double y) { return std::exp(-y * y); }, 0.0, 1.7, 1e-12)
                        .value;
    CHECK(std::exp(fwd.log_value(1.7)) == doctest::Approx(direct).epsilon(1e-9));
    double seg = integrate_finite([](double y) { return std::exp(-y * y); }, 0.9, 2.3, 1e-12)
                     .value;
    CHECK(std::exp(fwd.log_between(0.9, 2.3)) == doctest::Approx(seg).epsilon(1e-9));

    LogBackwardTail tail(phi, make_knots(0.0, 12.0, 4.0, 64, 1.1));
    double mt = integrate_finite([](double y) { return std::exp(-y * y); }, 1.3, 12.0, 1e-12)
                    .value;
    CHECK(std::exp(tail.log_value(1.3)) == doctest::Approx(mt).epsilon(1e-9));
    // far tail stays meaningful in log space long after doubles underflow
    double l8 = tail.log_value(8.0);
    CHECK(l8 < -60.0);
    CHECK(std::isfinite(l8));
    // Laplace sanity: M(y) ~ e^{-y^2}/(2y)
    CHECK(l8 == doctest::Approx(-64.0 - std::log(16.0)).epsilon(0.01));
}
