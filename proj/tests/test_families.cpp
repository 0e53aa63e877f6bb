#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dynpair/dynmap.hpp>
#include <dynpair/errors.hpp>
#include <dynpair/families.hpp>
#include <dynpair/pairing.hpp>

#include <cmath>
#include <functional>

using namespace dynpair;

namespace {

const double kPi = 3.14159265358979323846;

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double tol, int depth) {
    double m = 0.5 * (a + b);
    double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double two = left + right;
    if (depth <= 0 || std::fabs(two - whole) < 15.0 * tol)
        return two + (two - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    return simpson_rec(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 40);
}

} // namespace

TEST_CASE("circle integral vanishes at the exact ends") {
    for (double t : {0.0, 2.0, 3.0, 100.0}) {
        auto q = I_of_t(t, 1e-12);
        CHECK(q.value == 0.0);
        CHECK(q.error_estimate == 0.0);
        CHECK(q.evaluations == 0);
    }
    CHECK_THROWS_AS(I_of_t(-0.5, 1e-9), DomainError);
    CHECK_THROWS_AS(I_of_t(1.0, 0.0), DomainError);
}

TEST_CASE("positive and negative arcs agree through Jensen's formula") {
    // the mean of log|t + e^(i phi)| over the circle is log+ t, so the
    // positive-part integral must equal minus the integral over the
    // complementary arc, which we compute here with an unrelated rule
    for (double t : {0.3, 0.6, 0.9, 1.3, 1.7}) {
        double cross = std::acos(-0.5 * t);
        auto f = [t](double phi) { return std::log(t * (t + 2.0 * std::cos(phi)) + 1.0); };
        double complement = -simpson(f, cross, kPi, 1e-11) / (2.0 * kPi);
        CHECK(std::fabs(I_of_t(t, 1e-10).value - complement) <= 1e-8);
    }
}

TEST_CASE("series and quadrature meet at t = 1") {
    double s = smyth_constant(1e-12);
    CHECK(std::fabs(s - 0.3230659472) <= 1e-9);
    CHECK(std::fabs(s - 0.323067) <= 5e-6); // headline rounding
    auto q = I_of_t(1.0, 1e-10);
    CHECK(std::fabs(q.value - s) <= q.error_estimate + 2e-12);
    CHECK(q.error_estimate <= 1.1e-10);
    // rearranged back to the L-value
    CHECK(4.0 * kPi / (3.0 * std::sqrt(3.0)) * s == doctest::Approx(0.7813024129).epsilon(1e-8));
    // coarse and fine tolerances agree
    CHECK(std::fabs(smyth_constant(1e-6) - s) <= 1.1e-6);
    CHECK_THROWS_AS(smyth_constant(0.0), DomainError);
}

TEST_CASE("shape of the circle integral") {
    double prev = -1.0;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) { // increasing up to 1
        double v = I_of_t(t, 1e-10).value;
        CHECK(v >= 0.0);
        CHECK(v > prev + 1e-6);
        prev = v;
    }
    prev = 2.0;
    for (double t : {1.1, 1.4, 1.7, 1.95}) { // decreasing past 1
        double v = I_of_t(t, 1e-10).value;
        CHECK(v >= 0.0);
        CHECK(v < prev - 1e-6);
        prev = v;
    }
    double peak = I_of_t(1.0, 1e-10).value;
    for (double t : {0.2, 0.8, 0.99, 1.01, 1.5}) {
        CHECK(I_of_t(t, 1e-10).value <= peak + 1e-9);
    }
}

TEST_CASE("conjugated-squaring pairing closed form") {
    double s = smyth_constant(1e-12);
    CHECK(std::fabs(coc_pairing_exact(Rat(1), 1e-10) - s) <= 1e-8);
    CHECK(coc_pairing_exact(Rat(3), 1e-10) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(coc_pairing_exact(Rat(0), 1e-10) == 0.0);
    CHECK(coc_pairing_exact(Rat(-7), 1e-10) == doctest::Approx(std::log(7.0)).epsilon(1e-12));
    // value always sits between the height and height + I(1)
    for (const Rat& alpha : {Rat(1, 2), Rat(-3, 2), Rat(7, 5)}) {
        double h = std::log(
            std::max(std::fabs(alpha.get_num().get_d()), alpha.get_den().get_d()));
        double v = coc_pairing_exact(alpha, 1e-10);
        CHECK(v >= h - 1e-9);
        CHECK(v <= h + s + 1e-9);
    }
}

TEST_CASE("two-sided bounds for the quadratic family") {
    auto z = quad_pairing_bounds(Rat(0));
    CHECK(z.lo == doctest::Approx(-std::log(3.0)));
    CHECK(z.hi == doctest::Approx(std::log(2.0)));
    CHECK(z.lo < 0.0);
    CHECK(z.hi > 0.0); // the true value 0 lies inside

    auto w = quad_pairing_bounds(Rat(12));
    CHECK(w.lo == doctest::Approx(0.1438).epsilon(2e-3));
    CHECK(w.hi == doctest::Approx(1.9356).epsilon(2e-3));

    auto v = quad_pairing_bounds(Rat(-7));
    CHECK(v.lo == doctest::Approx(0.5 * std::log(7.0) - std::log(3.0)).epsilon(1e-12));
    CHECK(v.hi == doctest::Approx(0.5 * std::log(7.0) + std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("angular kernel basics") {
    auto q = F_alpha_beta(0.0, 0.0, 1e-10);
    CHECK(q.value == doctest::Approx(2.0 * kPi).epsilon(1e-12));

    auto s1 = F_alpha_beta(0.3, 1.7, 1e-10);
    auto s2 = F_alpha_beta(1.7, 0.3, 1e-10);
    CHECK(std::fabs(s1.value - s2.value) <= s1.error_estimate + s2.error_estimate + 1e-12);

    for (auto [al, be] : {std::pair{2.5, 1.6}, std::pair{3.0, 7.0}}) {
        auto big = F_alpha_beta(al, be, 1e-11);
        auto inv = F_alpha_beta(1.0 / al, 1.0 / be, 1e-11);
        CHECK(std::fabs(inv.value - al * be * big.value) <=
              inv.error_estimate + al * be * big.error_estimate + 1e-9);
    }

    CHECK_THROWS_AS(F_alpha_beta(1.0, 0.5, 1e-9), DomainError);
    CHECK_THROWS_AS(F_alpha_beta(0.5, 1.0, 1e-9), DomainError);
    CHECK_THROWS_AS(F_alpha_beta(-0.1, 0.5, 1e-9), DomainError);
}

TEST_CASE("lattes quadrature data is coherent") {
    auto d = lattes_pairing_quadrature(1, 1, 1e-5);
    CHECK(d.c_p.value > 0.0);
    CHECK(d.theta.value >= -d.theta.error_estimate);
    CHECK(std::isfinite(d.c_p.error_estimate));
    CHECK(d.c_p.evaluations > 0);
    CHECK(d.pairing_value == doctest::Approx(d.theta.value)); // log sqrt(1) = 0
    CHECK(std::fabs(d.logplus_integral.value - d.theta.value) <= 1e-3);
    CHECK(d.pairing_error <= 5e-3);

    // bit-for-bit determinism of the whole pipeline
    auto d2 = lattes_pairing_quadrature(1, 1, 1e-5);
    CHECK(d2.pairing_value == d.pairing_value);
    CHECK(d2.c_p.value == d.c_p.value);
    CHECK(d2.theta.evaluations == d.theta.evaluations);

    auto e = lattes_pairing_quadrature(1, 2, 1e-5);
    CHECK(e.pairing_value >= 0.5 * std::log(2.0) - 1e-3);
    CHECK(e.theta.value >= -e.theta.error_estimate);
    CHECK(std::fabs(e.logplus_integral.value - e.pairing_value) <= 1e-3);

    CHECK_THROWS_AS(lattes_pairing_quadrature(0, 1, 1e-6), DomainError);
    CHECK_THROWS_AS(lattes_pairing_quadrature(1, 1, -1.0), DomainError);
}

TEST_CASE("lattes quadrature tracks the periodic-point estimator") {
    auto d = lattes_pairing_quadrature(1, 1, 1e-5);
    auto est = pairing_estimate(squaring(), lattes(1, 1), 3, 0);
    CHECK(std::fabs(d.pairing_value - est.value) <= 0.35);
}

TEST_CASE("unreachable tolerance degrades with the best value") {
    try {
        I_of_t(1.0, 1e-25);
        FAIL("expected non-convergence");
    } catch (const ConvergenceError& e) {
        CHECK(std::fabs(e.best_value - 0.3230659472) <= 1e-3);
        CHECK(e.best_error > 0.0);
        CHECK(e.best_error < 1e-3);
    }
}
