#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dynpair/bigpoly.hpp>
#include <dynpair/errors.hpp>
#include <dynpair/mahler.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace dynpair;

namespace {

IntPolynomial P(std::vector<long> c) {
    std::vector<Int> v;
    v.reserve(c.size());
    for (long x : c) v.emplace_back(x);
    return IntPolynomial(v);
}

IntPolynomial random_poly(std::mt19937& rng, int degree) {
    std::uniform_int_distribution<int> coef(-9, 9);
    std::vector<Int> c(static_cast<size_t>(degree) + 1);
    for (auto& x : c) x = coef(rng);
    while (c.back() == 0) c.back() = coef(rng);
    return IntPolynomial(c);
}

// match each expected root to a distinct computed one within its radius
void check_root_multiset(const RootSet& rs, std::vector<std::complex<double>> expected,
                         double slack = 1e-13) {
    REQUIRE(rs.roots.size() == expected.size());
    std::vector<char> used(rs.roots.size(), 0);
    for (const auto& e : expected) {
        bool found = false;
        for (size_t i = 0; i < rs.roots.size(); ++i) {
            if (used[i]) continue;
            if (std::abs(rs.roots[i] - e) <= rs.radii[i] + slack) {
                used[i] = 1;
                found = true;
                break;
            }
        }
        CAPTURE(e.real());
        CAPTURE(e.imag());
        CHECK(found);
    }
}

} // namespace

TEST_CASE("measure of linear and constant polynomials") {
    auto v = log_mahler(P({-2, 1}), 1e-13); // x - 2
    CHECK(std::fabs(v.value - std::log(2.0)) <= 1e-12);
    CHECK(v.error_bound <= 1e-12);

    v = log_mahler(P({-3, 2})); // 2x - 3: |lead| * |root| = 3
    CHECK(std::fabs(v.value - std::log(3.0)) <= 1e-12);

    v = log_mahler(P({-3, 5})); // root inside the unit circle
    CHECK(std::fabs(v.value - std::log(5.0)) <= 1e-12);

    v = log_mahler(P({6}));
    CHECK(std::fabs(v.value - std::log(6.0)) <= 1e-12);

    v = log_mahler(P({0, 0, 0, 1})); // x^3
    CHECK(v.value == 0.0);

    v = log_mahler(P({-6, 0, 6})); // content 6 times x^2 - 1
    CHECK(std::fabs(v.value - std::log(6.0)) <= 1e-10);

    CHECK_THROWS_AS(log_mahler(IntPolynomial{}), DomainError);
    CHECK_THROWS_AS(log_mahler(P({1, 1}), 0.0), DomainError);
}

TEST_CASE("golden ratio quadratic") {
    auto v = log_mahler(P({-1, -1, 1}), 1e-11);
    double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::fabs(v.value - std::log(phi)) <= v.error_bound + 1e-15);
    CHECK(v.error_bound <= 1e-11);
}

TEST_CASE("Lehmer's degree-10 polynomial") {
    auto v = log_mahler(P({1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1}));
    CHECK(std::fabs(v.value - 0.1623576120077381) <= 1e-9);
    CHECK(std::fabs(v.value - 0.1623576120077381) <= v.error_bound + 1e-15);
}

TEST_CASE("products of cyclotomics measure zero") {
    IntPolynomial f = P({-1, 1}) * P({1, 1}) * P({1, 1, 1}) * P({1, 0, 1}) * P({1, 0, 0, 0, 1});
    auto v = log_mahler(f, 1e-11);
    CHECK(std::fabs(v.value) <= 1e-10);

    // repeated factors force genuine root clusters
    IntPolynomial sq = P({1, 1, 1}) * P({1, 1, 1});
    v = log_mahler(sq, 1e-8);
    CHECK(std::fabs(v.value) <= 1e-8);
}

TEST_CASE("ill-conditioned iterated-map polynomial against closed form") {
    // (1-x) - (1-x)^16 has roots x = 1 and x = 1 - zeta for 15th roots of
    // unity zeta, so the measure is sum of log+ 2 sin(pi k/15).
    IntPolynomial u = P({1, -1});
    IntPolynomial u16 = u;
    for (int i = 0; i < 15; ++i) u16 = u16 * u;
    IntPolynomial f = u + (-u16);
    REQUIRE(f.degree() == 16);
    double ref = 0.0;
    for (int k = 1; k <= 14; ++k) ref += std::max(0.0, std::log(2.0 * std::sin(M_PI * k / 15.0)));
    auto v = log_mahler(f, 1e-10);
    CHECK(std::fabs(v.value - ref) <= v.error_bound + 1e-13);
    CHECK(std::fabs(v.value - ref) <= 1e-10);
}

TEST_CASE("multiplicativity on random products") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> deg(2, 6);
    for (int iter = 0; iter < 25; ++iter) {
        IntPolynomial f = random_poly(rng, deg(rng));
        IntPolynomial g = random_poly(rng, deg(rng));
        auto vf = log_mahler(f, 1e-10);
        auto vg = log_mahler(g, 1e-10);
        auto vfg = log_mahler(f * g, 1e-10);
        CHECK(std::fabs(vfg.value - vf.value - vg.value) <=
              vf.error_bound + vg.error_bound + vfg.error_bound + 1e-12);
    }
}

TEST_CASE("invariance under x -> -x and coefficient reversal") {
    std::mt19937 rng(77);
    for (int iter = 0; iter < 15; ++iter) {
        IntPolynomial f = random_poly(rng, 5);
        if (f.coeff(0) == 0) continue;
        std::vector<Int> c = f.coeffs();
        std::vector<Int> neg = c, rev = c;
        for (size_t i = 1; i < neg.size(); i += 2) neg[i] = -neg[i];
        std::reverse(rev.begin(), rev.end());
        auto v = log_mahler(f, 1e-10);
        auto vn = log_mahler(IntPolynomial(neg), 1e-10);
        auto vr = log_mahler(IntPolynomial(rev), 1e-10);
        CHECK(std::fabs(v.value - vn.value) <= 2e-10);
        CHECK(std::fabs(v.value - vr.value) <= 2e-10);
    }
}

TEST_CASE("roots of simple quadratics and cubics") {
    RootSet rs = complex_roots(P({1, 0, 1}), 1e-13); // x^2 + 1
    check_root_multiset(rs, {{0.0, 1.0}, {0.0, -1.0}});
    for (double r : rs.radii) CHECK(r <= 1e-13);
    CHECK(rs.residual <= 1e-10);

    rs = complex_roots(P({-1, 0, 0, 1}), 1e-12); // x^3 - 1
    REQUIRE(rs.roots.size() == 3);
    std::complex<double> sum = 0.0, prod = 1.0;
    for (const auto& z : rs.roots) {
        CHECK(std::fabs(std::abs(z) - 1.0) <= 1e-12);
        sum += z;
        prod *= z;
    }
    CHECK(std::abs(sum) <= 1e-11);
    CHECK(std::abs(prod - 1.0) <= 1e-11);
}

TEST_CASE("zero roots are reported exactly") {
    RootSet rs = complex_roots(P({0, 0, -2, 0, 1}), 1e-12); // x^2 (x^2 - 2)
    double s2 = std::sqrt(2.0);
    check_root_multiset(rs, {{0.0, 0.0}, {0.0, 0.0}, {s2, 0.0}, {-s2, 0.0}});
    int exact_zeros = 0;
    for (size_t i = 0; i < rs.roots.size(); ++i)
        if (rs.roots[i] == std::complex<double>(0.0, 0.0) && rs.radii[i] == 0.0) ++exact_zeros;
    CHECK(exact_zeros == 2);
}

TEST_CASE("integer roots of a shifted factorial polynomial") {
    // prod (x - k), k = 1..12: exercises the recentering path
    IntPolynomial f = P({-1, 1});
    for (long k = 2; k <= 12; ++k) f = f * P({-k, 1});
    RootSet rs = complex_roots(f, 1e-10);
    std::vector<std::complex<double>> expected;
    for (int k = 1; k <= 12; ++k) expected.emplace_back(static_cast<double>(k), 0.0);
    check_root_multiset(rs, expected, 1e-10);
}

TEST_CASE("multiple roots come back as certified clusters") {
    // (x - 1)^3 (x + 2)^2
    IntPolynomial f = P({-1, 1}) * P({-1, 1}) * P({-1, 1}) * P({2, 1}) * P({2, 1});
    RootSet rs = complex_roots(f, 1e-6);
    check_root_multiset(rs, {{1, 0}, {1, 0}, {1, 0}, {-2, 0}, {-2, 0}}, 1e-6);
}

TEST_CASE("linear and degenerate inputs to complex_roots") {
    RootSet rs = complex_roots(P({-7, 2}), 1e-10);
    REQUIRE(rs.roots.size() == 1);
    CHECK(std::abs(rs.roots[0] - std::complex<double>(3.5, 0.0)) <= rs.radii[0] + 1e-15);

    CHECK_THROWS_AS(complex_roots(IntPolynomial{}, 1e-10), DomainError);
    CHECK_THROWS_AS(complex_roots(P({1, 1}), -1.0), DomainError);
}

TEST_CASE("form measure matches dehomogenized measure and ignores infinity") {
    IntBinaryForm F(2, {Int(1), Int(0), Int(-4)}); // x0^2 - 4 x1^2
    auto v = log_mahler_form(F, 1e-11);
    CHECK(std::fabs(v.value - std::log(4.0)) <= 1e-10);

    IntBinaryForm G(1, {Int(0), Int(3)}); // 3 x1: only the root at infinity
    v = log_mahler_form(G);
    CHECK(std::fabs(v.value - std::log(3.0)) <= 1e-12);

    CHECK_THROWS_AS(log_mahler_form(IntBinaryForm(1, {Int(0), Int(0)})), DomainError);
}

TEST_CASE("certificates cover the truth for algebraic references") {
    // all four roots of x^4 - 2 sit at modulus 2^(1/4)
    auto v = log_mahler(P({-2, 0, 0, 0, 1}), 1e-11);
    CHECK(std::fabs(v.value - std::log(2.0)) <= v.error_bound + 1e-14);
    v = log_mahler(P({-1, 0, 2}), 1e-11);
    CHECK(std::fabs(v.value - std::log(2.0)) <= v.error_bound + 1e-14);
}
