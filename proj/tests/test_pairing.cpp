#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dynpair/dynmap.hpp>
#include <dynpair/errors.hpp>
#include <dynpair/pairing.hpp>

#include <cmath>

using namespace dynpair;

namespace {

IntPolynomial P(std::vector<long> c) {
    std::vector<Int> v;
    v.reserve(c.size());
    for (long x : c) v.emplace_back(x);
    return IntPolynomial(v);
}

IntBinaryForm B(int deg, std::vector<long> c) {
    std::vector<Int> v;
    v.reserve(c.size());
    for (long x : c) v.emplace_back(x);
    return IntBinaryForm(deg, v);
}

} // namespace

TEST_CASE("periodic forms of the squaring map") {
    // n=1: X0 X1 (X0 - X1)
    CHECK(periodic_form(squaring(), 1) == B(3, {0, 1, -1, 0}));
    // n=2: X0 X1 (X0^3 - X1^3)
    CHECK(periodic_form(squaring(), 2) == B(5, {0, 1, 0, 0, -1, 0}));
}

TEST_CASE("periodic form of x^2 - 1 at n=1 is the golden-ratio form") {
    CHECK(periodic_form(quad(Rat(-1)), 1) == B(3, {0, 1, -1, -1}));
}

TEST_CASE("periodic form degrees and primitivity") {
    for (const auto& map : {coc(Rat(1)), quad(Rat(2)), lattes(1, 1)}) {
        for (int n = 1; n <= 3; ++n) {
            IntBinaryForm F = periodic_form(map, n);
            int expect = 1;
            for (int i = 0; i < n; ++i) expect *= map.degree();
            CHECK(F.degree() == expect + 1);
            CHECK(F.content() == 1);
        }
    }
    CHECK_THROWS_AS(periodic_form(squaring(), 0), DomainError);
}

TEST_CASE("pushforward basics") {
    IntBinaryForm F = B(3, {0, 1, -1, 0});
    CHECK(pushforward_form(F, squaring(), 0) == F);
    // {0, 1, inf} is invariant under squaring
    CHECK(pushforward_form(F, squaring(), 1) == F);

    // x^2 - 2 pushes to (X0 - 2 X1)^2
    CHECK(pushforward_form(B(2, {1, 0, -2}), squaring(), 1) == B(2, {1, -4, 4}));

    // the root at infinity maps through: {inf, 1} -> {inf, 2} under x^2 + 1
    CHECK(pushforward_form(B(2, {0, 1, -1}), quad(Rat(1)), 1) == B(2, {0, 1, -2}));
}

TEST_CASE("pushforward matches pointwise images on a separable quartic") {
    // roots of (x^2-3)(x^2+2) map under x^2+1 to {4, 4, -1, -1}
    IntPolynomial prod = P({-3, 0, 1}) * P({2, 0, 1});
    IntBinaryForm F = IntBinaryForm::homogenize(prod, 4);
    IntPolynomial expect = P({-4, 1}) * P({-4, 1}) * P({1, 1}) * P({1, 1});
    CHECK(pushforward_form(F, quad(Rat(1)), 1) == IntBinaryForm::homogenize(expect, 4));
}

TEST_CASE("two pushforward steps compose") {
    IntBinaryForm F = B(2, {1, 0, -2}); // x^2 - 2
    IntBinaryForm one = pushforward_form(pushforward_form(F, quad(Rat(1)), 1), quad(Rat(1)), 1);
    IntBinaryForm two = pushforward_form(F, quad(Rat(1)), 2);
    CHECK(one == two);
}

TEST_CASE("diagonal estimates vanish for monomial maps") {
    for (int n = 1; n <= 5; ++n) {
        auto est = pairing_estimate(squaring(), squaring(), n, std::min(n, 2));
        CHECK(std::fabs(est.value) <= est.error_bound + 1e-12);
        CHECK(est.form_degree == (1 << n) + 1);
    }
    RationalMap cube = make_map(P({0, 0, 0, 1}), P({1}));
    for (int n = 1; n <= 3; ++n) {
        CHECK(std::fabs(pairing_estimate(squaring(), cube, n, 0).value) <= 1e-12);
        CHECK(std::fabs(pairing_estimate(cube, squaring(), n, 0).value) <= 1e-12);
    }
}

TEST_CASE("golden-ratio pairing estimate at small indices") {
    // the period-1 form of x^2 - 1 is x1 (x0^2 - x0 x1 - x1^2), so the n=1
    // estimate is exactly m(x^2 - x - 1) / 3 = log(golden) / 3
    double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    auto est = pairing_estimate(squaring(), quad(Rat(-1)), 1, 0);
    CHECK(std::fabs(est.value - golden / 3.0) <= est.error_bound + 1e-12);
    CHECK(est.value == doctest::Approx(golden / 3.0).epsilon(1e-6));
    // one squaring step sends the root pair to (golden^2, golden^-2) and the
    // k-normalization divides the doubled measure straight back out
    auto est1 = pairing_estimate(squaring(), quad(Rat(-1)), 1, 1);
    CHECK(std::fabs(est1.value - golden / 3.0) <= est1.error_bound + 1e-12);
}

TEST_CASE("estimates are nonnegative within numeric error") {
    for (int n = 1; n <= 3; ++n)
        for (int k = 0; k <= 2; ++k) {
            auto est = pairing_estimate(quad(Rat(1)), quad(Rat(-1)), n, k);
            CHECK(est.value >= -est.error_bound);
        }
}

TEST_CASE("pairing against a large-alpha conjugate approaches its height") {
    // for x -> alpha x^2 / ((alpha - 1) x + ...) style conjugates with
    // |alpha| >= 2 the limit is log alpha; at n=6 the estimate is close
    auto est = pairing_estimate(squaring(), coc(Rat(3)), 6, 0);
    CHECK(std::fabs(est.value - std::log(3.0)) < 0.05);
}

TEST_CASE("schedule runner forces k to zero for power maps and tracks history") {
    auto est = pairing_converged(squaring(), squaring(), default_schedule(3), 1e-9);
    REQUIRE(est.history.size() == 3);
    for (const auto& h : est.history) {
        CHECK(h.k == 0);
        CHECK(std::fabs(h.value) <= 1e-12);
    }
    CHECK(est.stable);
    CHECK(est.k == 0);

    CHECK_THROWS_AS(pairing_converged(squaring(), squaring(), {}, 1e-3), DomainError);
    CHECK_THROWS_AS(pairing_converged(squaring(), squaring(), {{2, 0}, {2, 0}}, 1e-3),
                    DomainError);
}

TEST_CASE("schedule runner keeps k for non-power maps") {
    auto est = pairing_converged(quad(Rat(-1)), squaring(), {{1, 1}, {2, 2}}, 10.0);
    CHECK(est.history.size() == 2);
    CHECK(est.history[1].k == 2);
}

TEST_CASE("local pairing at good finite places") {
    CHECK(local_pairing_good_reduction({Int(0), Int(1)}, {Int(1), Int(0)}, Int(5)) == 0.0);
    CHECK(local_pairing_good_reduction({Int(1), Int(0)}, {Int(5), Int(1)}, Int(5)) == 0.0);
    CHECK(local_pairing_good_reduction({Int(1), Int(1)}, {Int(1), Int(-1)}, Int(2)) ==
          doctest::Approx(-std::log(2.0)));
    // scale invariance
    CHECK(local_pairing_good_reduction({Int(6), Int(6)}, {Int(1), Int(-1)}, Int(2)) ==
          doctest::Approx(-std::log(2.0)));
    // valuations pile up: s = (4,1), t = (4+32,1): cross = -32
    CHECK(local_pairing_good_reduction({Int(4), Int(1)}, {Int(36), Int(1)}, Int(2)) ==
          doctest::Approx(-5.0 * std::log(2.0)));

    CHECK_THROWS_AS(local_pairing_good_reduction({Int(2), Int(1)}, {Int(4), Int(2)}, Int(3)),
                    DomainError);
    CHECK_THROWS_AS(local_pairing_good_reduction({Int(0), Int(1)}, {Int(1), Int(0)}, Int(6)),
                    DomainError);
}
