#include <dynpair/dynmap.hpp>
#include <dynpair/errors.hpp>

#include <cassert>
#include <cstdlib>
#include <sstream>

namespace dynpair {

MobiusQ::MobiusQ(Int a_, Int b_, Int c_, Int d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    if (det() == 0) throw DomainError("MobiusQ: determinant is zero");
}

int degree_cap() {
    static const int cap = [] {
        if (const char* s = std::getenv("DYNPAIR_DEGREE_CAP")) {
            int v = std::atoi(s);
            if (v >= 2) return v;
        }
        return 5000;
    }();
    return cap;
}

namespace {

// Strip joint content of the pair and make the first nonzero coefficient of
// f0 positive.  Returns the (positive) content removed.
Int normalize_pair(IntBinaryForm& f0, IntBinaryForm& f1) {
    Int c0 = f0.content();
    Int c1 = f1.content();
    Int g;
    mpz_gcd(g.get_mpz_t(), c0.get_mpz_t(), c1.get_mpz_t());
    if (g == 0) throw DomainError("rational map: zero lift");
    auto divide = [&](IntBinaryForm& f) {
        std::vector<Int> v(f.coeffs());
        for (Int& x : v) {
            Int q;
            mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
            x = q;
        }
        f = IntBinaryForm(f.degree(), std::move(v));
    };
    if (g != 1) {
        divide(f0);
        divide(f1);
    }
    bool flip = false;
    for (const Int& x : f0.coeffs()) {
        if (x != 0) {
            flip = x < 0;
            break;
        }
    }
    if (f0.is_zero()) {
        for (const Int& x : f1.coeffs()) {
            if (x != 0) {
                flip = x < 0;
                break;
            }
        }
    }
    if (flip) {
        f0 = -f0;
        f1 = -f1;
    }
    return g;
}

// Substitute the pair (a, b) into the form f: f(a, b).  deg a = deg b.
IntBinaryForm substitute(const IntBinaryForm& f, const IntBinaryForm& a,
                         const IntBinaryForm& b) {
    const int d = f.degree();
    // power tables a^j, b^j for j = 0..d
    std::vector<IntBinaryForm> pa(static_cast<size_t>(d) + 1, IntBinaryForm::constant(Int(1)));
    std::vector<IntBinaryForm> pb(static_cast<size_t>(d) + 1, IntBinaryForm::constant(Int(1)));
    for (int j = 1; j <= d; ++j) {
        pa[static_cast<size_t>(j)] = pa[static_cast<size_t>(j - 1)] * a;
        pb[static_cast<size_t>(j)] = pb[static_cast<size_t>(j - 1)] * b;
    }
    const int D = a.degree() * d;
    IntBinaryForm acc(D, std::vector<Int>(static_cast<size_t>(D) + 1, Int(0)));
    for (int i = 0; i <= d; ++i) {
        const Int& c = f.coeffs()[static_cast<size_t>(i)];
        if (c == 0) continue;
        acc = acc + pa[static_cast<size_t>(d - i)] * pb[static_cast<size_t>(i)] * c;
    }
    return acc;
}

bool is_signed_power(const IntBinaryForm& f, int d, bool& is_x0_power) {
    int nonzero = -1;
    for (int i = 0; i <= d; ++i) {
        if (f.coeffs()[static_cast<size_t>(i)] != 0) {
            if (nonzero >= 0) return false;
            nonzero = i;
        }
    }
    if (nonzero != 0 && nonzero != d) return false;
    const Int& c = f.coeffs()[static_cast<size_t>(nonzero)];
    if (c != 1 && c != -1) return false;
    is_x0_power = (nonzero == 0);
    return true;
}

} // namespace

RationalMap RationalMap::from_forms(IntBinaryForm f0, IntBinaryForm f1) {
    if (f0.degree() != f1.degree())
        throw DomainError("rational map: lift degrees differ");
    const int d = f0.degree();
    if (d < 2) throw DomainError("rational map: degree must be at least two");
    normalize_pair(f0, f1);
    Int res = resultant_binary(f0, f1);
    if (res == 0) throw DomainError("rational map: degenerate lift (zero resultant)");
    return RationalMap(d, std::move(f0), std::move(f1), std::move(res));
}

std::pair<Int, Int> RationalMap::apply(const Int& x0, const Int& x1) const {
    Int y0 = f0_.eval(x0, x1);
    Int y1 = f1_.eval(x0, x1);
    assert(!(y0 == 0 && y1 == 0));
    Int g;
    mpz_gcd(g.get_mpz_t(), y0.get_mpz_t(), y1.get_mpz_t());
    if (g > 1) {
        Int q;
        mpz_divexact(q.get_mpz_t(), y0.get_mpz_t(), g.get_mpz_t());
        y0 = q;
        mpz_divexact(q.get_mpz_t(), y1.get_mpz_t(), g.get_mpz_t());
        y1 = q;
    }
    if (y1 < 0 || (y1 == 0 && y0 < 0)) {
        y0 = -y0;
        y1 = -y1;
    }
    return {std::move(y0), std::move(y1)};
}

bool RationalMap::is_power_map() const {
    bool p0 = false, p1 = false;
    if (!is_signed_power(f0_, deg_, p0)) return false;
    if (!is_signed_power(f1_, deg_, p1)) return false;
    return p0 != p1;
}

std::string RationalMap::str() const {
    std::ostringstream os;
    os << "(" << f0_.str() << ") / (" << f1_.str() << ")";
    return os.str();
}

RationalMap make_map(const IntPolynomial& num, const IntPolynomial& den) {
    if (num.is_zero() && den.is_zero())
        throw DomainError("rational map: zero numerator and denominator");
    int d = std::max(num.degree(), den.degree());
    if (d < 2) throw DomainError("rational map: degree must be at least two");
    return RationalMap::from_forms(IntBinaryForm::homogenize(num, d),
                                   IntBinaryForm::homogenize(den, d));
}

RationalMap make_map(const std::vector<Rat>& num, const std::vector<Rat>& den) {
    // common denominator of all coefficients
    Int lcm(1);
    auto fold = [&](const std::vector<Rat>& v) {
        for (const Rat& r : v) {
            Rat c = r;
            c.canonicalize();
            Int l;
            mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), c.get_den().get_mpz_t());
            lcm = l;
        }
    };
    fold(num);
    fold(den);
    auto clear = [&](const std::vector<Rat>& v) {
        std::vector<Int> out;
        out.reserve(v.size());
        for (const Rat& r : v) {
            Rat c = r * Rat(lcm);
            c.canonicalize();
            assert(c.get_den() == 1);
            out.push_back(c.get_num());
        }
        return IntPolynomial(std::move(out));
    };
    return make_map(clear(num), clear(den));
}

IterateLift iterate_lift(const RationalMap& map, int n) {
    if (n < 1) throw DomainError("iterate_lift: n must be positive");
    double degd = 1;
    for (int i = 0; i < n; ++i) degd *= map.degree();
    if (degd > degree_cap())
        throw ResourceError("iterate_lift: iterate degree exceeds cap");

    IntBinaryForm a = map.lift0(), b = map.lift1();
    Int total(1);
    for (int i = 1; i < n; ++i) {
        IntBinaryForm a2 = substitute(map.lift0(), a, b);
        IntBinaryForm b2 = substitute(map.lift1(), a, b);
        total *= normalize_pair(a2, b2);
        a = std::move(a2);
        b = std::move(b2);
    }
    return {std::move(a), std::move(b), std::move(total)};
}

RationalMap compose(const RationalMap& phi, const RationalMap& psi) {
    double degd = static_cast<double>(phi.degree()) * psi.degree();
    if (degd > degree_cap())
        throw ResourceError("compose: composite degree exceeds cap");
    IntBinaryForm a = substitute(phi.lift0(), psi.lift0(), psi.lift1());
    IntBinaryForm b = substitute(phi.lift1(), psi.lift0(), psi.lift1());
    return RationalMap::from_forms(std::move(a), std::move(b));
}

RationalMap conjugate(const RationalMap& map, const MobiusQ& gamma) {
    const int d = map.degree();
    // Gamma as a degree-1 form pair, substituted into the lift.
    IntBinaryForm g0(1, {gamma.a, gamma.b});
    IntBinaryForm g1(1, {gamma.c, gamma.d});
    IntBinaryForm top(d, std::vector<Int>(static_cast<size_t>(d) + 1, Int(0)));
    IntBinaryForm bot = top;
    {
        // power tables of g0, g1
        std::vector<IntBinaryForm> p0(static_cast<size_t>(d) + 1, IntBinaryForm::constant(Int(1)));
        std::vector<IntBinaryForm> p1 = p0;
        for (int j = 1; j <= d; ++j) {
            p0[static_cast<size_t>(j)] = p0[static_cast<size_t>(j - 1)] * g0;
            p1[static_cast<size_t>(j)] = p1[static_cast<size_t>(j - 1)] * g1;
        }
        for (int i = 0; i <= d; ++i) {
            const Int& c0 = map.lift0().coeffs()[static_cast<size_t>(i)];
            const Int& c1 = map.lift1().coeffs()[static_cast<size_t>(i)];
            IntBinaryForm mono = p0[static_cast<size_t>(d - i)] * p1[static_cast<size_t>(i)];
            if (c0 != 0) top = top + mono * c0;
            if (c1 != 0) bot = bot + mono * c1;
        }
    }
    // post-compose with gamma^(-1) (adjugate suffices projectively)
    MobiusQ inv = gamma.adjugate();
    IntBinaryForm outer0 = top * inv.a + bot * inv.b;
    IntBinaryForm outer1 = top * inv.c + bot * inv.d;
    return RationalMap::from_forms(std::move(outer0), std::move(outer1));
}

RationalMap squaring() {
    return make_map(IntPolynomial::monomial(Int(1), 2), IntPolynomial::constant(Int(1)));
}

RationalMap coc(const Rat& alpha) {
    // alpha - (alpha - x)^2 = -x^2 + 2 alpha x + alpha - alpha^2
    std::vector<Rat> num = {alpha - alpha * alpha, Rat(2) * alpha, Rat(-1)};
    std::vector<Rat> den = {Rat(1)};
    return make_map(num, den);
}

RationalMap quad(const Rat& c) {
    std::vector<Rat> num = {c, Rat(0), Rat(1)};
    std::vector<Rat> den = {Rat(1)};
    return make_map(num, den);
}

RationalMap lattes(long a, long b) {
    if (a < 1 || b < 1) throw DomainError("lattes: parameters must be positive integers");
    Int ab = Int(a) * Int(b);
    // (x0^2 + ab x1^2)^2
    IntBinaryForm top =
        IntBinaryForm(2, {Int(1), Int(0), ab}).pow(2);
    // 4 x0 x1 (x0 - a x1)(x0 + b x1)
    IntBinaryForm bot = IntBinaryForm::x0() * IntBinaryForm::x1() *
                        IntBinaryForm(1, {Int(1), Int(-a)}) *
                        IntBinaryForm(1, {Int(1), Int(b)}) * Int(4);
    return RationalMap::from_forms(std::move(top), std::move(bot));
}

BadReduction bad_reduction_primes(const RationalMap& map) {
    BadReduction out;
    out.complete = true;
    out.unfactored = 1;
    Int n = map.resultant();
    if (n < 0) n = -n;
    if (n == 1) return out;

    Int p(2);
    // trial division by primes up to a fixed budget
    const unsigned long kTrialLimit = 1000000;
    while (mpz_cmp_ui(n.get_mpz_t(), 1) != 0) {
        if (mpz_cmp_ui(p.get_mpz_t(), kTrialLimit) > 0) break;
        if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            out.primes.push_back(p);
            while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
                Int q;
                mpz_divexact(q.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
                n = q;
            }
        }
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        // stop early once p^2 > n: the cofactor is 1 or prime
        Int p2 = p * p;
        if (p2 > n && n != 1) {
            out.primes.push_back(n);
            n = 1;
            break;
        }
    }
    if (n != 1) {
        if (mpz_probab_prime_p(n.get_mpz_t(), 40) > 0) {
            out.primes.push_back(n);
        } else {
            out.complete = false;
            out.unfactored = n;
        }
    }
    return out;
}

} // namespace dynpair
