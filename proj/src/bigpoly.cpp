#include "dynpair/bigpoly.hpp"

#include "dynpair/errors.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace dynpair {

namespace {

const Int kZero(0);

std::vector<Int> trim(std::vector<Int> c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
}

Int vec_content(const std::vector<Int>& c) {
    Int g(0);
    for (const Int& x : c) {
        if (x == 0) continue;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g; // 0 when all coefficients vanish
}

} // namespace

// ---------------------------------------------------------------------------
// IntPolynomial

IntPolynomial::IntPolynomial(std::vector<Int> coeffs) : c_(trim(std::move(coeffs))) {}

IntPolynomial IntPolynomial::constant(Int c) { return IntPolynomial(std::vector<Int>{std::move(c)}); }

IntPolynomial IntPolynomial::monomial(Int c, int power) {
    std::vector<Int> v(static_cast<size_t>(power) + 1, Int(0));
    v.back() = std::move(c);
    return IntPolynomial(std::move(v));
}

const Int& IntPolynomial::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return kZero;
    return c_[static_cast<size_t>(i)];
}

const Int& IntPolynomial::leading() const {
    assert(!c_.empty());
    return c_.back();
}

IntPolynomial IntPolynomial::operator-() const {
    std::vector<Int> v(c_);
    for (Int& x : v) x = -x;
    return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::operator+(const IntPolynomial& o) const {
    std::vector<Int> v(std::max(c_.size(), o.c_.size()), Int(0));
    for (size_t i = 0; i < c_.size(); ++i) v[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) v[i] += o.c_[i];
    return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::operator-(const IntPolynomial& o) const { return *this + (-o); }

IntPolynomial IntPolynomial::operator*(const IntPolynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Int> v(c_.size() + o.c_.size() - 1, Int(0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            if (o.c_[j] == 0) continue;
            v[i + j] += c_[i] * o.c_[j];
        }
    }
    return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::operator*(const Int& s) const {
    if (s == 0) return {};
    std::vector<Int> v(c_);
    for (Int& x : v) x *= s;
    return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Int> v(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * static_cast<long>(i);
    return IntPolynomial(std::move(v));
}

Int IntPolynomial::content() const { return vec_content(c_); }

Int IntPolynomial::eval(const Int& x) const {
    Int r(0);
    for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
    return r;
}

Rat IntPolynomial::eval(const Rat& x) const {
    Rat r(0);
    for (size_t i = c_.size(); i-- > 0;) r = r * x + Rat(c_[i]);
    return r;
}

std::string IntPolynomial::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        Int a = c_[i];
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        Int mag = abs(a);
        if (mag != 1 || i == 0) os << mag.get_str();
        if (i > 0) {
            if (mag != 1) os << "*";
            os << "x";
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// IntBinaryForm

IntBinaryForm::IntBinaryForm(int degree, std::vector<Int> coeffs)
    : deg_(degree), c_(std::move(coeffs)) {
    if (degree < 0 || c_.size() != static_cast<size_t>(degree) + 1)
        throw DomainError("binary form needs degree+1 coefficients");
}

IntBinaryForm IntBinaryForm::x0() { return IntBinaryForm(1, {Int(1), Int(0)}); }
IntBinaryForm IntBinaryForm::x1() { return IntBinaryForm(1, {Int(0), Int(1)}); }
IntBinaryForm IntBinaryForm::constant(Int c) { return IntBinaryForm(0, {std::move(c)}); }

IntBinaryForm IntBinaryForm::homogenize(const IntPolynomial& p, int degree) {
    if (p.degree() > degree) throw DomainError("homogenize: degree too small");
    std::vector<Int> v(static_cast<size_t>(degree) + 1, Int(0));
    // coeff of x0^(degree-i) x1^i is p's coefficient of x^(degree-i)
    for (int i = 0; i <= degree; ++i) v[static_cast<size_t>(i)] = p.coeff(degree - i);
    return IntBinaryForm(degree, std::move(v));
}

bool IntBinaryForm::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Int& x) { return x == 0; });
}

IntBinaryForm IntBinaryForm::operator-() const {
    std::vector<Int> v(c_);
    for (Int& x : v) x = -x;
    return IntBinaryForm(deg_, std::move(v));
}

IntBinaryForm IntBinaryForm::operator+(const IntBinaryForm& o) const {
    if (deg_ != o.deg_) throw DomainError("form addition needs equal degrees");
    std::vector<Int> v(c_);
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.c_[i];
    return IntBinaryForm(deg_, std::move(v));
}

IntBinaryForm IntBinaryForm::operator-(const IntBinaryForm& o) const { return *this + (-o); }

IntBinaryForm IntBinaryForm::operator*(const IntBinaryForm& o) const {
    std::vector<Int> v(static_cast<size_t>(deg_ + o.deg_) + 1, Int(0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            if (o.c_[j] == 0) continue;
            v[i + j] += c_[i] * o.c_[j];
        }
    }
    return IntBinaryForm(deg_ + o.deg_, std::move(v));
}

IntBinaryForm IntBinaryForm::operator*(const Int& s) const {
    std::vector<Int> v(c_);
    for (Int& x : v) x *= s;
    return IntBinaryForm(deg_, std::move(v));
}

IntBinaryForm IntBinaryForm::pow(int e) const {
    IntBinaryForm r = IntBinaryForm::constant(Int(1));
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
}

Int IntBinaryForm::content() const { return vec_content(c_); }

Int IntBinaryForm::eval(const Int& a0, const Int& a1) const {
    Int acc(0);
    Int p0(1);
    std::vector<Int> pow0(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
        pow0[i] = p0;
        p0 *= a0;
    }
    Int p1(1);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] != 0) acc += c_[i] * pow0[c_.size() - 1 - i] * p1;
        p1 *= a1;
    }
    return acc;
}

IntPolynomial IntBinaryForm::dehomogenize() const {
    std::vector<Int> v(static_cast<size_t>(deg_) + 1);
    for (int i = 0; i <= deg_; ++i) v[static_cast<size_t>(i)] = c_[static_cast<size_t>(deg_ - i)];
    return IntPolynomial(std::move(v));
}

std::string IntBinaryForm::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        Int a = c_[i];
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        Int mag = abs(a);
        int p0 = deg_ - static_cast<int>(i);
        int p1 = static_cast<int>(i);
        bool unit = (mag == 1) && (p0 > 0 || p1 > 0);
        if (!unit) os << mag.get_str();
        if (p0 > 0) {
            if (!unit) os << "*";
            os << "x0";
            if (p0 > 1) os << "^" << p0;
            unit = false;
        }
        if (p1 > 0) {
            if (!unit) os << "*";
            os << "x1";
            if (p1 > 1) os << "^" << p1;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Content / primitive

ContentPrimitive<IntPolynomial> content_primitive(const IntPolynomial& f) {
    Int c = f.content();
    if (c == 0) return {Int(0), IntPolynomial{}};
    std::vector<Int> v(f.coeffs());
    bool flip = v.back() < 0;
    for (Int& x : v) {
        Int q;
        mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
        x = flip ? Int(-q) : q;
    }
    return {std::move(c), IntPolynomial(std::move(v))};
}

ContentPrimitive<IntBinaryForm> content_primitive(const IntBinaryForm& f) {
    Int c = f.content();
    if (c == 0) return {Int(0), IntBinaryForm(f.degree(), std::vector<Int>(f.coeffs().size(), Int(0)))};
    std::vector<Int> v(f.coeffs());
    bool flip = false;
    for (const Int& x : v) {
        if (x != 0) {
            flip = x < 0;
            break;
        }
    }
    for (Int& x : v) {
        Int q;
        mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
        x = flip ? Int(-q) : q;
    }
    return {std::move(c), IntBinaryForm(f.degree(), std::move(v))};
}

// ---------------------------------------------------------------------------
// Resultants

namespace detail {

namespace {

int actual_degree(const std::vector<Int>& c) {
    for (size_t i = c.size(); i-- > 0;)
        if (c[i] != 0) return static_cast<int>(i);
    return -1;
}

Int int_pow(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

void mul_pow(Rat& acc, const Int& base, long e) {
    if (e == 0) return;
    Int p = int_pow(base, static_cast<unsigned long>(e < 0 ? -e : e));
    if (e > 0)
        acc *= Rat(p);
    else
        acc /= Rat(p);
}

} // namespace

Int resultant_bareiss(const std::vector<Int>& f, int m, const std::vector<Int>& g, int n) {
    int dim = m + n;
    if (dim == 0) return Int(1);
    std::vector<std::vector<Int>> M(static_cast<size_t>(dim),
                                    std::vector<Int>(static_cast<size_t>(dim), Int(0)));
    auto fc = [&](int i) -> Int { return i >= 0 && i < static_cast<int>(f.size()) ? f[static_cast<size_t>(i)] : Int(0); };
    auto gc = [&](int i) -> Int { return i >= 0 && i < static_cast<int>(g.size()) ? g[static_cast<size_t>(i)] : Int(0); };
    for (int r = 0; r < n; ++r)
        for (int j = 0; j <= m; ++j) M[static_cast<size_t>(r)][static_cast<size_t>(r + j)] = fc(m - j);
    for (int r = 0; r < m; ++r)
        for (int j = 0; j <= n; ++j) M[static_cast<size_t>(n + r)][static_cast<size_t>(r + j)] = gc(n - j);

    int sign = 1;
    Int prev(1);
    for (int k = 0; k + 1 < dim; ++k) {
        if (M[static_cast<size_t>(k)][static_cast<size_t>(k)] == 0) {
            int piv = -1;
            for (int i = k + 1; i < dim; ++i)
                if (M[static_cast<size_t>(i)][static_cast<size_t>(k)] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return Int(0);
            std::swap(M[static_cast<size_t>(k)], M[static_cast<size_t>(piv)]);
            sign = -sign;
        }
        const Int& pk = M[static_cast<size_t>(k)][static_cast<size_t>(k)];
        for (int i = k + 1; i < dim; ++i) {
            for (int j = k + 1; j < dim; ++j) {
                Int t = M[static_cast<size_t>(i)][static_cast<size_t>(j)] * pk -
                        M[static_cast<size_t>(i)][static_cast<size_t>(k)] * M[static_cast<size_t>(k)][static_cast<size_t>(j)];
                mpz_divexact(M[static_cast<size_t>(i)][static_cast<size_t>(j)].get_mpz_t(), t.get_mpz_t(),
                             prev.get_mpz_t());
            }
            M[static_cast<size_t>(i)][static_cast<size_t>(k)] = 0;
        }
        prev = pk;
    }
    Int det = M[static_cast<size_t>(dim - 1)][static_cast<size_t>(dim - 1)];
    return sign < 0 ? Int(-det) : det;
}

// Pseudo-remainder of f by g (deg f >= deg g >= 0, g nonzero) that only scales
// by lc(g) when the leading term does not divide exactly. Returns the number
// of scalings applied, so that lc(g)^scalings * f == q*g + r.
namespace {
int sparing_prem(std::vector<Int>& r, const std::vector<Int>& g) {
    int m = actual_degree(r);
    int n = actual_degree(g);
    const Int& lcg = g[static_cast<size_t>(n)];
    int scalings = 0;
    for (int i = m - n; i >= 0; --i) {
        Int t = r[static_cast<size_t>(n + i)];
        if (t == 0) continue;
        if (mpz_divisible_p(t.get_mpz_t(), lcg.get_mpz_t())) {
            Int q;
            mpz_divexact(q.get_mpz_t(), t.get_mpz_t(), lcg.get_mpz_t());
            for (int j = 0; j <= n; ++j) r[static_cast<size_t>(i + j)] -= q * g[static_cast<size_t>(j)];
        } else {
            ++scalings;
            for (int j = 0; j < n + i; ++j) r[static_cast<size_t>(j)] *= lcg;
            for (int j = n + i + 1; j <= m; ++j) r[static_cast<size_t>(j)] *= lcg;
            r[static_cast<size_t>(n + i)] = 0;
            for (int j = 0; j < n; ++j) r[static_cast<size_t>(i + j)] -= t * g[static_cast<size_t>(j)];
        }
    }
    return scalings;
}
} // namespace

Int resultant_prs(const std::vector<Int>& fin, int m, const std::vector<Int>& gin, int n) {
    std::vector<Int> f(fin), g(gin);
    f.resize(static_cast<size_t>(m) + 1, Int(0));
    g.resize(static_cast<size_t>(n) + 1, Int(0));
    Rat acc(1);

    // Peel padded (vanishing) leading coefficients: expanding the Sylvester
    // determinant along its first column gives
    //   a_m = 0: Res_{m,n} = (-1)^n b_n Res_{m-1,n}
    //   b_n = 0: Res_{m,n} = a_m Res_{m,n-1}
    for (;;) {
        int da = actual_degree(f);
        int db = actual_degree(g);
        if (m == da && n == db) break;
        if (m == 0 && n == 0) break;
        if (m > da || da < 0) {
            if (m == 0) break; // constant-zero f handled below
            Int bn = (n == db) ? g[static_cast<size_t>(n)] : Int(0);
            if (bn == 0) return Int(0); // both formal leads vanish
            if (n % 2 == 1) acc = -acc;
            acc *= Rat(bn);
            --m;
            continue;
        }
        if (n > db || db < 0) {
            if (n == 0) break;
            Int am = f[static_cast<size_t>(m)];
            if (am == 0) return Int(0);
            acc *= Rat(am);
            --n;
            continue;
        }
    }

    // Euclidean descent on actual degrees.
    for (;;) {
        int da = actual_degree(f);
        int db = actual_degree(g);
        if (da < 0 || db < 0) {
            // a zero polynomial with positive formal degree makes the
            // determinant vanish unless no rows of it appear
            if (da < 0 && n > 0) return Int(0);
            if (db < 0 && m > 0) return Int(0);
            break; // 0x0 matrix
        }
        if (da == 0 && db == 0) break; // empty matrix, Res = 1
        if (da == 0) {
            mul_pow(acc, f[0], db);
            m = 0;
            n = 0;
            break;
        }
        if (db == 0) {
            mul_pow(acc, g[0], da);
            m = 0;
            n = 0;
            break;
        }
        if (da < db) {
            std::swap(f, g);
            std::swap(da, db);
            if ((da % 2 == 1) && (db % 2 == 1)) acc = -acc;
        }
        // r = lc(g)^s * f mod g;  Res(f,g) = (-1)^(da db) lc(g)^(da - dr - s*db) Res(g,r)
        std::vector<Int> r(f);
        int s = sparing_prem(r, g);
        int dr = actual_degree(r);
        if (dr < 0) return Int(0); // common factor
        if ((da % 2 == 1) && (db % 2 == 1)) acc = -acc;
        mul_pow(acc, g[static_cast<size_t>(db)], static_cast<long>(da - dr) - static_cast<long>(s) * db);
        r.resize(static_cast<size_t>(dr) + 1);
        Int c = vec_content(r);
        if (c > 1) {
            for (Int& x : r) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
            mul_pow(acc, c, db);
        }
        f = std::move(g);
        g = std::move(r);
        m = db;
        n = dr;
    }

    acc.canonicalize();
    if (acc.get_den() != 1) throw std::logic_error("resultant_prs: non-integer accumulator");
    return acc.get_num();
}

} // namespace detail

namespace {

// Dimension at which the dense fraction-free elimination stops being the
// faster exact method and the remainder-sequence path takes over.
constexpr int kBareissMaxDim = 48;

Int resultant_dispatch(const std::vector<Int>& f, int m, const std::vector<Int>& g, int n) {
    if (m + n <= kBareissMaxDim) return detail::resultant_bareiss(f, m, g, n);
    return detail::resultant_prs(f, m, g, n);
}

} // namespace

Int resultant_binary(const IntBinaryForm& F, const IntBinaryForm& G) {
    return resultant_dispatch(F.dehomogenize().coeffs() /* may be shorter than m+1 */,
                              F.degree(), G.dehomogenize().coeffs(), G.degree());
}

IntBinaryForm resultant_with_parameters(const IntBinaryForm& F, const IntBinaryForm& A,
                                        const IntBinaryForm& B) {
    if (F.is_zero()) throw DomainError("parametric resultant: F must be nonzero");
    if (A.degree() != B.degree()) throw DomainError("parametric resultant: deg A != deg B");
    if (A.is_zero() && B.is_zero()) throw DomainError("parametric resultant: zero pencil");
    const int D = F.degree();
    const int d = A.degree();
    const std::vector<Int> fc = F.dehomogenize().coeffs();
    const std::vector<Int> ac = A.dehomogenize().coeffs();
    const std::vector<Int> bc = B.dehomogenize().coeffs();

    // Evaluate g(t) = Res(F, A - tB) at D+1 integers symmetric around zero,
    // then reconstruct the degree-<=D integer polynomial g exactly.
    std::vector<Int> nodes;
    nodes.reserve(static_cast<size_t>(D) + 1);
    for (long v = 0; static_cast<int>(nodes.size()) <= D; v = (v <= 0 ? -v + 1 : -v))
        nodes.emplace_back(v);

    std::vector<Rat> dd;
    dd.reserve(nodes.size());
    for (const Int& t : nodes) {
        std::vector<Int> h(static_cast<size_t>(d) + 1, Int(0));
        for (int i = 0; i <= d; ++i) {
            Int av = i < static_cast<int>(ac.size()) ? ac[static_cast<size_t>(i)] : Int(0);
            Int bv = i < static_cast<int>(bc.size()) ? bc[static_cast<size_t>(i)] : Int(0);
            h[static_cast<size_t>(i)] = av - t * bv;
        }
        dd.emplace_back(resultant_dispatch(fc, D, h, d));
    }

    // Newton divided differences, then expansion to the monomial basis.
    for (size_t j = 1; j < dd.size(); ++j)
        for (size_t i = dd.size(); i-- > j;)
            dd[i] = (dd[i] - dd[i - 1]) / Rat(nodes[i] - nodes[i - j]);
    std::vector<Rat> poly; // ascending in t
    poly.reserve(dd.size());
    for (size_t i = dd.size(); i-- > 0;) {
        // poly <- poly*(t - node_i) + dd[i]
        poly.insert(poly.begin(), Rat(0));
        for (size_t j = 0; j + 1 < poly.size(); ++j) poly[j] -= Rat(nodes[i]) * poly[j + 1];
        poly[0] += dd[i];
    }

    std::vector<Int> gcoef(static_cast<size_t>(D) + 1, Int(0));
    bool any = false;
    for (size_t j = 0; j < poly.size(); ++j) {
        poly[j].canonicalize();
        if (poly[j].get_den() != 1) throw std::logic_error("parametric resultant: non-integer coefficient");
        gcoef[j] = poly[j].get_num();
        any = any || gcoef[j] != 0;
    }
    if (!any) throw DomainError("parametric resultant: pencil degenerate on F (zero form)");

    // g(t) = sum g_j t^j corresponds to the form sum g_j X0^j X1^(D-j).
    std::vector<Int> formc(static_cast<size_t>(D) + 1, Int(0));
    for (int i = 0; i <= D; ++i) formc[static_cast<size_t>(i)] = gcoef[static_cast<size_t>(D - i)];
    return content_primitive(IntBinaryForm(D, std::move(formc))).primitive;
}

} // namespace dynpair
