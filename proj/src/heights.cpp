#include <dynpair/heights.hpp>

#include <dynpair/errors.hpp>
#include <dynpair/mahler.hpp>

#include "mp_util.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace dynpair {

namespace {

using detail::MpArr;
using detail::ln_int;

// log max(|x0|,|x1|) at 128 bits
double ln_maxabs(const Int& x0, const Int& x1, double& err_io) {
    Int m = x0 < 0 ? -x0 : x0;
    Int m1 = x1 < 0 ? -x1 : x1;
    if (m1 > m) m = m1;
    if (m == 1) return 0.0;
    return ln_int(m, err_io);
}

// Coefficient-sum norm of a form: sum |c_i|, so |F(x)| <= norm * max^deg.
Int one_norm(const IntBinaryForm& F) {
    Int s(0);
    for (const Int& c : F.coeffs()) s += (c < 0 ? -c : c);
    return s;
}

// Solves the 2d x 2d linear system expressing A*F0 + B*F1 = rhs over forms of
// degree 2d-1 (deg A = deg B = d-1) by rational elimination.  The matrix is
// the transposed Sylvester matrix of the lift, nonsingular since Res != 0.
std::vector<Rat> solve_cofactors(const std::vector<Int>& f0, const std::vector<Int>& f1,
                                 int d, int rhs_index, const Int& rhs_value) {
    const int dim = 2 * d;
    std::vector<std::vector<Rat>> a(static_cast<size_t>(dim),
                                    std::vector<Rat>(static_cast<size_t>(dim + 1), Rat(0)));
    for (int k = 0; k < dim; ++k) {
        for (int i = 0; i < d; ++i) {
            int j = k - i;
            if (j >= 0 && j <= d) {
                a[static_cast<size_t>(k)][static_cast<size_t>(i)] = Rat(f0[static_cast<size_t>(j)]);
                a[static_cast<size_t>(k)][static_cast<size_t>(d + i)] = Rat(f1[static_cast<size_t>(j)]);
            }
        }
    }
    a[static_cast<size_t>(rhs_index)][static_cast<size_t>(dim)] = Rat(rhs_value);

    for (int col = 0; col < dim; ++col) {
        int piv = -1;
        for (int r = col; r < dim; ++r)
            if (a[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw DomainError("cofactor system singular");
        std::swap(a[static_cast<size_t>(col)], a[static_cast<size_t>(piv)]);
        for (int r = 0; r < dim; ++r) {
            if (r == col || a[static_cast<size_t>(r)][static_cast<size_t>(col)] == 0) continue;
            Rat fct = a[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                      a[static_cast<size_t>(col)][static_cast<size_t>(col)];
            for (int c = col; c <= dim; ++c)
                a[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
                    fct * a[static_cast<size_t>(col)][static_cast<size_t>(c)];
        }
    }
    std::vector<Rat> sol(static_cast<size_t>(dim));
    for (int r = 0; r < dim; ++r)
        sol[static_cast<size_t>(r)] = a[static_cast<size_t>(r)][static_cast<size_t>(dim)] /
                                      a[static_cast<size_t>(r)][static_cast<size_t>(r)];
    return sol;
}

struct StepBound {
    double C = 0.0;       // sup |h(phi x) - d h(x)| over reduced points
    double ln_norm = 0.0; // log of the lift's coefficient-sum norm
    double ln_M = 0.0;    // log of the worst Bezout cofactor sum
};

// One-step height discrepancy: h drops at most ln_M (via the cofactor
// identities R x_i^(2d-1) = A F0 + B F1 and gcd extraction bounded by R) and
// rises at most ln_norm.
StepBound one_step_bound(const RationalMap& map) {
    const int d = map.degree();
    const std::vector<Int>& f0 = map.lift0().coeffs();
    const std::vector<Int>& f1 = map.lift1().coeffs();
    Int R = map.resultant();

    StepBound sb;
    double dummy = 0.0;
    Int nrm = std::max(one_norm(map.lift0()), one_norm(map.lift1()));
    sb.ln_norm = ln_int(nrm, dummy) + 1e-12;

    Rat worst(0);
    for (int side = 0; side < 2; ++side) {
        auto sol = solve_cofactors(f0, f1, d, side == 0 ? 0 : 2 * d - 1, R);
        Rat s(0);
        for (const Rat& x : sol) s += (x < 0 ? Rat(-x) : x);
        if (s > worst) worst = s;
    }
    mpfr_t t;
    mpfr_init2(t, 64);
    mpfr_set_q(t, worst.get_mpq_t(), MPFR_RNDU);
    mpfr_log(t, t, MPFR_RNDU);
    sb.ln_M = std::max(0.0, mpfr_get_d(t, MPFR_RNDU)) + 1e-12;
    mpfr_clear(t);

    sb.C = std::max(sb.ln_norm, sb.ln_M);
    if (map.is_power_map()) sb.C = 0.0; // height is exactly multiplicative
    return sb;
}

} // namespace

ProjPointQ::ProjPointQ(Int a0, Int a1) : x0(std::move(a0)), x1(std::move(a1)) {
    if (x0 == 0 && x1 == 0) throw DomainError("projective point needs a nonzero coordinate");
    Int g;
    mpz_gcd(g.get_mpz_t(), x0.get_mpz_t(), x1.get_mpz_t());
    mpz_divexact(x0.get_mpz_t(), x0.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(x1.get_mpz_t(), x1.get_mpz_t(), g.get_mpz_t());
    if (x1 < 0 || (x1 == 0 && x0 < 0)) {
        x0 = -x0;
        x1 = -x1;
    }
}

ProjPointQ ProjPointQ::from_rational(const Rat& x) {
    return {x.get_num(), x.get_den()};
}

std::string ProjPointQ::str() const {
    std::ostringstream os;
    os << "(" << x0.get_str() << " : " << x1.get_str() << ")";
    return os.str();
}

HeightValue standard_height(const ProjPointQ& p) {
    double err = 0.0;
    double v = ln_maxabs(p.x0, p.x1, err);
    return {v, err, 0};
}

double height_difference_bound(const RationalMap& map) {
    StepBound sb = one_step_bound(map);
    return sb.C / (map.degree() - 1);
}

HeightValue canonical_height(const RationalMap& map, const ProjPointQ& p, double tol) {
    if (!(tol > 0)) throw DomainError("canonical_height: tolerance must be positive");
    const int d = map.degree();
    StepBound sb = one_step_bound(map);

    // iterations until the geometric tail C/(d^n (d-1)) is below tol/2
    const int cap = 64;
    int n = 0;
    double tail = sb.C / (d - 1);
    while (tail > tol / 2 && n < cap) {
        tail /= d;
        ++n;
    }

    double err = 0.0;
    double h0 = ln_maxabs(p.x0, p.x1, err);
    if (tail > tol / 2) {
        // even the capped orbit cannot certify tol; report the best bound
        throw ConvergenceError("canonical_height: iteration cap reached before tolerance", h0,
                               sb.C / (d - 1));
    }
    if (n == 0) {
        double v = h0;
        return {std::max(0.0, v), err + tail, 0};
    }

    // Archimedean track: normalized direction u with max(|u0|,|u1|) = 1.
    // gamma_k = log max |F(u_k)| is scale-free, so the reduced orbit's height
    // telescopes to h0 + sum (gamma_k - log g_k)/d^(k+1).
    double amp_bits = std::max(1.0, (sb.ln_norm + sb.ln_M) / M_LN2 + std::log2(double(d)) + 4.0);
    long P = std::min<long>(16384, 192 + static_cast<long>(std::ceil(n * amp_bits)));

    const std::vector<Int>& f0 = map.lift0().coeffs();
    const std::vector<Int>& f1 = map.lift1().coeffs();

    MpArr reg(2 * (static_cast<size_t>(d) + 1) + 6, P);
    mpfr_ptr u0 = reg[0], u1 = reg[1], v0 = reg[2], v1 = reg[3], t1 = reg[4], t2 = reg[5];
    auto p0 = [&](int i) { return reg[6 + static_cast<size_t>(i)]; };
    auto p1 = [&](int i) { return reg[6 + static_cast<size_t>(d) + 1 + static_cast<size_t>(i)]; };

    mpfr_set_z(u0, p.x0.get_mpz_t(), MPFR_RNDN);
    mpfr_set_z(u1, p.x1.get_mpz_t(), MPFR_RNDN);
    mpfr_abs(t1, u0, MPFR_RNDN);
    mpfr_abs(t2, u1, MPFR_RNDN);
    if (mpfr_cmp(t2, t1) > 0) mpfr_set(t1, t2, MPFR_RNDN);
    mpfr_div(u0, u0, t1, MPFR_RNDN);
    mpfr_div(u1, u1, t1, MPFR_RNDN);

    // Non-archimedean track: the per-step gcd divides R, and gcd(y, R)
    // only depends on y mod R, so residues mod R^(n+2) determine every gcd
    // even after the per-step exact divisions shrink the known grid.
    Int R = map.resultant();
    if (R < 0) R = -R;
    bool track_gcd = (R != 1);
    Int W(1), a0(0), a1(0);
    if (track_gcd) {
        mpz_pow_ui(W.get_mpz_t(), R.get_mpz_t(), static_cast<unsigned long>(n) + 2);
        mpz_mod(a0.get_mpz_t(), p.x0.get_mpz_t(), W.get_mpz_t());
        mpz_mod(a1.get_mpz_t(), p.x1.get_mpz_t(), W.get_mpz_t());
    }

    double sum = 0.0, comp = 0.0; // Kahan
    double scale = 1.0;
    for (int k = 0; k < n; ++k) {
        scale /= d;
        // v = F(u)
        mpfr_set_ui(p0(0), 1, MPFR_RNDN);
        mpfr_set_ui(p1(0), 1, MPFR_RNDN);
        for (int i = 1; i <= d; ++i) {
            mpfr_mul(p0(i), p0(i - 1), u0, MPFR_RNDN);
            mpfr_mul(p1(i), p1(i - 1), u1, MPFR_RNDN);
        }
        mpfr_set_zero(v0, 1);
        mpfr_set_zero(v1, 1);
        for (int i = 0; i <= d; ++i) {
            mpfr_mul(t1, p0(d - i), p1(i), MPFR_RNDN);
            mpfr_mul_z(t2, t1, f0[static_cast<size_t>(i)].get_mpz_t(), MPFR_RNDN);
            mpfr_add(v0, v0, t2, MPFR_RNDN);
            mpfr_mul_z(t2, t1, f1[static_cast<size_t>(i)].get_mpz_t(), MPFR_RNDN);
            mpfr_add(v1, v1, t2, MPFR_RNDN);
        }
        mpfr_abs(t1, v0, MPFR_RNDN);
        mpfr_abs(t2, v1, MPFR_RNDN);
        if (mpfr_cmp(t2, t1) > 0) mpfr_set(t1, t2, MPFR_RNDN);
        mpfr_log(t2, t1, MPFR_RNDN);
        double gamma = mpfr_get_d(t2, MPFR_RNDN);
        mpfr_div(u0, v0, t1, MPFR_RNDN);
        mpfr_div(u1, v1, t1, MPFR_RNDN);

        double lng = 0.0;
        if (track_gcd) {
            Int y0 = map.lift0().eval(a0, a1);
            Int y1 = map.lift1().eval(a0, a1);
            mpz_mod(y0.get_mpz_t(), y0.get_mpz_t(), W.get_mpz_t());
            mpz_mod(y1.get_mpz_t(), y1.get_mpz_t(), W.get_mpz_t());
            Int g0, g1, g;
            mpz_gcd(g0.get_mpz_t(), y0.get_mpz_t(), R.get_mpz_t());
            mpz_gcd(g1.get_mpz_t(), y1.get_mpz_t(), R.get_mpz_t());
            mpz_gcd(g.get_mpz_t(), g0.get_mpz_t(), g1.get_mpz_t());
            if (g != 1) {
                mpz_divexact(y0.get_mpz_t(), y0.get_mpz_t(), g.get_mpz_t());
                mpz_divexact(y1.get_mpz_t(), y1.get_mpz_t(), g.get_mpz_t());
                mpz_divexact(W.get_mpz_t(), W.get_mpz_t(), g.get_mpz_t());
                mpz_mod(y0.get_mpz_t(), y0.get_mpz_t(), W.get_mpz_t());
                mpz_mod(y1.get_mpz_t(), y1.get_mpz_t(), W.get_mpz_t());
                lng = ln_int(g, err);
            }
            a0 = y0;
            a1 = y1;
        }

        double term = (gamma - lng) * scale;
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    double v = h0 + sum;
    // the working precision leaves >= 192 guard bits after drift, so the
    // floating part of the budget is dominated by the double accumulation
    err += tail + (n + 1) * 1e-15 * (1.0 + std::fabs(v));
    return {std::max(0.0, v), err, n};
}

double orbit_average_height(const IntBinaryForm& F) {
    if (F.is_zero()) throw DomainError("orbit_average_height: zero form");
    if (F.content() != 1) throw DomainError("orbit_average_height: form must be primitive");
    if (F.degree() < 1) return 0.0;
    MahlerValue m = log_mahler_form(F);
    return m.value / F.degree();
}

} // namespace dynpair
