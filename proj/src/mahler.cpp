#include <dynpair/mahler.hpp>

#include "mp_util.hpp"

#include <mpfr.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

namespace dynpair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::MpArr;
using detail::lg_abs;
using detail::ln_int;
using detail::logaddexp;

// floor(q + 1/2)
Int nearest_int(const Rat& q) {
    Int num = q.get_num(), den = q.get_den(); // den > 0 in canonical form
    Int two_num_plus_den = num * 2 + den;
    Int two_den = den * 2;
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), two_num_plus_den.get_mpz_t(), two_den.get_mpz_t());
    return r;
}

// a(x) -> a(x + c) in place, coefficients ascending
void taylor_shift(std::vector<Int>& a, const Int& c) {
    const int n = static_cast<int>(a.size()) - 1;
    for (int i = 0; i < n; ++i)
        for (int j = n - 1; j >= i; --j)
            a[static_cast<size_t>(j)] += c * a[static_cast<size_t>(j + 1)];
}

// (xr,xi) = (ar,ai)*(br,bi); outputs must not alias inputs
void cmul(mpfr_ptr xr, mpfr_ptr xi, mpfr_srcptr ar, mpfr_srcptr ai, mpfr_srcptr br,
          mpfr_srcptr bi, mpfr_ptr t1, mpfr_ptr t2) {
    mpfr_mul(t1, ar, br, MPFR_RNDN);
    mpfr_mul(t2, ai, bi, MPFR_RNDN);
    mpfr_sub(xr, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, ar, bi, MPFR_RNDN);
    mpfr_mul(t2, ai, br, MPFR_RNDN);
    mpfr_add(xi, t1, t2, MPFR_RNDN);
}

// (xr,xi) = (ar,ai)/(br,bi); outputs must not alias inputs, b != 0
void cdiv(mpfr_ptr xr, mpfr_ptr xi, mpfr_srcptr ar, mpfr_srcptr ai, mpfr_srcptr br,
          mpfr_srcptr bi, mpfr_ptr t1, mpfr_ptr t2, mpfr_ptr t3) {
    mpfr_sqr(t1, br, MPFR_RNDN);
    mpfr_sqr(t2, bi, MPFR_RNDN);
    mpfr_add(t3, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, ar, br, MPFR_RNDN);
    mpfr_mul(t2, ai, bi, MPFR_RNDN);
    mpfr_add(xr, t1, t2, MPFR_RNDN);
    mpfr_div(xr, xr, t3, MPFR_RNDN);
    mpfr_mul(t1, ai, br, MPFR_RNDN);
    mpfr_mul(t2, ar, bi, MPFR_RNDN);
    mpfr_sub(xi, t1, t2, MPFR_RNDN);
    mpfr_div(xi, xi, t3, MPFR_RNDN);
}

struct UnionFind {
    std::vector<int> up;
    explicit UnionFind(size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
    int find(int x) {
        while (up[static_cast<size_t>(x)] != x) {
            up[static_cast<size_t>(x)] = up[static_cast<size_t>(up[static_cast<size_t>(x)])];
            x = up[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) up[static_cast<size_t>(a)] = b;
    }
};

// Moduli from the upper convex hull of (k, log2|a_k|) -- the classical
// Newton-polygon estimate -- with deterministic angular spreads per edge.
std::vector<std::complex<double>> initial_guesses(const std::vector<double>& lg, int n) {
    std::vector<int> hull;
    for (int k = 0; k <= n; ++k) {
        if (!std::isfinite(lg[static_cast<size_t>(k)])) continue;
        while (hull.size() >= 2) {
            int i = hull[hull.size() - 2], j = hull[hull.size() - 1];
            double cross = (lg[static_cast<size_t>(j)] - lg[static_cast<size_t>(i)]) * (k - i) -
                           (lg[static_cast<size_t>(k)] - lg[static_cast<size_t>(i)]) * (j - i);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    std::vector<std::complex<double>> z;
    z.reserve(static_cast<size_t>(n));
    double rmin = 1.0;
    for (size_t e = 0; e + 1 < hull.size(); ++e) {
        int i = hull[e], j = hull[e + 1];
        int m = j - i;
        double r = std::exp2((lg[static_cast<size_t>(i)] - lg[static_cast<size_t>(j)]) / m);
        if (!std::isfinite(r) || r <= 0) r = 1.0;
        if (e == 0) rmin = r;
        for (int t = 0; t < m; ++t) {
            double th = 2.0 * M_PI * (t + 0.26) / m + 0.73 * static_cast<double>(e);
            z.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    // a vanishing constant term leaves hull[0] > 0: that many roots sit at
    // the origin, so seed them just inside the innermost hull radius
    int missing = n - static_cast<int>(z.size());
    for (int t = 0; t < missing; ++t) {
        double th = 2.0 * M_PI * (t + 0.26) / missing + 0.41;
        double r = std::min(1e-3, rmin * 1e-2);
        z.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return z;
}

// Sum over j != i of 1/(z_i - z_j) on the double snapshot.  Reports failure
// (overflow or a pair closer than the double view can resolve) through `ok`.
std::complex<double> repulsion_double(const std::vector<std::complex<double>>& zd, int i,
                                      bool* ok) {
    const int n = static_cast<int>(zd.size());
    const std::complex<double> z = zd[static_cast<size_t>(i)];
    double sr = 0.0, si = 0.0, minsep2 = kInf;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double dx = z.real() - zd[static_cast<size_t>(j)].real();
        double dy = z.imag() - zd[static_cast<size_t>(j)].imag();
        double n2 = dx * dx + dy * dy;
        minsep2 = std::min(minsep2, n2);
        sr += dx / n2;
        si -= dy / n2;
    }
    double thr = 1e-13 * (1.0 + std::abs(z));
    *ok = (minsep2 > thr * thr) && std::isfinite(sr) && std::isfinite(si);
    return {sr, si};
}

struct EngineResult {
    std::vector<std::complex<double>> roots; // recentering undone
    std::vector<double> radii;               // cluster-aware certified errors
    double logplus_sum = 0.0;
    double logplus_err = kInf;
    double residual = 0.0;
    int prec = 0;
    bool certified = false;
};

// Cheap double-precision polish of the starting configuration.  Bails out
// when the coefficients or iterates exceed double range; everything later is
// re-verified at extended precision, so this stage needs no guarantees.
void warmup_double(const std::vector<Int>& coeffs, const std::vector<double>& lg,
                   double reset_radius, std::vector<std::complex<double>>& zd) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    double peak = -kInf;
    for (double v : lg) peak = std::max(peak, v);
    if (peak > 500.0 || n > 4096) return;
    std::vector<double> cd(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) cd[static_cast<size_t>(k)] = coeffs[static_cast<size_t>(k)].get_d();
    std::vector<char> frozen(static_cast<size_t>(n), 0);
    std::vector<double> hist;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double maxcorr = 0.0;
        int active = 0, skipped = 0;
        for (int i = 0; i < n; ++i) {
            if (frozen[static_cast<size_t>(i)]) continue;
            ++active;
            std::complex<double> z = zd[static_cast<size_t>(i)];
            std::complex<double> b = cd[static_cast<size_t>(n)], db = 0.0;
            for (int k = n - 1; k >= 0; --k) {
                db = db * z + b;
                b = b * z + cd[static_cast<size_t>(k)];
            }
            if (!std::isfinite(b.real()) || !std::isfinite(b.imag()) ||
                !std::isfinite(db.real()) || !std::isfinite(db.imag())) {
                ++skipped;
                continue;
            }
            if (b == 0.0) {
                frozen[static_cast<size_t>(i)] = 1;
                continue;
            }
            if (db == 0.0) {
                zd[static_cast<size_t>(i)] += std::complex<double>(0.125, 0.25) * (1.0 + std::abs(z));
                maxcorr = 1.0;
                continue;
            }
            std::complex<double> nw = b / db;
            bool rep_ok = false;
            std::complex<double> s = repulsion_double(zd, i, &rep_ok);
            std::complex<double> den = rep_ok ? 1.0 - nw * s : 1.0;
            std::complex<double> corr = (den == 0.0) ? nw : nw / den;
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) {
                ++skipped;
                continue;
            }
            zd[static_cast<size_t>(i)] -= corr;
            if (std::isfinite(reset_radius) && std::abs(zd[static_cast<size_t>(i)]) > 8.0 * reset_radius) {
                double th = 2.0 * M_PI * (i + 0.37) / n;
                zd[static_cast<size_t>(i)] = {reset_radius * std::cos(th), reset_radius * std::sin(th)};
                maxcorr = 1.0;
                continue;
            }
            double rel = std::abs(corr) / (1.0 + std::abs(zd[static_cast<size_t>(i)]));
            maxcorr = std::max(maxcorr, rel);
            if (rel < 1e-14) frozen[static_cast<size_t>(i)] = 1;
        }
        if (active == 0 || skipped > n / 3) return;
        hist.push_back(maxcorr);
        if (maxcorr < 1e-13) return;
        if (sweep >= 15 && maxcorr > 0.5 * hist[static_cast<size_t>(sweep - 5)]) return;
    }
}

// Aberth-Ehrlich with a precision ladder and a Weierstrass-disk certificate.
// Coefficients ascending, a_0 and a_n nonzero, degree >= 2.  Succeeds when
// every per-root error is <= radius_target and the total (which also bounds
// the error of sum log+|z_i|) is <= total_target; either may be infinite.
EngineResult aberth_engine(const std::vector<Int>& coeffs_in, double radius_target,
                           double total_target, long max_prec) {
    const int n = static_cast<int>(coeffs_in.size()) - 1;
    const size_t N = static_cast<size_t>(n);

    // Re-center on the root centroid when that shrinks the coefficient peak.
    // Iterated maps produce period polynomials whose roots crowd around a
    // nonzero center; in the raw monomial basis their coefficients blow up
    // by thousands of bits, while the recentered form can be tiny.
    std::vector<Int> coeffs = coeffs_in;
    Int shift(0);
    {
        Rat cen(-coeffs[N - 1], Int(n) * coeffs[N]);
        cen.canonicalize();
        Int c = nearest_int(cen);
        if (c != 0) {
            auto peak = [](const std::vector<Int>& v) {
                double m = -kInf;
                for (const Int& x : v) m = std::max(m, lg_abs(x));
                return m;
            };
            std::vector<Int> shifted = coeffs;
            taylor_shift(shifted, c);
            if (peak(shifted) <= peak(coeffs) - 8.0) {
                coeffs = std::move(shifted);
                shift = c;
            }
        }
    }

    std::vector<double> lg(N + 1);
    for (size_t k = 0; k <= N; ++k) lg[k] = lg_abs(coeffs[k]);
    const double ln_lc = lg[N] * M_LN2;

    // Fujiwara bound on root moduli, used to rein in runaway iterates
    double fuji = 0.0;
    for (int k = 0; k < n; ++k)
        fuji = std::max(fuji, std::exp2((lg[static_cast<size_t>(k)] - lg[N]) / (n - k)));
    fuji *= 2.0;

    std::vector<std::complex<double>> zd = initial_guesses(lg, n);

    // log2 of the largest Horner term at the mean seed modulus; evaluating
    // with fewer bits than this returns rounding noise near the roots, so the
    // double warmup and the low rungs of the ladder would only scramble the
    // seeds (the geometric mean cancels the binomial distortion of the hull
    // radii and lands on the natural root scale |a_0/a_n|^{1/n})
    double seed_lr = 0.0;
    for (const auto& z : zd) seed_lr += std::log2(std::max(std::abs(z), 1e-300));
    seed_lr /= static_cast<double>(std::max<size_t>(zd.size(), 1));
    double lg2term = 0.0;
    for (size_t k = 0; k <= N; ++k)
        if (std::isfinite(lg[k]))
            lg2term = std::max(lg2term, lg[k] + static_cast<double>(k) * seed_lr);
    if (lg2term <= 150.0) warmup_double(coeffs, lg, fuji, zd);
    long p_start = 64;
    while (p_start * 2 <= max_prec && static_cast<double>(p_start) < lg2term + 64.0) p_start *= 2;

    // |a_k| rounded up at 64 bits, for rigorous evaluation-error bounds
    MpArr CA(N + 1, 64);
    for (size_t k = 0; k <= N; ++k) {
        mpfr_set_z(CA[k], coeffs[k].get_mpz_t(), MPFR_RNDU);
        mpfr_abs(CA[k], CA[k], MPFR_RNDU);
    }

    EngineResult best;
    double best_score = kInf, prev_score = kInf;
    std::unique_ptr<MpArr> zr_prev, zi_prev;

    for (long p = p_start; p <= max_prec;) {
        auto zr = std::make_unique<MpArr>(N, p);
        auto zi = std::make_unique<MpArr>(N, p);
        for (size_t i = 0; i < N; ++i) {
            if (zr_prev) {
                mpfr_set((*zr)[i], (*zr_prev)[i], MPFR_RNDN);
                mpfr_set((*zi)[i], (*zi_prev)[i], MPFR_RNDN);
            } else {
                mpfr_set_d((*zr)[i], zd[i].real(), MPFR_RNDN);
                mpfr_set_d((*zi)[i], zd[i].imag(), MPFR_RNDN);
            }
            zd[i] = {mpfr_get_d((*zr)[i], MPFR_RNDN), mpfr_get_d((*zi)[i], MPFR_RNDN)};
        }

        MpArr C(N + 1, p);
        for (size_t k = 0; k <= N; ++k) mpfr_set_z(C[k], coeffs[k].get_mpz_t(), MPFR_RNDN);

        MpArr reg(17, p);
        mpfr_ptr br = reg[0], bi = reg[1], dbr = reg[2], dbi = reg[3], t1 = reg[4],
                 t2 = reg[5], t3 = reg[6], nr = reg[7], ni = reg[8], q1 = reg[9],
                 q2 = reg[10], dr = reg[11], di = reg[12], cr = reg[13], ci = reg[14],
                 sh = reg[15], t4 = reg[16];
        mpfr_set_z(sh, shift.get_mpz_t(), MPFR_RNDN);
        MpArr hp(4, std::min<long>(p, 192));
        MpArr e64(3, 64);

        std::vector<char> frozen(N, 0);
        const double freeze_tol = std::ldexp(1.0, static_cast<int>(4 - std::min<long>(p, 1020)));

        // exact repulsion sum, for pairs too close for the double snapshot
        auto repulsion_exact = [&](size_t i) -> std::complex<double> {
            mpfr_ptr accr = hp[0], acci = hp[1], hd = hp[2], h2 = hp[3];
            mpfr_set_zero(accr, 1);
            mpfr_set_zero(acci, 1);
            for (size_t j = 0; j < N; ++j) {
                if (j == i) continue;
                mpfr_sub(t1, (*zr)[i], (*zr)[j], MPFR_RNDN);
                mpfr_sub(t2, (*zi)[i], (*zi)[j], MPFR_RNDN);
                mpfr_sqr(hd, t1, MPFR_RNDN);
                mpfr_sqr(h2, t2, MPFR_RNDN);
                mpfr_add(hd, hd, h2, MPFR_RNDN);
                if (mpfr_zero_p(hd)) continue; // coincident iterates repel nothing
                mpfr_div(h2, t1, hd, MPFR_RNDN);
                mpfr_add(accr, accr, h2, MPFR_RNDN);
                mpfr_div(h2, t2, hd, MPFR_RNDN);
                mpfr_sub(acci, acci, h2, MPFR_RNDN);
            }
            return {mpfr_get_d(accr, MPFR_RNDN), mpfr_get_d(acci, MPFR_RNDN)};
        };

        // ---- certification: Weierstrass disks around the iterates ----
        // (also attempted mid-rung: clusters of repeated roots converge only
        // linearly, and their trap certificate fires long before corrections
        // reach the freeze tolerance)
        EngineResult cand;
        double last_score = kInf;
        auto attempt = [&]() -> bool {
            std::vector<double> lnP(N), lnE(N), lnAH(N);
            for (size_t i = 0; i < N; ++i) {
                mpfr_set(br, C[N], MPFR_RNDN);
                mpfr_set_zero(bi, 1);
                for (int k = n - 1; k >= 0; --k) {
                    cmul(q1, q2, br, bi, (*zr)[i], (*zi)[i], t1, t2);
                    mpfr_add(br, q1, C[static_cast<size_t>(k)], MPFR_RNDN);
                    mpfr_set(bi, q2, MPFR_RNDN);
                }
                mpfr_hypot(t1, br, bi, MPFR_RNDN);
                mpfr_log(t2, t1, MPFR_RNDN);
                lnP[i] = mpfr_get_d(t2, MPFR_RNDN);
                // upper bound sum |a_k| |z|^k, all rounding upward
                mpfr_ptr az = e64[0], acc = e64[1], lt = e64[2];
                mpfr_hypot(az, (*zr)[i], (*zi)[i], MPFR_RNDU);
                mpfr_set(acc, CA[N], MPFR_RNDU);
                for (int k = n - 1; k >= 0; --k) {
                    mpfr_mul(acc, acc, az, MPFR_RNDU);
                    mpfr_add(acc, acc, CA[static_cast<size_t>(k)], MPFR_RNDU);
                }
                mpfr_log(lt, acc, MPFR_RNDU);
                lnAH[i] = mpfr_get_d(lt, MPFR_RNDU);
                lnE[i] = lnAH[i] + std::log(4.0 * n) - static_cast<double>(p) * M_LN2;
            }

            // pairwise log-distances on the double snapshot, with exact
            // fallback and an explicit allowance for the snapshot rounding
            std::vector<double> lgprod(N, 0.0), lgslack(N, 0.0);
            for (size_t i = 0; i < N; ++i) {
                for (size_t j = i + 1; j < N; ++j) {
                    double dx = zd[i].real() - zd[j].real();
                    double dy = zd[i].imag() - zd[j].imag();
                    double d = std::hypot(dx, dy);
                    double scale = std::max({std::abs(zd[i]), std::abs(zd[j]), 1.0});
                    double bound = 8e-16 * scale / d; // relative snapshot error
                    double l;
                    if (std::isfinite(bound) && bound < 1e-9) {
                        l = std::log(d);
                    } else {
                        mpfr_sub(t1, (*zr)[i], (*zr)[j], MPFR_RNDN);
                        mpfr_sub(t2, (*zi)[i], (*zi)[j], MPFR_RNDN);
                        mpfr_hypot(t3, t1, t2, MPFR_RNDN);
                        mpfr_log(t3, t3, MPFR_RNDN);
                        l = mpfr_get_d(t3, MPFR_RNDN);
                        bound = 1e-15;
                    }
                    lgprod[i] += l;
                    lgprod[j] += l;
                    lgslack[i] += 1.02 * bound;
                    lgslack[j] += 1.02 * bound;
                }
            }

            std::vector<double> rad(N);
            double resid = 0.0;
            for (size_t i = 0; i < N; ++i) {
                double lnr = std::log(static_cast<double>(n)) + logaddexp(lnP[i], lnE[i]) - ln_lc -
                             lgprod[i] + lgslack[i] + static_cast<double>(n) * 1e-15 + 1e-15;
                rad[i] = std::exp(lnr);
                resid = std::max(resid, std::exp(lnP[i] - lnAH[i]));
            }

            // group overlapping disks; a k-disk component traps exactly k roots
            UnionFind uf(N);
            for (size_t i = 0; i < N; ++i)
                for (size_t j = i + 1; j < N; ++j)
                    if (rad[i] + rad[j] >= std::abs(zd[i] - zd[j])) uf.unite(static_cast<int>(i), static_cast<int>(j));
            std::vector<double> err(N);
            std::vector<std::vector<int>> comp(N);
            for (size_t i = 0; i < N; ++i) comp[static_cast<size_t>(uf.find(static_cast<int>(i)))].push_back(static_cast<int>(i));
            for (const auto& members : comp) {
                if (members.empty()) continue;
                if (members.size() == 1) {
                    err[static_cast<size_t>(members[0])] = rad[static_cast<size_t>(members[0])];
                    continue;
                }
                double diam = 0.0, rmax = 0.0, zmax = 0.0;
                for (size_t a = 0; a < members.size(); ++a) {
                    rmax = std::max(rmax, rad[static_cast<size_t>(members[a])]);
                    zmax = std::max(zmax, std::abs(zd[static_cast<size_t>(members[a])]));
                    for (size_t b = a + 1; b < members.size(); ++b)
                        diam = std::max(diam, std::abs(zd[static_cast<size_t>(members[a])] -
                                                       zd[static_cast<size_t>(members[b])]));
                }
                double e = diam + 2.0 * rmax + 4e-16 * (1.0 + zmax);
                for (int m : members) err[static_cast<size_t>(m)] = e;
            }

            // assemble the candidate answer in original (unshifted)
            // coordinates; reported radii additionally cover the rounding of
            // each iterate to the double returned to the caller
            cand.roots.resize(N);
            cand.radii.resize(N);
            cand.prec = static_cast<int>(p);
            cand.residual = resid;
            double lps = 0.0, maxerr = 0.0, toterr = 0.0, lperr = 0.0;
            for (size_t i = 0; i < N; ++i) {
                mpfr_add(t1, (*zr)[i], sh, MPFR_RNDN);
                cand.roots[i] = {mpfr_get_d(t1, MPFR_RNDN), mpfr_get_d((*zi)[i], MPFR_RNDN)};
                mpfr_hypot(t4, t1, (*zi)[i], MPFR_RNDN);
                double azd = mpfr_get_d(t4, MPFR_RNDN);
                if (mpfr_cmp_ui(t4, 1) > 0) {
                    mpfr_log(t4, t4, MPFR_RNDN);
                    lps += mpfr_get_d(t4, MPFR_RNDN);
                }
                cand.radii[i] = err[i] + 4e-16 * (1.0 + std::abs(cand.roots[i]));
                maxerr = std::max(maxerr, cand.radii[i]);
                toterr += cand.radii[i];
                // the log-plus charge of a disk is its log-plus interval
                // width, not its radius: large-modulus roots pin log|z| to
                // relative accuracy even when the absolute radius is wide
                double hi = azd + cand.radii[i];
                double lo = std::max(azd - cand.radii[i], 0.0);
                lperr += (hi > 1.0 ? std::log(hi) : 0.0) - (lo > 1.0 ? std::log(lo) : 0.0);
            }
            cand.logplus_sum = lps;
            cand.logplus_err = lperr + static_cast<double>(n) * 1.5e-14;
            cand.certified = (cand.logplus_err <= total_target) && (maxerr <= radius_target);

            if (std::getenv("DYNPAIR_MAHLER_DEBUG")) {
                double lpmax = -1e300, gpmin = 1e300, gpmax = -1e300;
                size_t nbig = 0;
                for (size_t i = 0; i < N; ++i) {
                    lpmax = std::max(lpmax, lnP[i]);
                    gpmin = std::min(gpmin, lgprod[i]);
                    gpmax = std::max(gpmax, lgprod[i]);
                    if (err[i] > 1e-9) ++nbig;
                }
                std::fprintf(stderr,
                             "[aberth] p=%ld lnP_max=%.1f lgprod=[%.1f,%.1f] ln_lc=%.1f resid=%.2e "
                             "maxerr=%.2e lperr=%.2e nbig=%zu\n",
                             p, lpmax, gpmin, gpmax, ln_lc, resid, maxerr, lperr, nbig);
            }

            double score = 0.0;
            if (std::isfinite(radius_target)) score = std::max(score, maxerr / radius_target);
            if (std::isfinite(total_target)) score = std::max(score, cand.logplus_err / total_target);
            if (!std::isfinite(radius_target) && !std::isfinite(total_target)) score = toterr;

            if (score < best_score || best.roots.empty()) {
                best = cand;
                best_score = score;
            }
            last_score = score;
            return cand.certified;
        };

        const int sweep_cap = 46 + 2 * static_cast<int>(N);
        const double efloor_pad = std::log2(4.0 * n) + 2.0;
        std::vector<double> hist;
        std::vector<long> ehist;
        bool armed = false;
        bool certified_now = false;
        for (int sweep = 0; sweep < sweep_cap; ++sweep) {
            double maxcorr = 0.0;
            long emax = LONG_MIN;
            int active = 0;
            for (size_t i = 0; i < N; ++i) {
                if (frozen[i]) continue;
                ++active;
                // fused value/derivative Horner
                mpfr_set(br, C[N], MPFR_RNDN);
                mpfr_set_zero(bi, 1);
                mpfr_set_zero(dbr, 1);
                mpfr_set_zero(dbi, 1);
                for (int k = n - 1; k >= 0; --k) {
                    cmul(q1, q2, dbr, dbi, (*zr)[i], (*zi)[i], t1, t2);
                    mpfr_add(dbr, q1, br, MPFR_RNDN);
                    mpfr_add(dbi, q2, bi, MPFR_RNDN);
                    cmul(q1, q2, br, bi, (*zr)[i], (*zi)[i], t1, t2);
                    mpfr_add(br, q1, C[static_cast<size_t>(k)], MPFR_RNDN);
                    mpfr_set(bi, q2, MPFR_RNDN);
                }
                if (mpfr_zero_p(br) && mpfr_zero_p(bi)) {
                    frozen[i] = 1;
                    continue;
                }
                // freeze once the value sits at this precision's evaluation
                // noise floor: further sweeps cannot improve this iterate
                long eb = mpfr_zero_p(br) ? LONG_MIN : mpfr_get_exp(br);
                long ec = mpfr_zero_p(bi) ? LONG_MIN : mpfr_get_exp(bi);
                long ei = std::max(eb, ec);
                emax = std::max(emax, ei);
                double lzi = std::log2(std::max(std::abs(zd[i]), 1e-300));
                double lt_i = 0.0;
                for (size_t k = 0; k <= N; ++k)
                    if (std::isfinite(lg[k]))
                        lt_i = std::max(lt_i, lg[k] + static_cast<double>(k) * lzi);
                if (static_cast<double>(ei) <= lt_i + efloor_pad - static_cast<double>(p)) {
                    frozen[i] = 1;
                    continue;
                }
                if (mpfr_zero_p(dbr) && mpfr_zero_p(dbi)) {
                    // stationary point: step off it deterministically
                    mpfr_hypot(t1, (*zr)[i], (*zi)[i], MPFR_RNDN);
                    mpfr_add_ui(t1, t1, 1, MPFR_RNDN);
                    mpfr_mul_d(t2, t1, 0.125, MPFR_RNDN);
                    mpfr_add((*zr)[i], (*zr)[i], t2, MPFR_RNDN);
                    mpfr_mul_d(t2, t1, 0.25, MPFR_RNDN);
                    mpfr_add((*zi)[i], (*zi)[i], t2, MPFR_RNDN);
                    zd[i] = {mpfr_get_d((*zr)[i], MPFR_RNDN), mpfr_get_d((*zi)[i], MPFR_RNDN)};
                    maxcorr = 1.0;
                    continue;
                }
                cdiv(nr, ni, br, bi, dbr, dbi, t1, t2, t3);
                bool rep_ok = false;
                std::complex<double> s = repulsion_double(zd, static_cast<int>(i), &rep_ok);
                if (!rep_ok) s = repulsion_exact(i);
                // denom = 1 - (p/p') * sum
                mpfr_mul_d(t1, nr, s.real(), MPFR_RNDN);
                mpfr_mul_d(t2, ni, s.imag(), MPFR_RNDN);
                mpfr_sub(t3, t1, t2, MPFR_RNDN);
                mpfr_d_sub(dr, 1.0, t3, MPFR_RNDN);
                mpfr_mul_d(t1, nr, s.imag(), MPFR_RNDN);
                mpfr_mul_d(t2, ni, s.real(), MPFR_RNDN);
                mpfr_add(t3, t1, t2, MPFR_RNDN);
                mpfr_neg(di, t3, MPFR_RNDN);
                if (mpfr_zero_p(dr) && mpfr_zero_p(di)) mpfr_set_ui(dr, 1, MPFR_RNDN);
                cdiv(cr, ci, nr, ni, dr, di, t1, t2, t3);
                mpfr_sub((*zr)[i], (*zr)[i], cr, MPFR_RNDN);
                mpfr_sub((*zi)[i], (*zi)[i], ci, MPFR_RNDN);
                zd[i] = {mpfr_get_d((*zr)[i], MPFR_RNDN), mpfr_get_d((*zi)[i], MPFR_RNDN)};
                if (std::isfinite(fuji) && std::abs(zd[i]) > 8.0 * fuji) {
                    double th = 2.0 * M_PI * (static_cast<double>(i) + 0.37) / n;
                    mpfr_set_d((*zr)[i], fuji * std::cos(th), MPFR_RNDN);
                    mpfr_set_d((*zi)[i], fuji * std::sin(th), MPFR_RNDN);
                    zd[i] = {mpfr_get_d((*zr)[i], MPFR_RNDN), mpfr_get_d((*zi)[i], MPFR_RNDN)};
                    maxcorr = 1.0;
                    continue;
                }
                double ac = std::hypot(mpfr_get_d(cr, MPFR_RNDN), mpfr_get_d(ci, MPFR_RNDN));
                double rel = ac / (1.0 + std::abs(zd[i]));
                maxcorr = std::max(maxcorr, rel);
                if (rel < freeze_tol) frozen[i] = 1;
            }
            if (active == 0) break;
            hist.push_back(maxcorr);
            ehist.push_back(emax);
            if (maxcorr == 0.0) break;
            // while corrections run hot the root assignment is still being
            // rearranged, and sweeps at this precision are the cheapest way
            // to finish that; the stall exit only arms once the iteration
            // cools (or a generous budget is spent)
            if (maxcorr < 1e-2 || sweep >= 46 + static_cast<int>(N)) armed = true;
            if (armed && sweep >= 12 && maxcorr > 0.5 * hist[static_cast<size_t>(sweep - 6)] &&
                emax > ehist[static_cast<size_t>(sweep - 6)] - 4)
                break;
            if (maxcorr < 1e-3 && sweep % 16 == 15 && (certified_now = attempt())) break;
        }
        if (std::getenv("DYNPAIR_MAHLER_DEBUG")) {
            std::fprintf(stderr, "[aberth] p=%ld sweeps=%zu", p, hist.size());
            for (size_t s = 0; s + 1 < hist.size() || s == hist.size() - 1; ++s) {
                std::fprintf(stderr, " %.2e", hist[s]);
                if (s > 40) break;
            }
            std::fprintf(stderr, "\n");
        }
        if (!certified_now) certified_now = attempt();
        if (certified_now) break;

        bool progressed = last_score < 0.5 * prev_score;
        prev_score = last_score;
        zr_prev = std::move(zr);
        zi_prev = std::move(zi);
        p *= progressed ? 2 : 4;
    }
    return best;
}


struct Stripped {
    Int content;          // > 0
    std::vector<Int> c;   // primitive part with trailing zeros removed
    int zero_roots = 0;
};

Stripped strip(const IntPolynomial& f) {
    auto cp = content_primitive(f);
    Stripped s;
    s.content = cp.content;
    s.c = cp.primitive.coeffs();
    size_t v = 0;
    while (v < s.c.size() && s.c[v] == 0) ++v;
    s.c.erase(s.c.begin(), s.c.begin() + static_cast<long>(v));
    s.zero_roots = static_cast<int>(v);
    return s;
}

RootSet rootset_of(const EngineResult& er, int zero_roots) {
    RootSet rs;
    rs.roots.assign(static_cast<size_t>(zero_roots), {0.0, 0.0});
    rs.radii.assign(static_cast<size_t>(zero_roots), 0.0);
    rs.roots.insert(rs.roots.end(), er.roots.begin(), er.roots.end());
    rs.radii.insert(rs.radii.end(), er.radii.begin(), er.radii.end());
    rs.residual = er.residual;
    rs.precision_bits = er.prec;
    return rs;
}

// ---- exact squarefree split ----------------------------------------------
// Pushforwards through power maps identify whole blocks of periodic points
// (z -> z^m collapses roots of unity onto a smaller cyclotomic set), so the
// period polynomials can carry roots of high exact multiplicity.  Aberth
// converges only linearly on those and the disk certificate loosens by the
// multiplicity, while the factor structure is exact integer data; splitting
// it off first restores simple roots.  Polynomials here are ascending
// coefficient vectors without leading zeros; empty means zero.

void poly_trim(std::vector<Int>& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

int poly_deg(const std::vector<Int>& a) { return static_cast<int>(a.size()) - 1; }

std::vector<Int> poly_deriv(const std::vector<Int>& a) {
    std::vector<Int> d;
    for (size_t k = 1; k < a.size(); ++k) d.push_back(Int(static_cast<long>(k)) * a[k]);
    poly_trim(d);
    return d;
}

std::vector<Int> poly_sub(const std::vector<Int>& a, const std::vector<Int>& b) {
    std::vector<Int> r = a;
    if (b.size() > r.size()) r.resize(b.size(), Int(0));
    for (size_t k = 0; k < b.size(); ++k) r[k] -= b[k];
    poly_trim(r);
    return r;
}

std::vector<Int> poly_mul(const std::vector<Int>& a, const std::vector<Int>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Int> r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void poly_make_primitive(std::vector<Int>& a) {
    poly_trim(a);
    if (a.empty()) return;
    Int g(0);
    for (const Int& x : a) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    if (a.back() < 0) g = -g;
    if (g != 1)
        for (Int& x : a) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

// classic pseudo-remainder; the caller strips content afterwards
std::vector<Int> poly_prem(std::vector<Int> a, const std::vector<Int>& b) {
    const int db = poly_deg(b);
    while (poly_deg(a) >= db) {
        Int la = a.back();
        int shift = poly_deg(a) - db;
        for (Int& x : a) x *= b.back();
        for (int k = 0; k <= db; ++k) a[static_cast<size_t>(k + shift)] -= la * b[static_cast<size_t>(k)];
        poly_trim(a);
    }
    return a;
}

// primitive-PRS gcd with positive leading coefficient; clears *ok and bails
// when remainder coefficients outgrow bit_budget (caller then skips the
// decomposition rather than paying an unbounded exact-arithmetic price)
std::vector<Int> poly_pgcd(std::vector<Int> a, std::vector<Int> b, size_t bit_budget, bool* ok) {
    poly_make_primitive(a);
    poly_make_primitive(b);
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (poly_deg(a) < poly_deg(b)) std::swap(a, b);
    while (true) {
        std::vector<Int> r = poly_prem(a, b);
        if (r.empty()) return b;
        for (const Int& x : r)
            if (mpz_sizeinbase(x.get_mpz_t(), 2) > bit_budget) {
                *ok = false;
                return {};
            }
        poly_make_primitive(r);
        if (poly_deg(r) == 0) return {Int(1)};
        a = std::move(b);
        b = std::move(r);
    }
}

// exact quotient; false when b does not divide a over the integers
bool poly_divexact(const std::vector<Int>& a, const std::vector<Int>& b, std::vector<Int>& q) {
    q.clear();
    if (b.empty()) return false;
    std::vector<Int> r = a;
    poly_trim(r);
    const int db = poly_deg(b);
    if (poly_deg(r) < db) return r.empty();
    q.assign(r.size() - b.size() + 1, Int(0));
    while (poly_deg(r) >= db) {
        if (!mpz_divisible_p(r.back().get_mpz_t(), b.back().get_mpz_t())) return false;
        Int t = r.back() / b.back();
        int shift = poly_deg(r) - db;
        q[static_cast<size_t>(shift)] = t;
        for (int k = 0; k <= db; ++k) r[static_cast<size_t>(k + shift)] -= t * b[static_cast<size_t>(k)];
        poly_trim(r);
    }
    return r.empty();
}

unsigned long mulmod_u(unsigned long a, unsigned long b, unsigned long q) {
    return static_cast<unsigned long>(static_cast<unsigned __int128>(a) * b % q);
}

unsigned long powmod_u(unsigned long a, unsigned long e, unsigned long q) {
    unsigned long r = 1 % q;
    while (e) {
        if (e & 1) r = mulmod_u(r, a, q);
        a = mulmod_u(a, a, q);
        e >>= 1;
    }
    return r;
}

// True only when f is provably squarefree: any prime q missing the leading
// coefficient preserves the degree of gcd(f, f') under reduction, so a
// constant gcd mod q forces a constant gcd over the rationals.  A false
// return is merely "could not certify" and sends the caller to the exact
// decomposition.
bool squarefree_mod_check(const std::vector<Int>& f) {
    static const unsigned long primes[] = {2305843009213693951UL, 1000000007UL, 998244353UL};
    for (unsigned long q : primes) {
        if (mpz_fdiv_ui(f.back().get_mpz_t(), q) == 0) continue;
        std::vector<unsigned long> a(f.size());
        for (size_t k = 0; k < f.size(); ++k) a[k] = mpz_fdiv_ui(f[k].get_mpz_t(), q);
        std::vector<unsigned long> b(f.size() - 1);
        for (size_t k = 1; k < f.size(); ++k) b[k - 1] = mulmod_u(a[k], k, q);
        auto trim = [](std::vector<unsigned long>& v) {
            while (!v.empty() && v.back() == 0) v.pop_back();
        };
        trim(b);
        if (b.empty()) continue;
        while (!b.empty()) {
            unsigned long inv = powmod_u(b.back(), q - 2, q);
            std::vector<unsigned long> r = a;
            for (int k = static_cast<int>(r.size()) - 1; k >= static_cast<int>(b.size()) - 1; --k) {
                unsigned long t = mulmod_u(r[static_cast<size_t>(k)], inv, q);
                if (t == 0) continue;
                size_t shift = static_cast<size_t>(k) - (b.size() - 1);
                for (size_t j = 0; j < b.size(); ++j) {
                    unsigned long s = mulmod_u(t, b[j], q);
                    r[shift + j] = r[shift + j] >= s ? r[shift + j] - s : r[shift + j] + (q - s);
                }
            }
            r.resize(b.size() - 1);
            trim(r);
            a = std::move(b);
            b = std::move(r);
        }
        if (a.size() == 1) return true;
    }
    return false;
}

struct SqfFactor {
    std::vector<Int> c;
    int mult;
};

// Yun's algorithm over the integers (primitive gcds keep every division
// exact by Gauss's lemma).  Empty result means "not decomposed" -- a blown
// bit budget or a failed exactness check -- and the caller falls back to
// running the engine on the undecomposed polynomial.  The reconstruction
// check at the end makes a wrong split impossible rather than unlikely.
std::vector<SqfFactor> yun_decompose(std::vector<Int> f) {
    if (f.back() < 0)
        for (Int& x : f) x = -x;
    size_t peak = 0;
    for (const Int& x : f) peak = std::max(peak, mpz_sizeinbase(x.get_mpz_t(), 2));
    // power-map collisions produce repeated factors with small coefficients;
    // wide inputs would sink whole seconds into the pseudo-remainder chain
    // before any budget tripped, and the cluster certificate already copes
    // with their multiple roots, so hand those straight back
    if (peak > 2048) return {};
    const size_t budget = 64 * (peak + 64);
    bool ok = true;
    std::vector<Int> fp = poly_deriv(f);
    std::vector<Int> g = poly_pgcd(f, fp, budget, &ok);
    if (!ok) return {};
    if (poly_deg(g) == 0) return {{std::move(f), 1}};
    std::vector<Int> w, y;
    if (!poly_divexact(f, g, w) || !poly_divexact(fp, g, y)) return {};
    std::vector<Int> z = poly_sub(y, poly_deriv(w));
    std::vector<SqfFactor> out;
    for (int i = 1; poly_deg(w) > 0 && i <= poly_deg(f); ++i) {
        std::vector<Int> a = poly_pgcd(w, z, budget, &ok);
        if (!ok) return {};
        std::vector<Int> w2, y2;
        if (!poly_divexact(w, a, w2) || !poly_divexact(z, a, y2)) return {};
        if (poly_deg(a) > 0) out.push_back({std::move(a), i});
        w = std::move(w2);
        z = poly_sub(y2, poly_deriv(w));
    }
    if (poly_deg(w) > 0) return {};
    std::vector<Int> prod{Int(1)};
    for (const SqfFactor& fa : out)
        for (int t = 0; t < fa.mult; ++t) prod = poly_mul(prod, fa.c);
    if (prod != f) return {};
    return out;
}

} // namespace

RootSet complex_roots(const IntPolynomial& f, double target_radius) {
    if (f.is_zero()) throw DomainError("complex_roots: zero polynomial");
    if (!(target_radius > 0)) throw DomainError("complex_roots: target radius must be positive");
    Stripped s = strip(f);
    const int n = static_cast<int>(s.c.size()) - 1;
    if (n == 1) {
        EngineResult er;
        Rat root(-s.c[0], s.c[1]);
        root.canonicalize();
        double z = root.get_d();
        er.roots = {{z, 0.0}};
        er.radii = {4e-16 * (1.0 + std::fabs(z))};
        er.prec = 64;
        return rootset_of(er, s.zero_roots);
    }
    if (n < 1) return rootset_of(EngineResult{}, s.zero_roots);
    EngineResult er = aberth_engine(s.c, target_radius, kInf, 8192);
    if (!er.certified) {
        double worst = 0.0;
        for (double r : er.radii) worst = std::max(worst, r);
        throw RootFindingError("complex_roots: could not certify requested radius",
                               rootset_of(er, s.zero_roots), 0.0, worst);
    }
    return rootset_of(er, s.zero_roots);
}

MahlerValue log_mahler(const IntPolynomial& f, double tol) {
    if (f.is_zero()) throw DomainError("log_mahler: zero polynomial");
    if (!(tol > 0)) throw DomainError("log_mahler: tolerance must be positive");
    Stripped s = strip(f);
    double value = 0.0, err = 0.0;
    if (s.content != 1) value += ln_int(s.content, err);
    Int lead = s.c.back();
    if (lead < 0) lead = -lead;
    if (lead != 1) value += ln_int(lead, err);
    const int n = static_cast<int>(s.c.size()) - 1;
    if (n == 1) {
        Rat q(s.c[0], s.c[1]);
        q.canonicalize();
        mpfr_t t;
        mpfr_init2(t, 128);
        mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
        mpfr_abs(t, t, MPFR_RNDN);
        if (mpfr_cmp_ui(t, 1) > 0) {
            mpfr_log(t, t, MPFR_RNDN);
            double lp = mpfr_get_d(t, MPFR_RNDN);
            value += lp;
            err += 2e-16 * (1.0 + std::fabs(lp));
        }
        mpfr_clear(t);
    } else if (n >= 2) {
        std::vector<SqfFactor> factors;
        if (!squarefree_mod_check(s.c)) factors = yun_decompose(s.c);
        if (std::getenv("DYNPAIR_MAHLER_DEBUG")) {
            std::fprintf(stderr, "[sqfree] deg=%d ->", n);
            if (factors.empty())
                std::fprintf(stderr, " none");
            for (const SqfFactor& fa : factors)
                std::fprintf(stderr, " (deg %d)^%d", poly_deg(fa.c), fa.mult);
            std::fprintf(stderr, "\n");
        }
        if (factors.empty()) factors.push_back({s.c, 1});
        long wsum = 0;
        for (const SqfFactor& fa : factors) wsum += static_cast<long>(fa.mult) * poly_deg(fa.c);
        const bool plain = factors.size() == 1 && factors[0].mult == 1;
        for (const SqfFactor& fa : factors) {
            const int dfa = poly_deg(fa.c);
            if (dfa == 1) {
                Rat q(fa.c[0], fa.c[1]);
                q.canonicalize();
                mpfr_t t;
                mpfr_init2(t, 128);
                mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
                mpfr_abs(t, t, MPFR_RNDN);
                if (mpfr_cmp_ui(t, 1) > 0) {
                    mpfr_log(t, t, MPFR_RNDN);
                    double lp = mpfr_get_d(t, MPFR_RNDN);
                    value += fa.mult * lp;
                    err += fa.mult * 2e-16 * (1.0 + std::fabs(lp));
                }
                mpfr_clear(t);
                continue;
            }
            const double share = tol * 0.9 * static_cast<double>(dfa) / static_cast<double>(wsum);
            EngineResult er = aberth_engine(fa.c, kInf, share, 8192);
            value += fa.mult * er.logplus_sum;
            err += fa.mult * er.logplus_err;
            if (!er.certified || !(err <= tol)) {
                throw RootFindingError("log_mahler: could not certify requested tolerance",
                                       rootset_of(er, plain ? s.zero_roots : 0), value, err);
            }
        }
        if (!(err <= tol))
            throw RootFindingError("log_mahler: could not certify requested tolerance",
                                   rootset_of(EngineResult{}, 0), value, err);
    }
    return {value, err};
}

MahlerValue log_mahler_form(const IntBinaryForm& F, double tol) {
    if (F.is_zero()) throw DomainError("log_mahler_form: zero form");
    return log_mahler(F.dehomogenize(), tol);
}

} // namespace dynpair
