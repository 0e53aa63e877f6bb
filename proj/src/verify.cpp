#include <dynpair/verify.hpp>

#include <dynpair/errors.hpp>
#include <dynpair/families.hpp>
#include <dynpair/mahler.hpp>
#include <dynpair/pairing.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace dynpair {

void VerificationReport::add(VerificationCase c) {
    all_pass = all_pass && c.pass;
    cases.push_back(std::move(c));
}

namespace {

VerificationCase make_case(std::string input, double lhs, double rhs, double slack) {
    VerificationCase c;
    c.input = std::move(input);
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = rhs - lhs;
    c.pass = lhs <= rhs + slack;
    c.tight = c.pass && c.margin < 2.0 * slack;
    return c;
}

struct PointBag {
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<ProjPointQ> pts;

    bool push(Int a, Int b) {
        if (a == 0 && b == 0) return false;
        ProjPointQ p(std::move(a), std::move(b));
        if (!seen.insert({p.x0.get_str(), p.x1.get_str()}).second) return false;
        pts.push_back(std::move(p));
        return true;
    }
};

// Recurrence probe for the forward orbit of one point of P^1(C) under the
// map, in normalized homogeneous double coordinates.  `best` is the smallest
// chordal distance to an earlier orbit point seen so far (2.0 = sentinel,
// above any actual chordal distance).
struct OrbitProbe {
    bool recurred = false;
    double best = 2.0;
    int steps = 0;
};

OrbitProbe orbit_recurrence(const RationalMap& phi, std::complex<double> z, bool at_infinity,
                            int max_steps, double threshold) {
    const int d = phi.degree();
    std::vector<double> c0(static_cast<size_t>(d) + 1), c1(static_cast<size_t>(d) + 1);
    double cmax = 0.0;
    for (int i = 0; i <= d; ++i) {
        c0[static_cast<size_t>(i)] = phi.lift0().coeffs()[static_cast<size_t>(i)].get_d();
        c1[static_cast<size_t>(i)] = phi.lift1().coeffs()[static_cast<size_t>(i)].get_d();
        cmax = std::max({cmax, std::fabs(c0[static_cast<size_t>(i)]),
                         std::fabs(c1[static_cast<size_t>(i)])});
    }
    if (!(cmax > 0.0) || !std::isfinite(cmax)) return {};
    for (int i = 0; i <= d; ++i) {
        c0[static_cast<size_t>(i)] /= cmax;
        c1[static_cast<size_t>(i)] /= cmax;
    }

    using C = std::complex<double>;
    C x0 = at_infinity ? C(1.0) : z;
    C x1 = at_infinity ? C(0.0) : C(1.0);
    double nrm = std::max(std::abs(x0), std::abs(x1));
    x0 /= nrm;
    x1 /= nrm;

    std::vector<std::pair<C, C>> orbit{{x0, x1}};
    std::vector<C> p0(static_cast<size_t>(d) + 1), p1(static_cast<size_t>(d) + 1);
    OrbitProbe pr;
    for (int s = 1; s <= max_steps; ++s) {
        pr.steps = s;
        p0[0] = 1.0;
        p1[0] = 1.0;
        for (int i = 1; i <= d; ++i) {
            p0[static_cast<size_t>(i)] = p0[static_cast<size_t>(i) - 1] * x0;
            p1[static_cast<size_t>(i)] = p1[static_cast<size_t>(i) - 1] * x1;
        }
        C v0 = 0.0, v1 = 0.0;
        for (int i = 0; i <= d; ++i) {
            C t = p0[static_cast<size_t>(d - i)] * p1[static_cast<size_t>(i)];
            v0 += c0[static_cast<size_t>(i)] * t;
            v1 += c1[static_cast<size_t>(i)] * t;
        }
        double m = std::max(std::abs(v0), std::abs(v1));
        if (!(m > 1e-100) || !std::isfinite(m)) return pr; // fell into an indeterminacy cloud
        x0 = v0 / m;
        x1 = v1 / m;
        double nx = std::hypot(std::abs(x0), std::abs(x1));
        for (const auto& [y0, y1] : orbit) {
            double ny = std::hypot(std::abs(y0), std::abs(y1));
            double dd = std::abs(x0 * y1 - x1 * y0) / (nx * ny);
            pr.best = std::min(pr.best, dd);
        }
        if (pr.best < threshold) {
            pr.recurred = true;
            return pr;
        }
        orbit.emplace_back(x0, x1);
    }
    return pr;
}

std::string complex_label(const std::complex<double>& z) {
    std::ostringstream os;
    os.precision(6);
    os << "root ~ " << z.real();
    if (std::fabs(z.imag()) > 1e-12) os << (z.imag() < 0 ? " - " : " + ") << std::fabs(z.imag()) << "i";
    return os.str();
}

// Escape certificate: per point |h_phi - h| <= B, so
//   sum over roots of h_phi >= (mahler(pushforward^k) - deg * B) / d^k,
// and a strictly positive right side proves some root has infinite orbit.
// Returns the case (pass = certificate fired) without deciding the verdict.
VerificationCase escape_certificate(const RationalMap& phi, const IntBinaryForm& F, int k) {
    double B = height_difference_bound(phi);
    MahlerValue m = log_mahler_form(pushforward_form(F, phi, k), 1e-8);
    std::ostringstream os;
    os << "mahler of " << k << "-step pushforward of the period form vs escape bound "
       << F.degree() << " * " << B;
    return make_case(os.str(), F.degree() * B + m.error_bound + 1e-12, m.value, 0.0);
}

} // namespace

std::vector<ProjPointQ> bounded_rationals(int n) {
    if (n < 1) throw DomainError("bounded_rationals: n must be >= 1");
    PointBag bag;
    bag.push(Int(1), Int(0));
    // Farey traversal of [0,1]; each p/q also contributes -p/q and +-q/p.
    long a = 0, b = 1, c = 1, d = n;
    while (true) {
        bag.push(Int(a), Int(b));
        bag.push(Int(-a), Int(b));
        bag.push(Int(b), Int(a));
        bag.push(Int(-b), Int(a));
        if (a == 1 && b == 1) break;
        long k = (n + b) / d;
        long c2 = k * c - a, d2 = k * d - b;
        a = c;
        b = d;
        c = c2;
        d = d2;
    }
    return bag.pts;
}

std::vector<ProjPointQ> near_fixed_points(const RationalMap& map, int count) {
    PointBag bag;
    if (count <= 0) return bag.pts;
    IntBinaryForm F = periodic_form(map, 1);
    IntPolynomial f = F.dehomogenize();
    if (f.degree() < F.degree()) bag.push(Int(1), Int(0)); // fixed point at infinity

    RootSet rs;
    if (f.degree() >= 1) {
        try {
            rs = complex_roots(f, 1e-10);
        } catch (const RootFindingError& e) {
            rs = e.best;
        }
    }
    for (const std::complex<double>& z : rs.roots) {
        if (static_cast<int>(bag.pts.size()) >= count) break;
        if (std::fabs(z.imag()) > 1e-8) continue;
        // continued-fraction convergents p/q of the fixed point, q <= 64
        double x = z.real();
        double fl = std::floor(x);
        long long pm1 = 1, qm1 = 0;
        long long p = static_cast<long long>(fl), q = 1;
        bag.push(Int(static_cast<long>(p)), Int(1));
        double frac = x - fl;
        for (int it = 0; it < 16 && static_cast<int>(bag.pts.size()) < count; ++it) {
            if (frac < 1e-9) break;
            x = 1.0 / frac;
            fl = std::floor(x);
            if (fl > 1e15) break;
            long long ai = static_cast<long long>(fl);
            long long q2 = ai * q + qm1;
            if (q2 > 64) break;
            long long p2 = ai * p + pm1;
            bag.push(Int(static_cast<long>(p2)), Int(static_cast<long>(q2)));
            pm1 = p;
            qm1 = q;
            p = p2;
            q = q2;
            frac = x - fl;
        }
    }
    return bag.pts;
}

VerificationReport check_height_diff(const RationalMap& psi, double pairing,
                                     const std::vector<ProjPointQ>& sample, double tol) {
    if (!(tol > 0)) throw DomainError("check_height_diff: tolerance must be positive");
    VerificationReport rep;
    rep.name = "height difference bound: " + psi.str();
    const double ln2 = std::log(2.0);
    HeightValue hinf = canonical_height(psi, ProjPointQ::infinity(), tol);
    for (const ProjPointQ& x : sample) {
        HeightValue h = canonical_height(psi, x, tol);
        HeightValue hs = standard_height(x);
        double slack = h.error_bound + hs.error_bound + hinf.error_bound + 1e-12;
        rep.add(make_case(x.str(), h.value - hs.value, pairing + hinf.value + ln2, slack));
    }
    return rep;
}

VerificationReport check_family_inequalities() {
    VerificationReport rep;
    rep.name = "family height-difference inequalities";
    const double ln2 = std::log(2.0);
    const double htol = 1e-8;
    const double smyth = smyth_constant(1e-12);
    const double smyth_err = 1e-9;

    auto grid_for = [](const RationalMap& m) {
        PointBag bag;
        for (const ProjPointQ& p : near_fixed_points(m, 8)) bag.push(p.x0, p.x1);
        for (const ProjPointQ& p : bounded_rationals(6)) {
            if (bag.pts.size() >= 50) break;
            bag.push(p.x0, p.x1);
        }
        return bag.pts;
    };
    auto run_grid = [&](const std::string& label, const RationalMap& m, double bound,
                        double bound_err) {
        for (const ProjPointQ& x : grid_for(m)) {
            HeightValue h = canonical_height(m, x, htol);
            HeightValue hs = standard_height(x);
            double slack = h.error_bound + hs.error_bound + bound_err + 1e-12;
            rep.add(make_case(label + " at " + x.str(), h.value - hs.value, bound, slack));
        }
    };

    for (long av : {1L, 2L, 5L, -3L}) {
        Rat alpha(av);
        double halpha = standard_height(ProjPointQ::from_rational(alpha)).value;
        run_grid("coc(" + std::to_string(av) + ")", coc(alpha), halpha + smyth + ln2, smyth_err);
    }
    for (long cv : {1L, 2L, 5L, -7L, 12L}) {
        Rat c(cv);
        double hc = standard_height(ProjPointQ::from_rational(c)).value;
        run_grid("quad(" + std::to_string(cv) + ")", quad(c), 0.5 * hc + std::log(4.0), 0.0);
    }
    for (auto [a, b] : {std::pair<long, long>{1, 1}, {1, 2}, {2, 3}}) {
        RationalMap m = lattes(a, b);
        LattesArchData lat = lattes_pairing_quadrature(a, b, 1e-6);
        HeightValue hinf = canonical_height(m, ProjPointQ::infinity(), htol);
        std::string label = "lattes(" + std::to_string(a) + "," + std::to_string(b) + ")";
        run_grid(label, m, lat.pairing_value + hinf.value + ln2,
                 lat.pairing_error + hinf.error_bound);
    }
    return rep;
}

VerificationReport equivalence_spot_check(const RationalMap& phi, const RationalMap& psi,
                                          int n_max) {
    if (n_max < 1) throw DomainError("equivalence_spot_check: n_max must be >= 1");
    VerificationReport rep;
    rep.name = "equivalence spot check: " + phi.str() + " vs " + psi.str();

    // Pairing estimates along n = 1..n_max (periodic form degree capped).
    int N = n_max;
    while (N > 1 && std::pow(static_cast<double>(psi.degree()), N) + 1.0 > 520.0) --N;
    std::vector<std::pair<int, int>> schedule;
    for (int n = 1; n <= N; ++n) schedule.emplace_back(n, std::min(n, 2));
    PairingEstimate est = pairing_converged(phi, psi, schedule, 0.02);

    double spread = 0.0;
    if (est.history.size() >= 2) {
        size_t lo = est.history.size() > 3 ? est.history.size() - 3 : 0;
        double mn = est.history[lo].value, mx = mn;
        for (size_t i = lo; i < est.history.size(); ++i) {
            mn = std::min(mn, est.history[i].value);
            mx = std::max(mx, est.history[i].value);
        }
        spread = mx - mn;
    }
    double v = est.value;

    int n0 = std::min(3, n_max);
    while (n0 > 1 && std::pow(static_cast<double>(psi.degree()), n0) + 1.0 > 130.0) --n0;
    IntBinaryForm F = periodic_form(psi, n0);

    const bool zeroish = std::fabs(v) <= std::max(0.02, 3.0 * spread);
    const bool positive = v >= std::max(0.05, 5.0 * spread);

    if (zeroish) {
        // Pairing sits at zero: every psi-periodic point should be
        // phi-preperiodic.  Probe each period-n0 point's orbit for numeric
        // recurrence, and require the arithmetic escape certificate to stay
        // silent.
        rep.add(make_case("pairing magnitude at n = " + std::to_string(est.n), std::fabs(v),
                          0.02, spread + est.error_bound));
        bool numerics_ok = true;
        try {
            IntPolynomial f = F.dehomogenize();
            RootSet rs;
            if (f.degree() >= 1) rs = complex_roots(f, 1e-12);
            std::vector<std::complex<double>> probed;
            const double thr = 1e-5;
            auto probe = [&](const std::complex<double>& z, bool at_inf, const std::string& lbl) {
                OrbitProbe pr = orbit_recurrence(phi, z, at_inf, 48, thr);
                rep.add(make_case(lbl + " recurrence within " + std::to_string(pr.steps) +
                                      " steps",
                                  pr.best, thr, 0.0));
                if (!pr.recurred) numerics_ok = false;
            };
            if (f.degree() < F.degree()) probe({}, true, "orbit of infinity");
            for (const std::complex<double>& z : rs.roots) {
                bool dup = false;
                for (const std::complex<double>& w : probed)
                    dup = dup || std::abs(z - w) < 1e-9;
                if (dup) continue;
                probed.push_back(z);
                probe(z, false, "orbit of " + complex_label(z));
            }
        } catch (const RootFindingError&) {
            rep.add(make_case("periodic points resolved", 1.0, 0.0, 0.0));
            numerics_ok = false;
        }
        VerificationCase esc = escape_certificate(phi, F, 2);
        // the certificate firing would contradict a zero pairing
        bool contradiction = esc.pass;
        esc.pass = !esc.pass;
        esc.margin = -esc.margin;
        std::swap(esc.lhs, esc.rhs);
        esc.input += " (must stay silent)";
        rep.add(esc);
        rep.note = contradiction ? "inconsistent" : (numerics_ok ? "consistent" : "inconclusive");
    } else if (positive) {
        // Pairing bounded away from zero: certify that the period-n0 multiset
        // carries positive average canonical height under phi, i.e. some
        // psi-periodic orbit escapes phi-preperiodicity.
        rep.add(make_case("pairing magnitude at n = " + std::to_string(est.n),
                          std::max(0.05, 5.0 * spread), v, 0.0));
        rep.add(escape_certificate(phi, F, 2));
        rep.note = rep.all_pass ? "consistent" : "inconclusive";
    } else {
        rep.add(make_case("pairing estimates resolve the verdict at n_max = " +
                              std::to_string(n_max),
                          1.0, 0.0, 0.0));
        rep.note = "inconclusive";
    }
    return rep;
}

} // namespace dynpair
