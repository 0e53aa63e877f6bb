#include <dynpair/families.hpp>

#include <dynpair/errors.hpp>
#include <dynpair/heights.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace dynpair {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule {
    std::vector<double> x, w;
};

// Gauss-Legendre nodes and weights computed at startup by Newton iteration on
// the Legendre recurrence, instead of pasting a constant table.
Rule make_rule(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 1; i <= n; ++i) {
        double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[i - 1] = x;
        r.w[i - 1] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const Rule& rule7() {
    static const Rule r = make_rule(7);
    return r;
}
const Rule& rule15() {
    static const Rule r = make_rule(15);
    return r;
}

struct Seg {
    double a, b, val, err;
};

// max-heap on the error estimate, ties broken by position for determinism
struct SegWorse {
    bool operator()(const Seg& s, const Seg& t) const {
        if (s.err != t.err) return s.err < t.err;
        return s.a > t.a;
    }
};

template <typename Fn>
Seg make_seg(Fn&& f, double a, double b, long& evals) {
    const Rule& g7 = rule7();
    const Rule& g15 = rule15();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double q7 = 0.0, q15 = 0.0;
    for (int i = 0; i < 7; ++i) q7 += g7.w[i] * f(c + h * g7.x[i]);
    for (int i = 0; i < 15; ++i) q15 += g15.w[i] * f(c + h * g15.x[i]);
    evals += 22;
    return {a, b, q15 * h, std::fabs((q15 - q7) * h)};
}

// Globally adaptive panel integration: repeatedly bisect the segment with the
// worst 7-vs-15-point discrepancy until the total estimate meets tol.
template <typename Fn>
QuadratureResult integrate_adaptive(Fn&& f, double lo, double hi, double tol,
                                    std::vector<double> splits, const char* what) {
    QuadratureResult out;
    if (!(hi > lo)) return out;

    splits.push_back(lo);
    splits.push_back(hi);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

    long evals = 0;
    std::priority_queue<Seg, std::vector<Seg>, SegWorse> active;
    std::vector<Seg> done;
    double err_run = 0.0;
    int panels = 0;
    for (size_t i = 0; i + 1 < splits.size(); ++i) {
        if (splits[i] < lo || splits[i + 1] > hi) continue;
        Seg s = make_seg(f, splits[i], splits[i + 1], evals);
        err_run += s.err;
        active.push(s);
        ++panels;
    }

    constexpr int kMaxPanels = 40000;
    while (err_run > 0.9 * tol && panels < kMaxPanels && !active.empty()) {
        Seg s = active.top();
        active.pop();
        double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b)) { // exhausted double resolution
            done.push_back(s);
            err_run -= s.err;
            continue;
        }
        Seg l = make_seg(f, s.a, m, evals);
        Seg r = make_seg(f, m, s.b, evals);
        err_run += l.err + r.err - s.err;
        active.push(l);
        active.push(r);
        ++panels;
    }

    std::vector<Seg> all = std::move(done);
    while (!active.empty()) {
        all.push_back(active.top());
        active.pop();
    }
    std::sort(all.begin(), all.end(), [](const Seg& s, const Seg& t) { return s.a < t.a; });
    double val = 0.0, vc = 0.0, err = 0.0, ec = 0.0;
    for (const Seg& s : all) {
        double y = s.val - vc, t = val + y;
        vc = (t - val) - y;
        val = t;
        y = s.err - ec;
        t = err + y;
        ec = (t - err) - y;
        err = t;
    }
    out.value = val;
    out.error_estimate = err;
    out.evaluations = evals;
    if (!std::isfinite(val) || !std::isfinite(err) || err > tol)
        throw ConvergenceError(std::string(what) + ": quadrature tolerance unreachable", val,
                               std::isfinite(err) ? err : 1e300);
    return out;
}

// Geometric refinement points marching inward from a singular endpoint, so
// panel widths stay comparable to the distance from the singularity and the
// embedded error estimates stay trustworthy.
void add_ladder(std::vector<double>& splits, double from, double toward, double w0) {
    double span = std::fabs(toward - from);
    double dir = toward > from ? 1.0 : -1.0;
    for (double d = w0; d < span; d *= 4.0) splits.push_back(from + dir * d);
}

} // namespace

QuadratureResult I_of_t(double t, double tol) {
    if (!(t >= 0.0)) throw DomainError("I_of_t: t must be nonnegative");
    if (!(tol > 0.0)) throw DomainError("I_of_t: tolerance must be positive");
    if (t == 0.0 || t >= 2.0) return {0.0, 0.0, 0};
    // |t + e^(i phi)| crosses 1 at phi = acos(-t/2); beyond it log+ vanishes
    double cross = std::acos(-0.5 * t);
    auto f = [t](double phi) { return std::log(t * (t + 2.0 * std::cos(phi)) + 1.0); };
    double scale = 1.0 / (2.0 * kPi);
    QuadratureResult q;
    try {
        q = integrate_adaptive(f, 0.0, cross, tol * 2.0 * kPi * 0.9, {}, "I_of_t");
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(e.what(),
                               e.best_value * scale - (t > 1.0 ? std::log(t) : 0.0),
                               e.best_error * scale);
    }
    q.value = q.value * scale - (t > 1.0 ? std::log(t) : 0.0);
    q.error_estimate = q.error_estimate * scale + 4e-16 * (1.0 + std::fabs(q.value));
    return q;
}

double smyth_constant(double tol) {
    if (!(tol > 0.0)) throw DomainError("smyth_constant: tolerance must be positive");
    double eff = std::max(tol, 1e-15); // summation accuracy floor
    // tail over k >= K of 1/(3k+1)^2 - 1/(3k+2)^2 <= sum of 1/(9k^3), which is
    // below 1/(18 (K-1)^2)
    long K = 2 + static_cast<long>(std::ceil(std::sqrt(1.0 / (18.0 * eff))));
    double s = 0.0, c = 0.0;
    for (long k = K - 1; k >= 0; --k) {
        double u = 3.0 * k + 1.0, v = 3.0 * k + 2.0;
        double term = 1.0 / (u * u) - 1.0 / (v * v);
        double y = term - c, t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return 0.75 * std::sqrt(3.0) / kPi * s;
}

double coc_pairing_exact(const Rat& alpha, double tol) {
    if (!(tol > 0.0)) throw DomainError("coc_pairing_exact: tolerance must be positive");
    double h = standard_height(ProjPointQ::from_rational(alpha)).value;
    double t = std::fabs(alpha.get_d());
    return h + I_of_t(t, tol).value;
}

PairingBounds quad_pairing_bounds(const Rat& c) {
    double h = standard_height(ProjPointQ::from_rational(c)).value;
    return {0.5 * h - std::log(3.0), 0.5 * h + std::log(2.0)};
}

QuadratureResult F_alpha_beta(double alpha, double beta, double tol) {
    if (!(alpha >= 0.0) || !(beta >= 0.0))
        throw DomainError("F_alpha_beta: arguments must be nonnegative");
    if (alpha == 1.0 || beta == 1.0)
        throw DomainError("F_alpha_beta: divergent at alpha = 1 or beta = 1");
    if (!(tol > 0.0)) throw DomainError("F_alpha_beta: tolerance must be positive");
    auto f = [alpha, beta](double th) {
        double cth = std::cos(th), sth = std::sin(th);
        // |a e^(i th) - 1|^2 without cancellation near th = 0
        double pa = (alpha - cth) * (alpha - cth) + sth * sth;
        double pb = (beta + cth) * (beta + cth) + sth * sth;
        return 1.0 / std::sqrt(pa * pb);
    };
    // peak widths at the two endpoints scale like |alpha - 1| / sqrt(alpha)
    std::vector<double> splits{0.5 * kPi};
    add_ladder(splits, 0.0, 0.5 * kPi,
               std::clamp(std::fabs(alpha - 1.0) / std::max(1.0, std::sqrt(alpha)), 1e-13, 0.5));
    add_ladder(splits, kPi, 0.5 * kPi,
               std::clamp(std::fabs(beta - 1.0) / std::max(1.0, std::sqrt(beta)), 1e-13, 0.5));
    QuadratureResult q;
    try {
        q = integrate_adaptive(f, 0.0, kPi, 0.45 * tol, splits, "F_alpha_beta");
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(e.what(), 2.0 * e.best_value, 2.0 * e.best_error);
    }
    q.value *= 2.0;
    q.error_estimate = 2.0 * q.error_estimate + 4e-16 * (1.0 + q.value);
    return q;
}

LattesArchData lattes_pairing_quadrature(long a, long b, double tol) {
    if (a < 1 || b < 1)
        throw DomainError("lattes_pairing_quadrature: parameters must be positive");
    if (!(tol > 0.0)) throw DomainError("lattes_pairing_quadrature: tolerance must be positive");
    tol = std::max(tol, 1e-9); // nested-quadrature accuracy floor

    const double da = static_cast<double>(a), db = static_cast<double>(b);
    const double ab = da * db;
    const double W = std::sqrt(ab);
    const double logW = 0.5 * std::log(ab);
    const double minab = std::min(da, db);

    long inner_evals = 0;
    const double tol_in = std::max(tol * 1.3e-3 / std::max(1.0, W), 3e-13);
    auto G = [&](double r) {
        double al = r / da, be = r / db;
        if (al == 1.0) al = std::nextafter(1.0, 2.0);
        if (be == 1.0) be = std::nextafter(1.0, 2.0);
        QuadratureResult q = F_alpha_beta(al, be, tol_in);
        inner_evals += q.evaluations;
        return q.value;
    };

    // splits around the one singular radius min(a,b) that can meet [lo2, hi2]
    auto sing_splits = [&](double lo2, double hi2) {
        std::vector<double> s;
        double w0 = minab * 1e-7;
        if (minab > lo2 && minab < hi2) {
            s.push_back(minab);
            add_ladder(s, minab, lo2, w0);
            add_ladder(s, minab, hi2, w0);
        } else if (minab == lo2) {
            add_ladder(s, lo2, hi2, w0);
        } else if (minab == hi2) {
            add_ladder(s, hi2, lo2, w0);
        }
        return s;
    };

    const double tau = tol * 0.15 * std::max(1.0, W);

    // C_P: reflecting r -> ab/r folds the ray integral onto (0, sqrt(ab)]
    long e0 = inner_evals;
    QuadratureResult S0 =
        integrate_adaptive(G, 0.0, W, tau, sing_splits(0.0, W), "lattes normalizer");
    S0.evaluations = inner_evals - e0;

    // theta numerator over the unit interval
    auto fN = [&](double r) { return G(r) * std::log(1.0 / r); };
    std::vector<double> n_splits = sing_splits(0.0, 1.0);
    add_ladder(n_splits, 0.0, 1.0, 1e-8);
    e0 = inner_evals;
    QuadratureResult N =
        integrate_adaptive(fN, 0.0, 1.0, tau, n_splits, "lattes theta numerator");
    N.evaluations = inner_evals - e0;

    // direct log+ moment: the piece above sqrt(ab) reflects to a weight
    // log(ab/u) on (0, sqrt(ab))
    QuadratureResult P1{0.0, 0.0, 0};
    if (W > 1.0) {
        auto fP1 = [&](double r) { return G(r) * std::log(r); };
        e0 = inner_evals;
        P1 = integrate_adaptive(fP1, 1.0, W, tau, sing_splits(1.0, W), "lattes logplus upper");
        P1.evaluations = inner_evals - e0;
    }
    auto fP2 = [&](double u) { return G(u) * (std::log(ab) - std::log(u)); };
    std::vector<double> p2_splits = sing_splits(0.0, W);
    add_ladder(p2_splits, 0.0, W, std::min(1.0, W) * 1e-8);
    e0 = inner_evals;
    QuadratureResult P2 =
        integrate_adaptive(fP2, 0.0, W, tau, p2_splits, "lattes logplus reflected");
    P2.evaluations = inner_evals - e0;

    // Independent route for the normalizer with the integration order swapped:
    // angle outside, radius inside (the reflection also folds the outer sheet
    // in, swapping the roles of a and b and flipping the angle).
    long evK = 0;
    const double tauK = tau / ab;
    const double tol_in2 = std::max(tauK / (4.0 * kPi), 1e-12);
    auto K = [&](double th) {
        double cth = std::cos(th), sth = std::sin(th);
        auto fr = [&](double r) {
            double rs = r * sth;
            double w1 = (r * cth - da) * (r * cth - da) + rs * rs;
            double w2 = (r * cth + db) * (r * cth + db) + rs * rs;
            double w3 = (r * cth - db) * (r * cth - db) + rs * rs;
            double w4 = (r * cth + da) * (r * cth + da) + rs * rs;
            return 1.0 / std::sqrt(w1 * w2) + 1.0 / std::sqrt(w3 * w4);
        };
        QuadratureResult q =
            integrate_adaptive(fr, 0.0, W, tol_in2, sing_splits(0.0, W), "lattes check inner");
        evK += q.evaluations;
        return q.value;
    };
    std::vector<double> k_splits{0.5 * kPi};
    add_ladder(k_splits, 0.0, kPi, 1e-6);
    add_ladder(k_splits, kPi, 0.0, 1e-6);
    QuadratureResult CPalt =
        integrate_adaptive(K, 0.0, kPi, tauK + kPi * tol_in2, k_splits, "lattes check");
    double S0_alt = CPalt.value * ab;
    double gap2 = std::fabs(S0.value - S0_alt);
    double eS0 = std::max(S0.error_estimate, gap2 + CPalt.error_estimate * ab);

    const double twoS0 = 2.0 * S0.value;
    double theta_v = N.value / twoS0;
    double theta_e = (N.error_estimate + 2.0 * std::fabs(theta_v) * eS0) / twoS0 +
                     1e-15 * (1.0 + std::fabs(theta_v));
    double lp_v = (P1.value + P2.value) / twoS0;
    double lp_e = (P1.error_estimate + P2.error_estimate + 2.0 * std::fabs(lp_v) * eS0) / twoS0 +
                  1e-15 * (1.0 + std::fabs(lp_v));

    LattesArchData out;
    out.a = a;
    out.b = b;
    out.c_p = {twoS0 / ab, 2.0 * eS0 / ab, S0.evaluations + evK};
    out.logplus_integral = {lp_v, lp_e, P1.evaluations + P2.evaluations};
    out.theta = {theta_v, theta_e, N.evaluations};
    out.pairing_value = theta_v + logW;
    double recon = std::fabs(lp_v - out.pairing_value);
    out.pairing_error =
        std::max(theta_e, recon) + 4e-16 * (1.0 + std::fabs(out.pairing_value));
    return out;
}

} // namespace dynpair
