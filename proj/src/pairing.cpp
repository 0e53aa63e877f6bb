#include <dynpair/pairing.hpp>

#include <dynpair/errors.hpp>
#include <dynpair/mahler.hpp>

#include <algorithm>
#include <cmath>

namespace dynpair {

namespace {

// p-adic valuation; `x` must be nonzero
unsigned long val_p(const Int& x, const Int& p) {
    Int t;
    return mpz_remove(t.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
}

} // namespace

IntBinaryForm periodic_form(const RationalMap& psi, int n) {
    if (n < 1) throw DomainError("periodic_form: period must be positive");
    IterateLift it = iterate_lift(psi, n);
    IntBinaryForm X0(1, {Int(1), Int(0)});
    IntBinaryForm X1(1, {Int(0), Int(1)});
    IntBinaryForm F = X1 * it.f0 + (-(X0 * it.f1));
    return content_primitive(F).primitive;
}

IntBinaryForm pushforward_form(const IntBinaryForm& F, const RationalMap& phi, int k) {
    if (F.is_zero()) throw DomainError("pushforward_form: zero form");
    if (k < 0) throw DomainError("pushforward_form: negative iteration count");
    IntBinaryForm G = content_primitive(F).primitive;
    for (int i = 0; i < k; ++i) G = resultant_with_parameters(G, phi.lift0(), phi.lift1());
    return G;
}

PairingEstimate pairing_estimate(const RationalMap& phi, const RationalMap& psi, int n, int k,
                                 double mahler_tol) {
    if (!(mahler_tol > 0)) throw DomainError("pairing_estimate: tolerance must be positive");
    IntBinaryForm F = periodic_form(psi, n);
    IntBinaryForm G = pushforward_form(F, phi, k);
    double denom = static_cast<double>(F.degree()) * std::pow(phi.degree(), k);
    double tol_eff = std::min(0.05, mahler_tol * denom);
    MahlerValue m = log_mahler_form(G, tol_eff);

    PairingEstimate est;
    est.value = m.value / denom;
    est.n = n;
    est.k = k;
    est.form_degree = F.degree();
    est.error_bound = m.error_bound / denom;
    est.history.push_back({n, k, est.value});
    return est;
}

PairingEstimate pairing_converged(const RationalMap& phi, const RationalMap& psi,
                                  const std::vector<std::pair<int, int>>& schedule,
                                  double stability_tol) {
    if (schedule.empty()) throw DomainError("pairing_converged: empty schedule");
    if (!(stability_tol > 0)) throw DomainError("pairing_converged: tolerance must be positive");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i].first <= schedule[i - 1].first)
            throw DomainError("pairing_converged: schedule degrees must increase");

    const bool exact_phi_height = phi.is_power_map();
    PairingEstimate last;
    std::vector<PairingHistoryEntry> history;
    for (const auto& [n, k] : schedule) {
        int keff = exact_phi_height ? 0 : k;
        last = pairing_estimate(phi, psi, n, keff);
        history.push_back(last.history.front());
    }
    last.history = std::move(history);

    size_t m = last.history.size();
    size_t lo = m >= 3 ? m - 3 : 0;
    double vmin = last.history[lo].value, vmax = vmin;
    for (size_t i = lo; i < m; ++i) {
        vmin = std::min(vmin, last.history[i].value);
        vmax = std::max(vmax, last.history[i].value);
    }
    last.stable = (vmax - vmin) <= stability_tol;
    return last;
}

double local_pairing_good_reduction(const std::pair<Int, Int>& s, const std::pair<Int, Int>& t,
                                    const Int& p) {
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
        throw DomainError("local_pairing_good_reduction: place must be a finite prime");
    if ((s.first == 0 && s.second == 0) || (t.first == 0 && t.second == 0))
        throw DomainError("local_pairing_good_reduction: pairs must be nonzero");
    Int cross = s.first * t.second - s.second * t.first;
    if (cross == 0)
        throw DomainError("local_pairing_good_reduction: divisors coincide");

    auto min_val = [&p](const Int& a, const Int& b) -> long {
        if (a == 0) return static_cast<long>(val_p(b, p));
        if (b == 0) return static_cast<long>(val_p(a, p));
        return static_cast<long>(std::min(val_p(a, p), val_p(b, p)));
    };
    long v = -static_cast<long>(val_p(cross, p)) + min_val(s.first, s.second) +
             min_val(t.first, t.second);
    return static_cast<double>(v) * std::log(p.get_d());
}

} // namespace dynpair
