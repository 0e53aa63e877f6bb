#pragma once

#include <dynpair/bigpoly.hpp>
#include <dynpair/dynmap.hpp>

#include <utility>
#include <vector>

namespace dynpair {

struct PairingHistoryEntry {
    int n = 0;
    int k = 0;
    double value = 0.0;
};

struct PairingEstimate {
    double value = 0.0;
    int n = 0;
    int k = 0;
    int form_degree = 0;     // deg(psi)^n + 1
    double error_bound = 0.0; // numeric (Mahler) error only, not truncation
    std::vector<PairingHistoryEntry> history;
    bool stable = true;
};

// Primitive form of formal degree deg(psi)^n + 1 whose projective root
// multiset is the period-n multiset of psi (fixed points of psi^n, with
// multiplicity, including infinity).
IntBinaryForm periodic_form(const RationalMap& psi, int n);

// Primitive form of the same formal degree as F whose root multiset is
// phi^k applied to F's root multiset.
IntBinaryForm pushforward_form(const IntBinaryForm& F, const RationalMap& phi, int k);

// Average of the k-th canonical-height approximant h(phi^k(.))/deg(phi)^k
// over the period-n multiset of psi:
//   m(pushforward(periodic_form(psi,n), phi, k)) / ((deg(psi)^n + 1) deg(phi)^k)
// Converges to the dynamical pairing of phi and psi as n, k grow.
PairingEstimate pairing_estimate(const RationalMap& phi, const RationalMap& psi, int n, int k,
                                 double mahler_tol = 1e-9);

// Runs a schedule of (n, k) pairs with strictly increasing n, returning the
// last estimate with the full history attached.  When phi is a power map its
// canonical height is exactly the standard height, so k is forced to 0.
// `stable` reports whether the last three values spread at most
// stability_tol.
PairingEstimate pairing_converged(const RationalMap& phi, const RationalMap& psi,
                                  const std::vector<std::pair<int, int>>& schedule,
                                  double stability_tol);

inline std::vector<std::pair<int, int>> default_schedule(int N) {
    std::vector<std::pair<int, int>> s;
    for (int n = 1; n <= N; ++n) s.emplace_back(n, n);
    return s;
}

// Local pairing of the divisors of two integer pairs at a finite place of
// good reduction:
//   log|s0 t1 - s1 t0|_p - log max(|s0|_p,|s1|_p) - log max(|t0|_p,|t1|_p).
double local_pairing_good_reduction(const std::pair<Int, Int>& s, const std::pair<Int, Int>& t,
                                    const Int& p);

} // namespace dynpair
