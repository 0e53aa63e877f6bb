#pragma once

#include <dynpair/dynmap.hpp>
#include <dynpair/heights.hpp>

#include <string>
#include <vector>

namespace dynpair {

struct VerificationCase {
    std::string input; // description of the point or quantity tested
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    bool pass = false;
    bool tight = false; // passed, but with margin below twice the numeric slack
};

struct VerificationReport {
    std::string name;
    std::vector<VerificationCase> cases;
    bool all_pass = true;
    std::string note; // verdict or context not captured by the cases themselves

    void add(VerificationCase c);
};

// For each sample point x checks
//     h_psi(x) - h(x) <= pairing + h_psi(infinity) + log 2 + slack
// where h is the standard height, h_psi the canonical height of psi computed
// to `tol`, and slack accumulates the certified height error bounds.  The
// caller supplies the pairing value of the squaring map with psi (closed form
// or converged estimate).
VerificationReport check_height_diff(const RationalMap& psi, double pairing,
                                     const std::vector<ProjPointQ>& sample, double tol = 1e-9);

// Height-difference bounds specialised to the stock families, each over a
// point grid of bounded rationals plus points near the map's fixed points:
//   conjugated squaring coc(alpha):  h(alpha) + smyth_constant + log 2
//   quadratic quad(c):               h(c)/2 + log 4
//   lattes(a, b):                    log sqrt(ab) + measured theta + log 2
VerificationReport check_family_inequalities();

// Semi-decision procedure relating the pairing of phi and psi to whether they
// share preperiodic points.  Runs pairing estimates for n = 1..n_max.  When
// the estimates sit at zero, enumerates psi-periodic points (as roots of the
// period form) and checks each has a recurrent phi-orbit numerically; when
// the estimates are bounded away from zero, certifies via Mahler measures of
// pushforwards that the psi-periodic multiset has positive average canonical
// height under phi, i.e. some psi-periodic orbit escapes.  The note records
// the verdict: "consistent", "inconsistent", or "inconclusive".  Numerics can
// never prove the exact statements, so failures of the orbit probes downgrade
// to "inconclusive" rather than silently passing.
VerificationReport equivalence_spot_check(const RationalMap& phi, const RationalMap& psi,
                                          int n_max);

// All rationals p/q in lowest terms with 0 <= p <= q <= n (Farey enumeration
// of [0,1]) extended by sign and reciprocal, plus the point at infinity.
// Ordered by the Farey traversal, deterministic.
std::vector<ProjPointQ> bounded_rationals(int n);

// Small-denominator continued-fraction convergents of the map's real fixed
// points: rational points adversarially close to where the height-difference
// inequalities are most strained.  At most `count` points.
std::vector<ProjPointQ> near_fixed_points(const RationalMap& map, int count);

} // namespace dynpair
