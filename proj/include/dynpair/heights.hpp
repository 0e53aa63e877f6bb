#pragma once

#include <dynpair/bigpoly.hpp>
#include <dynpair/dynmap.hpp>

#include <string>

namespace dynpair {

// A point of the projective line over Q in lowest terms: coprime integer
// coordinates with x1 > 0, or x1 == 0 and x0 > 0.
struct ProjPointQ {
    Int x0, x1;

    ProjPointQ(Int a0, Int a1);
    static ProjPointQ from_rational(const Rat& x);
    static ProjPointQ infinity() { return {Int(1), Int(0)}; }

    bool operator==(const ProjPointQ&) const = default;
    std::string str() const;
};

struct HeightValue {
    double value = 0.0;
    double error_bound = 0.0;
    int iterations_used = 0;
};

// log max(|x0|, |x1|); exact up to floating rounding
HeightValue standard_height(const ProjPointQ& p);

// Canonical height for the map's iteration, via the reduced-orbit telescoping
// series.  Guarantees |value - h_map(p)| <= error_bound <= tol or throws
// ConvergenceError (carrying the best estimate) when the iteration cap cannot
// reach tol.
HeightValue canonical_height(const RationalMap& map, const ProjPointQ& p, double tol);

// Certified bound on |canonical - standard| for this map: the one-step
// discrepancy sup |h(phi(x)) - d h(x)| divided by d - 1.  The one-step bound
// comes from the lift's coefficient sums (upper) and Bezout cofactors of the
// two lift forms scaled by the resultant (lower).
double height_difference_bound(const RationalMap& map);

// Average standard height of the projective root multiset of a primitive
// form: log Mahler measure of the dehomogenization over the degree.  Roots
// at infinity count with height 0.
double orbit_average_height(const IntBinaryForm& F);

} // namespace dynpair
