#pragma once

#include <dynpair/bigpoly.hpp>

namespace dynpair {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

// I(t) = integral over theta in [0,1) of log+ |t + e^(2 pi i theta)|, minus
// log+ t.  Exactly zero at t = 0 and for t >= 2 (mean value property); in
// between the integrand vanishes identically past the crossing angle
// acos(-t/2), so only the smooth positive arc is quadratured.
QuadratureResult I_of_t(double t, double tol = 1e-9);

// (3 sqrt(3) / 4 pi) * L(2, chi) for the nontrivial quadratic character mod 3,
// summed in blocks 1/(3k+1)^2 - 1/(3k+2)^2 with a certified tail cutoff.
// Equals I_of_t(1); the effective tolerance floors near machine epsilon.
double smyth_constant(double tol = 1e-12);

// Pairing of x^2 with its conjugate by the involution x -> alpha - x:
// standard height of alpha plus I(|alpha|) at the archimedean place.
double coc_pairing_exact(const Rat& alpha, double tol = 1e-9);

struct PairingBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// Two-sided bound for the pairing of x^2 with x^2 + c:
// [h(c)/2 - log 3, h(c)/2 + log 2].
PairingBounds quad_pairing_bounds(const Rat& c);

// F(alpha, beta) = integral over [0, 2 pi) of
// 1 / (|alpha e^(i theta) - 1| |beta e^(i theta) + 1|) d theta.
// Symmetric in (alpha, beta); satisfies F(1/a, 1/b) = a b F(a, b).
// Diverges at alpha = 1 or beta = 1 (rejected).
QuadratureResult F_alpha_beta(double alpha, double beta, double tol = 1e-8);

// Archimedean data for the degree-4 Lattes map attached to
// y^2 = x (x - a) (x + b):  the planar density is 1/(C_P |P(x)|) with
// P = x (x - a) (x + b), and the pairing with x^2 is
// theta + log sqrt(ab) where theta is the normalized log(1/r) moment.
struct LattesArchData {
    long a = 0, b = 0;
    QuadratureResult c_p;              // integral of |P|^(-1) over the plane
    QuadratureResult logplus_integral; // integral of log+ |x| against the measure
    QuadratureResult theta;            // log(1/r) moment over the unit disk part
    double pairing_value = 0.0;        // theta + log sqrt(ab)
    double pairing_error = 0.0;        // max of internal estimate and the
                                       // logplus-identity reconciliation gap
};

// Polar quadrature of the three integrals.  C_P is additionally recomputed
// with the integration order swapped (theta outside) and the two routes
// reconciled into the reported error estimate.
LattesArchData lattes_pairing_quadrature(long a, long b, double tol = 1e-6);

} // namespace dynpair
