#pragma once

#include <dynpair/bigpoly.hpp>
#include <dynpair/errors.hpp>

#include <complex>
#include <vector>

namespace dynpair {

struct RootSet {
    std::vector<std::complex<double>> roots; // all deg(f) roots, with multiplicity
    std::vector<double> radii;               // certified per-root error radii
    double residual = 0.0;                   // max |f(z_i)| / sum |a_k| |z_i|^k
    int precision_bits = 0;                  // precision that produced the certificate
};

struct MahlerValue {
    double value = 0.0;
    double error_bound = 0.0;
};

// Thrown when the precision ladder tops out before the requested certificate;
// carries the best attempt.
struct RootFindingError : ConvergenceError {
    RootSet best;
    RootFindingError(const std::string& msg, RootSet b, double value, double err)
        : ConvergenceError(msg, value, err), best(std::move(b)) {}
};

// All roots of f with per-root certified radii <= target_radius.
RootSet complex_roots(const IntPolynomial& f, double target_radius);

// log Mahler measure: log(content) + log|lc of primitive part| + sum of
// log+|root|, with error_bound <= tol on success.
MahlerValue log_mahler(const IntPolynomial& f, double tol = 1e-9);

// Mahler measure of the dehomogenization; roots at infinity contribute 0.
MahlerValue log_mahler_form(const IntBinaryForm& F, double tol = 1e-9);

} // namespace dynpair
