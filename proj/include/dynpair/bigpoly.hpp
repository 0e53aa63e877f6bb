#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace dynpair {

using Int = mpz_class;
using Rat = mpq_class;

// Dense univariate polynomial over Z, coefficients stored ascending.
// Normalized so the last stored coefficient is nonzero; the zero polynomial
// stores nothing and reports degree -1.
class IntPolynomial {
public:
    IntPolynomial() = default;
    explicit IntPolynomial(std::vector<Int> coeffs);

    static IntPolynomial constant(Int c);
    static IntPolynomial monomial(Int c, int power);

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Int>& coeffs() const { return c_; }
    // Coefficient of x^i; zero outside the stored range.
    const Int& coeff(int i) const;
    const Int& leading() const; // requires nonzero

    IntPolynomial operator-() const;
    IntPolynomial operator+(const IntPolynomial& o) const;
    IntPolynomial operator-(const IntPolynomial& o) const;
    IntPolynomial operator*(const IntPolynomial& o) const;
    IntPolynomial operator*(const Int& s) const;
    bool operator==(const IntPolynomial& o) const = default;

    IntPolynomial derivative() const;
    Int content() const; // 0 for the zero polynomial, >= 1 otherwise
    Int eval(const Int& x) const;
    Rat eval(const Rat& x) const;
    std::string str() const;

private:
    std::vector<Int> c_;
};

// Homogeneous binary form of fixed degree in (x0, x1) over Z.
// coeffs[i] is the coefficient of x0^(degree-i) * x1^i. The all-zero form is
// representable (it is the error signal of the parametric resultant) but
// invalid as input elsewhere.
class IntBinaryForm {
public:
    IntBinaryForm() : deg_(0), c_(1, Int(0)) {}
    IntBinaryForm(int degree, std::vector<Int> coeffs);

    static IntBinaryForm x0(); // degree-1 form x0
    static IntBinaryForm x1(); // degree-1 form x1
    static IntBinaryForm constant(Int c);
    // Homogenize an integer polynomial to the given form degree (>= deg p).
    static IntBinaryForm homogenize(const IntPolynomial& p, int degree);

    int degree() const { return deg_; }
    const std::vector<Int>& coeffs() const { return c_; }
    const Int& coeff(int i) const { return c_[static_cast<size_t>(i)]; }
    bool is_zero() const;

    IntBinaryForm operator-() const;
    IntBinaryForm operator+(const IntBinaryForm& o) const; // same degree
    IntBinaryForm operator-(const IntBinaryForm& o) const; // same degree
    IntBinaryForm operator*(const IntBinaryForm& o) const;
    IntBinaryForm operator*(const Int& s) const;
    bool operator==(const IntBinaryForm& o) const = default;

    IntBinaryForm pow(int e) const;
    Int content() const;
    Int eval(const Int& a0, const Int& a1) const;
    // Substitute at x1 = 1; the coefficient multiset is preserved, so content
    // is too. Degree of the result drops by the multiplicity of the root at
    // infinity (vanishing top coefficients).
    IntPolynomial dehomogenize() const;
    std::string str() const;

private:
    int deg_;
    std::vector<Int> c_;
};

template <typename Poly>
struct ContentPrimitive {
    Int content; // 0 iff the input is zero
    Poly primitive;
};

// Gauss content/primitive split with a canonical sign: the primitive part has
// a positive coefficient at its highest x-power (for forms: the nonzero
// coefficient with the highest x0-power). content * primitive == +/- input;
// the sign is absorbed into the primitive part's normalization.
ContentPrimitive<IntPolynomial> content_primitive(const IntPolynomial& f);
ContentPrimitive<IntBinaryForm> content_primitive(const IntBinaryForm& f);

// Sylvester resultant of two binary forms, dehomogenized at x1 = 1 with
// degrees padded to the form degrees. Zero exactly when the forms share a
// projective root over the algebraic closure.
Int resultant_binary(const IntBinaryForm& F, const IntBinaryForm& G);

// Resultant of F(x0,x1) against the pencil X1*A(x0,x1) - X0*B(x0,x1), where
// deg A == deg B. Returns the binary form in (X0,X1) of degree deg F whose
// projective roots are {(A(beta) : B(beta)) : beta a root of F}, counted with
// multiplicity, normalized to the primitive representative. Throws
// DomainError when the pencil is degenerate on F (the result would be the
// zero form).
IntBinaryForm resultant_with_parameters(const IntBinaryForm& F,
                                        const IntBinaryForm& A,
                                        const IntBinaryForm& B);

namespace detail {

// Fraction-free (Bareiss) determinant of the padded Sylvester matrix.
// f, g ascending with formal degrees m, n (actual degrees may be lower).
Int resultant_bareiss(const std::vector<Int>& f, int m, const std::vector<Int>& g, int n);

// Euclidean remainder-sequence resultant with exact bookkeeping of leading
// coefficient powers and per-step content extraction. Same contract.
Int resultant_prs(const std::vector<Int>& f, int m, const std::vector<Int>& g, int n);

} // namespace detail

} // namespace dynpair
