#pragma once

#include <dynpair/bigpoly.hpp>

#include <string>
#include <utility>
#include <vector>

namespace dynpair {

// Integer Mobius transformation x -> (a x + b) / (c x + d), det != 0.
struct MobiusQ {
    Int a, b, c, d;

    MobiusQ(Int a_, Int b_, Int c_, Int d_);

    static MobiusQ identity() { return MobiusQ(Int(1), Int(0), Int(0), Int(1)); }
    // Integer inverse up to scalar (the adjugate), valid projectively.
    MobiusQ adjugate() const { return MobiusQ(d, -b, -c, a); }
    Int det() const { return a * d - b * c; }
};

// A rational self-map of the projective line of degree >= 2, stored as the
// jointly primitive integer lift (F0, F1) with the leading nonzero
// coefficient of F0 positive.  Immutable after construction.
class RationalMap {
  public:
    static RationalMap from_forms(IntBinaryForm f0, IntBinaryForm f1);

    int degree() const { return deg_; }
    const IntBinaryForm& lift0() const { return f0_; }
    const IntBinaryForm& lift1() const { return f1_; }
    const Int& resultant() const { return res_; }

    // Image of (x0 : x1) as a coprime, sign-normalized integer pair.
    std::pair<Int, Int> apply(const Int& x0, const Int& x1) const;

    // True when the lift is (+-x0^d, +-x1^d) or its swap, i.e. x -> u x^(+-d)
    // with |u| = 1; for these the canonical height equals the standard height
    // exactly.
    bool is_power_map() const;

    bool operator==(const RationalMap& o) const {
        return f0_ == o.f0_ && f1_ == o.f1_;
    }

    std::string str() const;

  private:
    RationalMap(int deg, IntBinaryForm f0, IntBinaryForm f1, Int res)
        : deg_(deg), f0_(std::move(f0)), f1_(std::move(f1)), res_(std::move(res)) {}

    int deg_;
    IntBinaryForm f0_, f1_;
    Int res_;
};

struct IterateLift {
    IntBinaryForm f0, f1;
    Int content; // product of the joint contents removed while composing
};

// Maximum form degree tolerated by iteration and downstream form builders.
// Overridable through the DYNPAIR_DEGREE_CAP environment variable.
int degree_cap();

// Builds the map x -> num(x) / den(x); homogenizes to the common degree,
// strips joint content, fixes the sign.  Rejects degree < 2 and degenerate
// (zero-resultant) pairs.
RationalMap make_map(const IntPolynomial& num, const IntPolynomial& den);

// Same, from ascending rational coefficient lists (denominators cleared).
RationalMap make_map(const std::vector<Rat>& num, const std::vector<Rat>& den);

// Jointly primitive lift of the n-th iterate, n >= 1.
IterateLift iterate_lift(const RationalMap& map, int n);

// Composition phi o psi as a map (degree product).
RationalMap compose(const RationalMap& phi, const RationalMap& psi);

// The conjugate gamma^(-1) o phi o gamma; same degree.
RationalMap conjugate(const RationalMap& map, const MobiusQ& gamma);

// Named families.
RationalMap squaring();               // x -> x^2
RationalMap coc(const Rat& alpha);    // x -> alpha - (alpha - x)^2
RationalMap quad(const Rat& c);       // x -> x^2 + c
RationalMap lattes(long a, long b);   // x -> (x^2+ab)^2 / (4x(x-a)(x+b)), a,b >= 1

struct BadReduction {
    std::vector<Int> primes; // each divides the lift resultant
    bool complete;           // false when a composite cofactor resisted factoring
    Int unfactored;          // 1 when complete, the leftover cofactor otherwise
};

// Primes dividing |Res| of the primitive lift; everywhere else the map has
// good reduction.
BadReduction bad_reduction_primes(const RationalMap& map);

} // namespace dynpair
