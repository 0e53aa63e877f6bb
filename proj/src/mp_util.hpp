#pragma once

#include <dynpair/bigpoly.hpp>

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <vector>

namespace dynpair::detail {

// RAII array of mpfr values sharing one precision.
class MpArr {
  public:
    MpArr(size_t n, mpfr_prec_t p) : s_(n) {
        for (auto& x : s_) mpfr_init2(&x, p);
    }
    ~MpArr() {
        for (auto& x : s_) mpfr_clear(&x);
    }
    MpArr(const MpArr&) = delete;
    MpArr& operator=(const MpArr&) = delete;
    mpfr_ptr operator[](size_t i) { return &s_[i]; }

  private:
    std::vector<__mpfr_struct> s_;
};

inline double lg_abs(const Int& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    long e = 0;
    double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log2(std::fabs(m)) + static_cast<double>(e);
}

// natural log of a positive integer, accumulating a rounding allowance
inline double ln_int(const Int& v, double& err_io) {
    mpfr_t t;
    mpfr_init2(t, 64);
    mpfr_set_z(t, v.get_mpz_t(), MPFR_RNDN);
    mpfr_log(t, t, MPFR_RNDN);
    double r = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    err_io += 1e-14 * (1.0 + std::fabs(r));
    return r;
}

inline double logaddexp(double a, double b) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (a == -inf) return b;
    if (b == -inf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

} // namespace dynpair::detail
