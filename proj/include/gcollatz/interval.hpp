#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>

#include "errors.hpp"
#include "integer.hpp"

namespace gcollatz {

struct PrecisionPolicy {
  mpfr_prec_t start_bits = 128;
  mpfr_prec_t max_bits = 16384;
};

/// Closed interval [lo, hi] of MPFR floats. Every operation rounds lo down and hi up,
/// so the true value stays enclosed no matter how many steps are chained.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 128) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  Interval(const Interval& o) : Interval(o.prec()) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  Interval(Interval&& o) noexcept : Interval(mpfr_get_prec(o.lo_)) {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }
  Interval& operator=(Interval o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
  }
  ~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static Interval of(const Integer& v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
    return r;
  }
  static Interval of(long v, mpfr_prec_t prec) { return of(Integer(v), prec); }
  static Interval of(const mpq_class& v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }
  const __mpfr_struct* lo() const { return lo_; }
  const __mpfr_struct* hi() const { return hi_; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }
  Interval operator-() const {
    Interval r(prec());
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    return corners(a, b, mpfr_mul);
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.sign() == 0) throw error(errc::internal_defect, "interval division by a range containing zero");
    return corners(a, b, mpfr_div);
  }

  Interval log() const {
    if (mpfr_sgn(lo_) <= 0) throw error(errc::internal_defect, "log of a non-positive interval");
    return monotone(mpfr_log);
  }
  Interval exp() const { return monotone(mpfr_exp); }
  Interval sqrt() const {
    if (mpfr_sgn(lo_) < 0) throw error(errc::internal_defect, "sqrt of a negative interval");
    return monotone(mpfr_sqrt);
  }
  /// ln(1 + x); tighter than log() for tiny x.
  Interval log1p() const { return monotone(mpfr_log1p); }

  /// +1 or -1 when the sign is certain, 0 when the interval touches zero.
  int sign() const {
    if (mpfr_sgn(lo_) > 0) return 1;
    if (mpfr_sgn(hi_) < 0) return -1;
    return 0;
  }

  std::optional<Integer> floor() const { return rounded(mpfr_get_z, MPFR_RNDD); }
  std::optional<Integer> ceil() const { return rounded(mpfr_get_z, MPFR_RNDU); }

  double approx() const {
    mpfr_t m;
    mpfr_init2(m, prec() + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    double d = mpfr_get_d(m, MPFR_RNDN);
    mpfr_clear(m);
    return d;
  }

  /// log2 of the width, or a very negative number for a point interval.
  long width_exponent() const {
    mpfr_t w;
    mpfr_init2(w, prec());
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    long e = mpfr_zero_p(w) ? -(1L << 40) : static_cast<long>(mpfr_get_exp(w));
    mpfr_clear(w);
    return e;
  }

  mpq_class lo_rational() const { return exact(lo_); }
  mpq_class hi_rational() const { return exact(hi_); }

  static std::string format(const __mpfr_struct* v, int digits) {
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "%.*Re", digits - 1, v);
    return buf;
  }
  std::string lo_str(int digits = 20) const { return format(lo_, digits); }
  std::string hi_str(int digits = 20) const { return format(hi_, digits); }

 private:
  mpfr_t lo_, hi_;

  using binop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  using unop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

  static Interval corners(const Interval& a, const Interval& b, binop op) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    bool first = true;
    for (auto x : {a.lo_, a.hi_}) {
      for (auto y : {b.lo_, b.hi_}) {
        op(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        op(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    }
    mpfr_clear(t);
    return r;
  }

  Interval monotone(unop op) const {
    Interval r(prec());
    op(r.lo_, lo_, MPFR_RNDD);
    op(r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  std::optional<Integer> rounded(int (*get)(mpz_ptr, mpfr_srcptr, mpfr_rnd_t), mpfr_rnd_t mode) const {
    Integer a, b;
    get(a.get_mpz_t(), lo_, mode);
    get(b.get_mpz_t(), hi_, mode);
    if (a != b) return std::nullopt;
    return a;
  }

  static mpq_class exact(const __mpfr_struct* v) {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), v);
    return q;
  }
};

/// Runs `attempt(prec)` at doubling precision until it yields a value.
/// `attempt` returns std::optional<T>; nullopt means "not decidable at this precision".
template <class F>
auto escalate(const PrecisionPolicy& policy, const char* what, F&& attempt) {
  for (mpfr_prec_t p = policy.start_bits;; p *= 2) {
    if (p > policy.max_bits) p = policy.max_bits;
    if (auto r = attempt(p)) return *r;
    if (p >= policy.max_bits)
      throw error(errc::precision_exhausted,
                  std::string(what) + " undecided at " + std::to_string(policy.max_bits) + " bits");
  }
}

/// Midpoint in scientific notation, e.g. "-1.17e-2". Callers only print this once the sign is certified.
inline std::string sci(const Interval& v, int digits = 3) {
  mpfr_t m;
  mpfr_init2(m, v.prec() + 1);
  mpfr_add(m, v.lo(), v.hi(), MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  std::string s = Interval::format(m, digits);
  mpfr_clear(m);
  auto e = s.find('e');
  return s.substr(0, e) + "e" + std::to_string(std::stol(s.substr(e + 1)));
}

}  // namespace gcollatz
