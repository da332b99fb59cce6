#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"
#include "interval.hpp"
#include "triplet.hpp"

namespace gcollatz {

inline void require_coprime(const Triplet& t) {
  if (gcd(t.d, t.alpha) != 1)
    throw error(errc::coprimality_violated, t.display() + ": gcd(d, alpha) = " + Integer(gcd(t.d, t.alpha)).get_str());
}

inline void require_bound_preconditions(const Triplet& t) {
  if (gcd(t.d, t.alpha) != 1 || t.beta <= 0)
    throw error(errc::bound_precondition, t.display() + ": bounds need gcd(d, alpha) = 1 and beta > 0");
}

/// ln(alpha)/ln(d) enclosed at working precision `prec`.
inline Interval xi_interval(const Triplet& t, mpfr_prec_t prec) {
  return Interval::of(t.alpha, prec).log() / Interval::of(t.d, prec).log();
}

/// xi enclosed in an interval no wider than 2^-bits.
inline Interval xi_value(const Triplet& t, unsigned bits) {
  require_coprime(t);
  PrecisionPolicy policy{std::max<mpfr_prec_t>(64, bits + 16), std::max<mpfr_prec_t>(16384, 4 * bits)};
  return escalate(policy, "xi enclosure", [&](mpfr_prec_t p) -> std::optional<Interval> {
    Interval x = xi_interval(t, p);
    if (x.width_exponent() > -static_cast<long>(bits)) return std::nullopt;
    return x;
  });
}

struct Convergent {
  Integer a, p, q;
};

struct ConvergentSequence {
  std::vector<Convergent> terms;
  mpfr_prec_t precision_bits_used = 0;
};

namespace detail {

/// Partial quotients shared by every real in [lo, hi]. Each step keeps the tails of both
/// endpoints strictly inside (a, a+1), so the floor of any number between them is a as well.
inline std::vector<Integer> common_quotients(mpq_class lo, mpq_class hi, std::size_t limit) {
  std::vector<Integer> out;
  while (out.size() < limit) {
    Integer a1, a2;
    mpz_fdiv_q(a1.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(a2.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    if (a1 != a2) break;
    mpq_class r1 = lo - a1, r2 = hi - a2;
    if (r1 == 0 || r2 == 0) break;
    out.push_back(a1);
    lo = 1 / r1;
    hi = 1 / r2;
  }
  return out;
}

inline std::vector<Convergent> build_terms(const std::vector<Integer>& quotients) {
  std::vector<Convergent> v;
  Integer p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  for (const auto& a : quotients) {
    Integer p = a * p1 + p2, q = a * q1 + q2;
    v.push_back({a, p, q});
    p2 = p1;
    p1 = p;
    q2 = q1;
    q1 = q;
  }
  return v;
}

}  // namespace detail

inline ConvergentSequence convergents(const Triplet& t, std::size_t min_terms, const PrecisionPolicy& policy = {}) {
  require_coprime(t);
  ConvergentSequence seq;
  seq.terms = escalate(policy, "continued fraction term", [&](mpfr_prec_t p) -> std::optional<std::vector<Convergent>> {
    Interval x = xi_interval(t, p);
    auto qs = detail::common_quotients(x.lo_rational(), x.hi_rational(), min_terms);
    if (qs.size() < min_terms) return std::nullopt;
    seq.precision_bits_used = p;
    return detail::build_terms(qs);
  });
  return seq;
}

/// Convergents fetched on demand; refills at doubled length when an index runs past the end.
class ConvergentStream {
 public:
  ConvergentStream(const Triplet& t, PrecisionPolicy policy) : t_(t), policy_(policy) {}

  const Convergent& at(std::size_t n) {
    if (n >= seq_.terms.size()) {
      PrecisionPolicy p = policy_;
      p.start_bits = std::max(p.start_bits, seq_.precision_bits_used);
      seq_ = convergents(t_, std::max<std::size_t>(2 * (n + 1), 24), p);
    }
    return seq_.terms[n];
  }
  mpfr_prec_t precision_used() const { return seq_.precision_bits_used; }

 private:
  Triplet t_;
  PrecisionPolicy policy_;
  ConvergentSequence seq_;
};

enum class BoundMethod { hurwitz, algorithm1, algorithm2, mu_bound };

inline const char* method_name(BoundMethod m) {
  switch (m) {
    case BoundMethod::hurwitz: return "Hurwitz";
    case BoundMethod::algorithm1: return "Algorithm1";
    case BoundMethod::algorithm2: return "Algorithm2";
    case BoundMethod::mu_bound: return "MuBound";
  }
  return "?";
}

struct BoundRow {
  std::size_t n = 0;
  Integer p, q;
  Integer value;      // R_n (Algorithm 1) or the per-row bound (MuBound)
  int sign = 0;       // certified sign of D_n (Algorithm 2)
  std::string approx; // D_n in scientific notation (Algorithm 2)
};

struct BoundReport {
  BoundMethod method = BoundMethod::algorithm1;
  Triplet triplet;
  Integer M;
  Integer bound;
  std::optional<Integer> floor_value;  // Hurwitz: floor(mu0 * sqrt(M0))
  std::optional<std::size_t> peak_index;  // Algorithm 1: n0; Algorithm 2: 2*n0+1
  std::optional<std::size_t> n0;          // Algorithm 2 only
  std::string constant_name;              // gamma0 or mu0
  std::string constant_lo, constant_hi;
  std::string mu;                         // MuBound exponent as "a/b"
  bool advisory = false;
  std::vector<BoundRow> table;
};

namespace detail {

inline Interval gamma0(const Triplet& t, mpfr_prec_t p) {
  return Interval::of(t.alpha, p) * Interval::of(t.d, p).log() / Interval::of(Integer(t.beta * (t.d - 1)), p);
}

inline void echo_constant(BoundReport& r, const char* name, const Interval& v) {
  r.constant_name = name;
  r.constant_lo = v.lo_str(30);
  r.constant_hi = v.hi_str(30);
}

}  // namespace detail

/// L >= mu0*sqrt(M0) with mu0 = sqrt(alpha ln d / (beta (d-1) sqrt 5)).
inline BoundReport hurwitz_bound(const Triplet& t, const Integer& M0, const PrecisionPolicy& policy = {}) {
  require_bound_preconditions(t);
  if (M0 < 1) throw error(errc::invalid_parameters, "M0 must be >= 1");
  BoundReport r;
  r.method = BoundMethod::hurwitz;
  r.triplet = t;
  r.M = M0;
  Integer root, rem;
  mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), M0.get_mpz_t());
  auto mu0_at = [&](mpfr_prec_t p) {
    return (detail::gamma0(t, p) / Interval::of(5L, p).sqrt()).sqrt();
  };
  auto fc = escalate(policy, "Hurwitz bound", [&](mpfr_prec_t p) -> std::optional<std::pair<Integer, Integer>> {
    Interval s = rem == 0 ? Interval::of(root, p) : Interval::of(M0, p).sqrt();
    Interval v = mu0_at(p) * s;
    auto f = v.floor();
    auto c = v.ceil();
    if (!f || !c) return std::nullopt;
    return std::make_pair(*f, *c);
  });
  r.floor_value = fc.first;
  r.bound = std::max(Integer(1), fc.second);
  detail::echo_constant(r, "mu0", mu0_at(policy.start_bits));
  return r;
}

/// Running maximum of R_n(M) = min(q_n, floor(gamma0*M/(q_{n-1}+q_n)) + 1).
/// For Kbar < q_n, best approximation gives |Kbar*xi - L| > 1/(q_{n-1}+q_n), hence Kbar > gamma0*M/(q_{n-1}+q_n).
inline BoundReport algorithm1_rinf(const Triplet& t, const Integer& M, const PrecisionPolicy& policy = {}) {
  require_bound_preconditions(t);
  if (M < 1) throw error(errc::invalid_parameters, "M must be >= 1");
  BoundReport r;
  r.method = BoundMethod::algorithm1;
  r.triplet = t;
  r.M = M;
  detail::echo_constant(r, "gamma0", detail::gamma0(t, policy.start_bits));
  ConvergentStream cf(t, policy);
  Integer q_prev = 0;
  bool past_peak = false;
  for (std::size_t n = 0;; ++n) {
    const Convergent c = cf.at(n);
    Integer denom = q_prev + c.q;
    Integer fl = escalate(policy, "Algorithm 1 quotient floor", [&](mpfr_prec_t p) -> std::optional<Integer> {
      return (detail::gamma0(t, p) * Interval::of(M, p) / Interval::of(denom, p)).floor();
    });
    Integer R = std::min(c.q, Integer(fl + 1));
    r.table.push_back({n, c.p, c.q, R, 0, {}});
    if (R > r.bound) {
      r.bound = R;
      r.peak_index = n;
    }
    // Once the quotient branch is active the sequence only decreases; run on until it reaches 1.
    if (fl + 1 <= c.q) past_peak = true;
    if (past_peak && R == 1) break;
    q_prev = c.q;
  }
  return r;
}

namespace detail {

/// Sign of D_n(M) * q_n * ln d = q ln(alpha M + beta(d-1)) - q ln M - p ln d, plus D_n itself.
inline std::pair<int, Interval> farey_d(const Triplet& t, const Integer& M, const Convergent& c,
                                        const PrecisionPolicy& policy) {
  Integer top = t.alpha * M + t.beta * (t.d - 1);
  int exact_sign = 0;
  bool have_exact = c.q <= 10000;
  if (have_exact) {
    unsigned long qq = c.q.get_ui();
    Integer lhs = pow_ui(top, qq);
    Integer rhs = pow_ui(t.d, c.p.get_ui()) * pow_ui(M, qq);
    exact_sign = lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
  }
  return escalate(policy, "sign of D_n", [&](mpfr_prec_t p) -> std::optional<std::pair<int, Interval>> {
    Interval lnd = Interval::of(t.d, p).log();
    Interval v = Interval::of(c.q, p) * (Interval::of(top, p).log() - Interval::of(M, p).log()) -
                 Interval::of(c.p, p) * lnd;
    Interval D = v / (Interval::of(c.q, p) * lnd);
    int s = v.sign();
    if (have_exact && exact_sign == 0) return std::make_pair(0, D);
    if (s == 0) return std::nullopt;
    if (have_exact && s != exact_sign) throw error(errc::internal_defect, "interval and exact signs of D_n disagree");
    // Three significant digits for the table.
    if (D.width_exponent() > static_cast<long>(mpfr_get_exp(D.lo())) - 24) return std::nullopt;
    return std::make_pair(s, D);
  });
}

}  // namespace detail

/// Stops at the first odd n with D_n(M) >= 0 and returns p_n.
inline BoundReport algorithm2_farey(const Triplet& t, const Integer& M, const PrecisionPolicy& policy = {}) {
  require_bound_preconditions(t);
  if (M < 1) throw error(errc::invalid_parameters, "M must be >= 1");
  BoundReport r;
  r.method = BoundMethod::algorithm2;
  r.triplet = t;
  r.M = M;
  detail::echo_constant(r, "gamma0", detail::gamma0(t, policy.start_bits));
  ConvergentStream cf(t, policy);
  for (std::size_t n = 0;; ++n) {
    const Convergent c = cf.at(n);
    auto [s, D] = detail::farey_d(t, M, c, policy);
    r.table.push_back({n, c.p, c.q, 0, s, s == 0 ? std::string("0") : sci(D)});
    if (n % 2 == 0) {
      if (s < 0) throw error(errc::internal_defect, "even-index D_n came out negative");
      continue;
    }
    if (n == 1 && s >= 0)
      throw error(errc::m_too_small, "D_1(M) >= 0 for M = " + M.get_str() + "; the farey bound needs D_1(M) < 0");
    if (s >= 0) {
      r.bound = c.p;
      r.peak_index = n;
      r.n0 = (n - 1) / 2;
      return r;
    }
  }
}

/// max over n of min(q_n, gamma0*M/q_n^mu), over the terms with q_n <= gamma0*M (or n in [n_lo, n_hi]).
/// Advisory: the threshold beyond which the inequality holds is not effectively known.
inline BoundReport mu_bound(const Triplet& t, const Integer& M, const mpq_class& mu,
                            std::optional<std::pair<std::size_t, std::size_t>> range = std::nullopt,
                            const PrecisionPolicy& policy = {}) {
  require_bound_preconditions(t);
  if (M < 1) throw error(errc::invalid_parameters, "M must be >= 1");
  if (mu < 1) throw error(errc::invalid_parameters, "mu must be >= 1");
  BoundReport r;
  r.method = BoundMethod::mu_bound;
  r.triplet = t;
  r.M = M;
  r.advisory = true;
  r.mu = mpq_class(mu).get_str();
  detail::echo_constant(r, "gamma0", detail::gamma0(t, policy.start_bits));
  ConvergentStream cf(t, policy);
  std::size_t first = range ? range->first : 0;
  for (std::size_t n = first;; ++n) {
    if (range && n > range->second) break;
    const Convergent c = cf.at(n);
    if (!range) {
      bool beyond = escalate(policy, "q_n against gamma0*M", [&](mpfr_prec_t p) -> std::optional<bool> {
        int s = (Interval::of(c.q, p) - detail::gamma0(t, p) * Interval::of(M, p)).sign();
        if (s == 0) return std::nullopt;
        return s > 0;
      });
      if (beyond) break;
    }
    Integer ceil_q = escalate(policy, "mu-bound quotient", [&](mpfr_prec_t p) -> std::optional<Integer> {
      Interval qmu = (Interval::of(mu, p) * Interval::of(c.q, p).log()).exp();
      return (detail::gamma0(t, p) * Interval::of(M, p) / qmu).ceil();
    });
    Integer v = std::max(Integer(1), std::min(c.q, ceil_q));
    r.table.push_back({n, c.p, c.q, v, 0, {}});
    if (v > r.bound) {
      r.bound = v;
      r.peak_index = n;
    }
  }
  if (r.bound < 1) r.bound = 1;
  return r;
}

}  // namespace gcollatz
