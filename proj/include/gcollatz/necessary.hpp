#pragma once

#include <string>
#include <utility>
#include <vector>

#include "diophantine.hpp"
#include "dynamics.hpp"
#include "interval.hpp"

namespace gcollatz {

namespace detail {
inline mpq_class ratio(const Integer& num, const Integer& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}
}  // namespace detail

/// Chains checked for a cycle with length L, Kbar elements prime to d, minimum m and maximum M:
///   through the maximum: 0 < A < B <= C <= E
///   through the minimum: 0 < B <= F <= G
/// with A = Kbar log_d(1 + beta/(alpha M)), B = L - Kbar xi, C = sum log_d(1 + beta(d-1)/(alpha n)),
/// E = beta(d-1)/(alpha ln d) sum 1/n, F = Kbar log_d(1 + beta(d-1)/(alpha m)), G = Kbar beta(d-1)/(alpha m ln d);
/// sums run over the elements n not divisible by d.
struct NecessaryConditionReport {
  struct Term {
    std::string name, lo, hi;
  };
  struct Link {
    std::string relation;
    bool holds;
  };
  bool max_chain_holds = false;
  bool min_chain_holds = false;
  std::vector<Term> terms;
  std::vector<Link> max_chain, min_chain;
};

inline NecessaryConditionReport check_cycle_necessary_conditions(const Triplet& t, const Cycle& c,
                                                                 const PrecisionPolicy& policy = {}) {
  require_bound_preconditions(t);
  const Integer& d = t.d;
  const Integer& a = t.alpha;
  const Integer& b = t.beta;
  unsigned long L = c.length(), K = c.kbar();
  std::vector<Integer> coprime;
  for (const auto& x : c.elements())
    if (!mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t())) coprime.push_back(x);
  const Integer& lo = c.omega();
  const Integer& hi = c.max_elem();
  Integer bd = b * (d - 1);

  // Comparisons that reduce to integer inequalities are decided exactly.
  Integer dL = pow_ui(d, L);
  bool zero_lt_B = dL > pow_ui(a, K);
  bool A_lt_B = pow_ui(Integer(a * hi + b), K) < dL * pow_ui(hi, K);
  Integer prod_n = 1, prod_shift = 1;
  for (const auto& n : coprime) {
    prod_n *= n;
    prod_shift *= a * n + bd;
  }
  bool B_le_C = dL * prod_n <= prod_shift;
  bool B_le_F = dL * pow_ui(lo, K) <= pow_ui(Integer(a * lo + bd), K);

  auto terms_at = [&](mpfr_prec_t p) {
    Interval lnd = Interval::of(d, p).log();
    Interval kb = Interval::of(Integer(K), p);
    Interval A = kb * Interval::of(detail::ratio(b, a * hi), p).log1p() / lnd;
    Interval B = Interval::of(Integer(L), p) - kb * xi_interval(t, p);
    Interval C(p), S(p);
    for (const auto& n : coprime) {
      C = C + Interval::of(detail::ratio(bd, a * n), p).log1p();
      S = S + Interval::of(detail::ratio(1, n), p);
    }
    C = C / lnd;
    Interval coef = Interval::of(bd, p) / (Interval::of(a, p) * lnd);
    Interval E = coef * S;
    Interval F = kb * Interval::of(detail::ratio(bd, a * lo), p).log1p() / lnd;
    Interval G = kb * coef / Interval::of(lo, p);
    return std::vector<std::pair<std::string, Interval>>{{"A", A}, {"B", B}, {"C", C}, {"E", E}, {"F", F}, {"G", G}};
  };
  // A > 0, C < E and F < G are strict for beta > 0 since log(1+x) < x; raise precision until the intervals separate.
  auto strict = escalate(policy, "necessary-condition chain", [&](mpfr_prec_t p) -> std::optional<std::vector<int>> {
    auto v = terms_at(p);
    int a_pos = v[0].second.sign();
    int c_lt_e = (v[3].second - v[2].second).sign();
    int f_lt_g = (v[5].second - v[4].second).sign();
    if (a_pos == 0 || c_lt_e == 0 || f_lt_g == 0) return std::nullopt;
    return std::vector<int>{a_pos, c_lt_e, f_lt_g};
  });

  NecessaryConditionReport r;
  for (auto& [name, v] : terms_at(policy.start_bits)) r.terms.push_back({name, v.lo_str(25), v.hi_str(25)});
  r.max_chain = {{"0 < A", strict[0] > 0}, {"A < B", A_lt_B}, {"B <= C", B_le_C}, {"C <= E", strict[1] > 0}};
  r.min_chain = {{"0 < B", zero_lt_B}, {"B <= F", B_le_F}, {"F <= G", strict[2] > 0}};
  r.max_chain_holds = true;
  for (auto& l : r.max_chain) r.max_chain_holds = r.max_chain_holds && l.holds;
  r.min_chain_holds = true;
  for (auto& l : r.min_chain) r.min_chain_holds = r.min_chain_holds && l.holds;
  return r;
}

}  // namespace gcollatz
