#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dynamics.hpp"
#include "errors.hpp"
#include "integer.hpp"
#include "triplet.hpp"

namespace gcollatz {

struct FamilyParams31 {
  unsigned long d = 2, nu0 = 1, nu1 = 1, delta = 1;
  int kappa0 = 1, kappa1 = 1;
};

struct FamilyParams32 {
  unsigned long d = 2, mu0 = 1, nu1 = 1;
};

struct PredictedCycleSet {
  Triplet triplet;
  std::vector<Cycle> cycles;  // sorted by (L, omega)
  std::string family;
  std::vector<std::pair<std::string, std::string>> params;
  std::size_t lower_bound_on_order = 0;
  std::size_t generator_count = 0;  // before deduplication; equals cycles.size() for most families
};

namespace detail {

inline std::string sign_str(int s) { return s > 0 ? "+" : "-"; }

/// Walks exactly `length` steps from `start` and insists the orbit closes there.
inline Cycle verified_cycle(const Triplet& t, const Integer& start, std::size_t length) {
  TripletMap m(t);
  std::vector<Integer> elems;
  elems.reserve(length);
  Integer x = start;
  for (std::size_t i = 0; i < length; ++i) {
    elems.push_back(x);
    m.step(x);
  }
  try {
    if (x != start) throw error(errc::not_a_cycle, "orbit of " + start.get_str() + " does not close after " +
                                                       std::to_string(length) + " steps");
    return canonicalize(t, std::move(elems));
  } catch (const error& e) {
    throw error(errc::internal_defect, "predicted cycle failed verification for " + t.display() + ": " + e.what());
  }
}

inline Cycle verified_cycle(const Triplet& t, std::vector<Integer> elems) {
  try {
    return canonicalize(t, std::move(elems));
  } catch (const error& e) {
    throw error(errc::internal_defect, "predicted cycle failed verification for " + t.display() + ": " + e.what());
  }
}

/// (x, x*d^(n-1), x*d^(n-2), ..., x*d): the shape of the d^nu geometric cycles.
inline std::vector<Integer> geometric_cycle(const Integer& x, unsigned long d, unsigned long n) {
  std::vector<Integer> v{x};
  for (unsigned long j = n - 1; j >= 1; --j) v.push_back(x * pow_ui(d, j));
  return v;
}

inline void finish(PredictedCycleSet& s, std::map<Integer, Cycle>& by_omega) {
  s.cycles.clear();
  for (auto& [_, c] : by_omega) s.cycles.push_back(std::move(c));
  std::sort(s.cycles.begin(), s.cycles.end());
  s.lower_bound_on_order = s.cycles.size();
  if (s.generator_count == 0) s.generator_count = s.cycles.size();
}

inline Triplet checked_triplet(const Integer& d, const Integer& a, const Integer& b, int k) {
  Triplet t(d, a, b, k);
  auto w = check_wellformed(t);
  if (!w.ok()) throw error(errc::invalid_parameters, w.explain(t));
  return t;
}

}  // namespace detail

inline PredictedCycleSet build_thm31(const FamilyParams31& p) {
  if (p.d < 2 || p.nu0 < 1 || p.nu1 < 1 || p.delta < 1 || p.delta > p.d - 1 ||
      (p.kappa0 != 1 && p.kappa0 != -1) || (p.kappa1 != 1 && p.kappa1 != -1))
    throw error(errc::invalid_parameters, "thm31 needs d>=2, nu0,nu1>=1, 1<=delta<=d-1, signs +-1");
  Integer d(p.d);
  Integer alpha = pow_ui(p.d, p.nu1) - p.kappa1 * Integer(p.delta);
  Integer beta = p.kappa0 * (pow_ui(p.d, p.nu0) - alpha);
  if (alpha <= d) throw error(errc::invalid_parameters, "alpha = " + alpha.get_str() + " must exceed d");
  if (beta == 0 || mpz_divisible_p(beta.get_mpz_t(), d.get_mpz_t()))
    throw error(errc::invalid_parameters, "beta = " + beta.get_str() + " must be nonzero and prime to d");
  Triplet t = detail::checked_triplet(d, alpha, beta, p.kappa0);

  bool case1 = p.kappa0 > 0;
  bool k1beta = p.kappa1 * sgn(beta) > 0;
  bool case21 = k1beta && p.delta == 1;
  bool case22 = k1beta && p.delta > 1 && p.nu0 >= 2 && p.nu1 >= 2 && p.nu0 != p.nu1;
  if (!case1 && !case21 && !case22)
    throw error(errc::no_case_applies, t.display() + ": neither kappa0 = +1 nor kappa1*beta > 0 with usable delta");

  PredictedCycleSet s{t, {}, "thm31", {}, 0, 0};
  s.params = {{"d", std::to_string(p.d)},           {"nu0", std::to_string(p.nu0)},
              {"nu1", std::to_string(p.nu1)},       {"delta", std::to_string(p.delta)},
              {"k0", detail::sign_str(p.kappa0)}, {"k1", detail::sign_str(p.kappa1)}};
  std::map<Integer, Cycle> out;
  if (case1)
    for (unsigned long r = 1; r < p.d; ++r) {
      auto c = detail::verified_cycle(t, detail::geometric_cycle(Integer(r), p.d, p.nu0));
      out.emplace(c.omega(), c);
    }
  Integer abs_beta = abs(beta);
  if (case21)
    for (unsigned long r = 1; r < p.d; ++r) {
      auto c = detail::verified_cycle(t, detail::geometric_cycle(r * abs_beta, p.d, p.nu1));
      out.emplace(c.omega(), c);
    }
  if (case22) {
    Integer gap = abs(pow_ui(p.d, p.nu0 - 1) - pow_ui(p.d, p.nu1 - 1));
    Integer q0 = gcd(gap, Integer(p.delta));
    Integer beta0 = abs_beta / q0;
    Integer delta0 = Integer(p.delta) / q0;
    unsigned long rmax = (p.d - 1) / delta0.get_ui();
    for (unsigned long r = 1; r <= rmax; ++r) {
      auto c = detail::verified_cycle(t, detail::geometric_cycle(r * beta0, p.d, p.nu1));
      out.emplace(c.omega(), c);
    }
  }
  detail::finish(s, out);
  return s;
}

inline PredictedCycleSet build_thm32(const FamilyParams32& p) {
  if (p.d < 2 || p.mu0 < 1 || p.nu1 < 1 || 2 * p.mu0 <= p.nu1)
    throw error(errc::invalid_parameters, "thm32 needs d>=2, mu0>=1, nu1>=1 and 2*mu0 > nu1");
  Integer d(p.d);
  Integer alpha = pow_ui(p.d, p.nu1) + 1;
  Integer beta = pow_ui(p.d, 2 * p.mu0 + p.nu1) - alpha * alpha;
  Triplet t = detail::checked_triplet(d, alpha, beta, 1);
  PredictedCycleSet s{t, {}, "thm32", {}, 0, 0};
  s.params = {{"d", std::to_string(p.d)}, {"nu1", std::to_string(p.nu1)}, {"mu0", std::to_string(p.mu0)}};
  std::size_t L = 2 * p.mu0 + p.nu1;
  std::map<Integer, Cycle> out;
  std::size_t generators = 0;
  for (unsigned long k = 1; k <= p.mu0; ++k)
    for (unsigned long r1 = 1; r1 < p.d; ++r1)
      for (unsigned long r2 = 1; r1 * r2 < p.d; ++r2)
        for (unsigned long r3 = 1; r1 * r3 < p.d; ++r3) {
          Integer w = r1 * (r2 * pow_ui(p.d, k) + r3 * alpha);
          ++generators;
          if (out.count(w)) continue;
          auto c = detail::verified_cycle(t, w, L);
          out.emplace(c.omega(), c);
        }
  // Omega(beta) only makes sense on the positive integers.
  if (p.nu1 == 1 && beta > 0) {
    auto c = detail::verified_cycle(t, beta, p.d);
    if (!out.count(c.omega())) ++generators;
    out.emplace(c.omega(), c);
  }
  s.generator_count = generators;
  detail::finish(s, out);
  return s;
}

inline PredictedCycleSet scale_cycles(const Triplet& base, const std::vector<Cycle>& cycles, const Integer& a0) {
  if (a0 < 1) throw error(errc::invalid_parameters, "a0 must be a positive integer");
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a0.get_mpz_t(), base.d.get_mpz_t());
  if (r != 1) throw error(errc::invalid_parameters, "a0 = " + a0.get_str() + " is not 1 mod " + base.d.get_str());
  Triplet t = detail::checked_triplet(base.d, base.alpha, a0 * base.beta, base.kappa);
  PredictedCycleSet s{t, {}, "scale", {}, 0, 0};
  s.params = {{"base", base.str()}, {"a0", a0.get_str()}};
  std::map<Integer, Cycle> out;
  for (const auto& c : cycles) {
    std::vector<Integer> e;
    for (const auto& x : c.elements()) e.push_back(a0 * x);
    auto sc = detail::verified_cycle(t, std::move(e));
    out.emplace(sc.omega(), sc);
  }
  detail::finish(s, out);
  return s;
}

inline PredictedCycleSet build_dplus1(unsigned long d, int kappa) {
  if (d < 2 || (kappa != 1 && kappa != -1)) throw error(errc::invalid_parameters, "dplus1 needs d>=2, kappa +-1");
  Triplet t = detail::checked_triplet(Integer(d), Integer(d + 1), Integer(kappa > 0 ? -1 : 1), kappa);
  PredictedCycleSet s{t, {}, "dplus1", {{"d", std::to_string(d)}, {"k", detail::sign_str(kappa)}}, 0, 0};
  std::map<Integer, Cycle> out;
  if (kappa > 0) {
    for (unsigned long r = 1; r < d; ++r) out.emplace(Integer(r), detail::verified_cycle(t, {Integer(r)}));
  } else {
    std::vector<Integer> e;
    for (unsigned long r = 1; r <= d; ++r) e.emplace_back(r);
    out.emplace(Integer(1), detail::verified_cycle(t, std::move(e)));
  }
  detail::finish(s, out);
  return s;
}

inline PredictedCycleSet build_mersenne(unsigned long p) {
  if (p < 2) throw error(errc::invalid_parameters, "mersenne needs p >= 2");
  Triplet t = detail::checked_triplet(pow_ui(2, p - 1), pow_ui(2, p) - 1, Integer(1), 1);
  PredictedCycleSet s{t, {}, "mersenne", {{"p", std::to_string(p)}}, 0, 0};
  std::vector<Integer> e;
  for (unsigned long j = 0; j < p; ++j) e.push_back(pow_ui(2, j));
  std::map<Integer, Cycle> out;
  out.emplace(Integer(1), detail::verified_cycle(t, std::move(e)));
  detail::finish(s, out);
  return s;
}

struct ExceptionalCycle {
  unsigned p, q;
  unsigned long omega;
  std::size_t length;
};

/// Extra cycles of (2^p+2^q, 2^p+2^(q+1), 2^p)+ beyond the generic one. Omega 1264 appears for
/// both (4,0) and (6,2); the triplets differ, so the entries are unrelated. (5,2) is (36,40,32)+.
inline const std::vector<ExceptionalCycle>& power2_exceptions() {
  static const std::vector<ExceptionalCycle> table = {
      {1, 0, 14, 9},      {2, 1, 74, 7},    {2, 2, 67, 6},    {3, 0, 280, 21},        {4, 0, 1264, 49},
      {5, 2, 76200, 70},  {5, 2, 87176, 35}, {6, 2, 1264, 69}, {7, 0, 3027584, 630},
  };
  return table;
}

inline Triplet power2_triplet(unsigned p, unsigned q) {
  if (q > p) throw error(errc::invalid_parameters, "power2 needs 0 <= q <= p");
  Integer P = pow_ui(2, p);
  return detail::checked_triplet(P + pow_ui(2, q), P + pow_ui(2, q + 1), P, 1);
}

inline PredictedCycleSet build_power2_family(unsigned p, unsigned q) {
  Triplet t = power2_triplet(p, q);
  PredictedCycleSet s{t, {}, "power2", {{"p", std::to_string(p)}, {"q", std::to_string(q)}}, 0, 0};
  // 2^(p-q), 2^(p-q+1), ..., 2^p, then m*2^p for m = 2 .. 2^(p-q)+1.
  std::vector<Integer> e;
  for (unsigned j = p - q; j <= p; ++j) e.push_back(pow_ui(2, j));
  Integer top = pow_ui(2, p - q) + 1;
  for (Integer m = 2; m <= top; ++m) e.push_back(m * pow_ui(2, p));
  std::map<Integer, Cycle> out;
  auto c = detail::verified_cycle(t, std::move(e));
  out.emplace(c.omega(), c);
  for (const auto& x : power2_exceptions())
    if (x.p == p && x.q == q) {
      auto ex = detail::verified_cycle(t, Integer(x.omega), x.length);
      if (ex.omega() != x.omega) throw error(errc::internal_defect, "exceptional cycle minimum mismatch");
      out.emplace(ex.omega(), ex);
    }
  detail::finish(s, out);
  return s;
}

/// Parses "family:key=value,..." strings such as "thm31:d=3,nu0=3,nu1=2,delta=1,k0=+,k1=+",
/// "thm32:d=5,nu1=1,mu0=2", "dplus1:d=4,k=+", "mersenne:p=5", "power2:p=3,q=1" and
/// "scale:a0=121,base=thm32:d=5,nu1=1,mu0=2" (base last, as it contains commas).
inline PredictedCycleSet build_family(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw error(errc::invalid_parameters, "family spec needs 'name:key=value,...'");
  std::string name = spec.substr(0, colon), rest = spec.substr(colon + 1);
  std::map<std::string, std::string> kv;
  while (!rest.empty()) {
    auto eq = rest.find('=');
    if (eq == std::string::npos) throw error(errc::invalid_parameters, "bad family parameter list: " + rest);
    std::string key = rest.substr(0, eq);
    if (key == "base") {
      kv[key] = rest.substr(eq + 1);
      break;
    }
    auto comma = rest.find(',', eq);
    kv[key] = rest.substr(eq + 1, comma == std::string::npos ? std::string::npos : comma - eq - 1);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
  }
  auto num = [&](const std::string& k) -> unsigned long {
    auto it = kv.find(k);
    if (it == kv.end()) throw error(errc::invalid_parameters, name + " needs " + k);
    Integer v = parse_integer(it->second);
    if (v < 0 || !v.fits_ulong_p()) throw error(errc::invalid_parameters, k + " out of range");
    return v.get_ui();
  };
  auto sgn_of = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw error(errc::invalid_parameters, name + " needs " + k);
    if (it->second == "+" || it->second == "1" || it->second == "+1") return 1;
    if (it->second == "-" || it->second == "-1") return -1;
    throw error(errc::invalid_parameters, k + " must be + or -");
  };
  if (name == "thm31") return build_thm31({num("d"), num("nu0"), num("nu1"), num("delta"), sgn_of("k0"), sgn_of("k1")});
  if (name == "thm32") return build_thm32({num("d"), num("mu0"), num("nu1")});
  if (name == "dplus1") return build_dplus1(num("d"), sgn_of("k"));
  if (name == "mersenne") return build_mersenne(num("p"));
  if (name == "power2") return build_power2_family(static_cast<unsigned>(num("p")), static_cast<unsigned>(num("q")));
  if (name == "scale") {
    auto it = kv.find("base");
    if (it == kv.end()) throw error(errc::invalid_parameters, "scale needs base=<family spec>");
    auto base = build_family(it->second);
    auto s = scale_cycles(base.triplet, base.cycles, parse_integer(kv.count("a0") ? kv["a0"] : ""));
    s.params[0].second = it->second;
    return s;
  }
  throw error(errc::invalid_parameters, "unknown family '" + name + "'");
}

}  // namespace gcollatz
