#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "integer.hpp"

namespace gcollatz {

/// (d, alpha, beta) with sign kappa; the map is
///   T(n) = n/d                            if d | n
///   T(n) = (alpha*n + beta*[kappa*n]_d)/d otherwise.
struct Triplet {
  Integer d, alpha, beta;
  int kappa = 1;

  Triplet() = default;
  Triplet(Integer d_, Integer alpha_, Integer beta_, int kappa_)
      : d(std::move(d_)), alpha(std::move(alpha_)), beta(std::move(beta_)), kappa(kappa_) {
    validate();
  }

  void validate() const {
    auto bad = [&](const std::string& why) { throw error(errc::invalid_triplet, str() + ": " + why); };
    if (kappa != 1 && kappa != -1) bad("kappa must be +1 or -1");
    if (d < 2) bad("d must be >= 2");
    if (alpha <= d) bad("alpha must exceed d");
    if (mpz_divisible_p(alpha.get_mpz_t(), d.get_mpz_t())) bad("d divides alpha");
    if (beta == 0 || mpz_divisible_p(beta.get_mpz_t(), d.get_mpz_t())) bad("d divides |beta|");
  }

  /// Compact form "d:alpha:beta:+".
  std::string str() const {
    return d.get_str() + ":" + alpha.get_str() + ":" + beta.get_str() + ":" + (kappa > 0 ? "+" : "-");
  }
  /// Tuple form "(d,alpha,beta)+".
  std::string display() const {
    return "(" + d.get_str() + "," + alpha.get_str() + "," + beta.get_str() + ")" + (kappa > 0 ? "+" : "-");
  }

  friend bool operator==(const Triplet& a, const Triplet& b) {
    return a.d == b.d && a.alpha == b.alpha && a.beta == b.beta && a.kappa == b.kappa;
  }
};

/// Accepts "d:alpha:beta:+", "d:alpha:beta:-" and the tuple form "(d,alpha,beta)+".
inline Triplet parse_triplet(std::string_view text) {
  std::string s(text);
  auto fail = [&] { throw error(errc::invalid_triplet, "cannot parse triplet '" + s + "'"); };
  std::string body = s;
  char sign = 0;
  if (!body.empty() && body.front() == '(') {
    auto close = body.find(')');
    if (close == std::string::npos || close + 2 != body.size()) fail();
    sign = body.back();
    body = body.substr(1, close - 1);
    for (auto& c : body)
      if (c == ',') c = ':';
  } else {
    auto last = body.rfind(':');
    if (last == std::string::npos || last + 2 != body.size()) fail();
    sign = body.back();
    body = body.substr(0, last);
  }
  if (sign != '+' && sign != '-') fail();
  Integer parts[3];
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    auto colon = body.find(':', start);
    if ((i < 2) == (colon == std::string::npos)) fail();
    auto piece = body.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    try {
      parts[i] = parse_integer(piece);
    } catch (const error&) {
      fail();
    }
    start = colon + 1;
  }
  return Triplet(parts[0], parts[1], parts[2], sign == '+' ? 1 : -1);
}

/// [n]_d for kappa = +1, [-n]_d for kappa = -1; always in [0, d).
inline Integer signed_residue(int kappa, const Integer& n, const Integer& d) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (kappa < 0 && r != 0) r = d - r;
  return r;
}

struct WellFormedness {
  bool divisibility_ok = false;  // d | alpha + kappa*beta
  bool magnitude_ok = false;     // alpha + kappa*beta > ((kappa-1)/2)*beta*d
  std::optional<Integer> witness;
  std::optional<mpq_class> witness_value;  // T(witness) as an exact rational

  bool ok() const { return divisibility_ok && magnitude_ok; }

  std::string explain(const Triplet& t) const {
    if (ok()) return t.display() + " is well-formed";
    Integer s = t.alpha + t.kappa * t.beta;
    std::string msg;
    if (!divisibility_ok) msg = "divisibility clause fails: " + t.d.get_str() + " does not divide " + s.get_str();
    if (!magnitude_ok) {
      Integer rhs = t.kappa > 0 ? Integer(0) : Integer(-t.beta * t.d);
      if (!msg.empty()) msg += "; ";
      msg += "magnitude clause fails: " + s.get_str() + " <= " + rhs.get_str();
    }
    if (witness) msg += "; T(" + witness->get_str() + ") = " + witness_value->get_str();
    return msg;
  }
};

inline WellFormedness check_wellformed(const Triplet& t) {
  WellFormedness w;
  Integer s = t.alpha + t.kappa * t.beta;
  w.divisibility_ok = mpz_divisible_p(s.get_mpz_t(), t.d.get_mpz_t()) != 0;
  w.magnitude_ok = t.kappa > 0 ? s > 0 : s > -t.beta * t.d;
  if (w.ok()) return w;
  // n = 1 always fails when a clause does; scan the first residue class anyway.
  for (Integer n = 1; n < t.d; ++n) {
    Integer num = t.alpha * n + t.beta * signed_residue(t.kappa, n, t.d);
    mpq_class v(num, t.d);
    v.canonicalize();
    if (!mpz_divisible_p(num.get_mpz_t(), t.d.get_mpz_t()) || v <= 0) {
      w.witness = n;
      w.witness_value = v;
      break;
    }
  }
  return w;
}

/// A triplet already checked to be well-formed, with a 64-bit fast path when the
/// coefficients are small enough. Writing n = q*d + r, the non-divisible branch is
///   alpha*q + r*(alpha+beta)/d          for kappa = +1
///   alpha*q + beta + r*(alpha-beta)/d   for kappa = -1
/// which needs a single division per step.
class TripletMap {
 public:
  explicit TripletMap(Triplet t) : t_(std::move(t)) {
    t_.validate();
    auto w = check_wellformed(t_);
    if (!w.ok()) throw error(errc::not_well_formed, t_.display() + ": " + w.explain(t_));
    Integer c = (t_.alpha + t_.kappa * t_.beta) / t_.d;
    c_ = c;
    add_ = t_.kappa > 0 ? Integer(0) : t_.beta;
    auto d = to_i64(t_.d), a = to_i64(t_.alpha), b = to_i64(t_.beta), cc = to_i64(c);
    if (d && a && b && cc) {
      fast_ = true;
      d64_ = static_cast<std::uint64_t>(*d);
      a64_ = *a;
      c64_ = *cc;
      add64_ = t_.kappa > 0 ? 0 : *b;
    }
  }

  const Triplet& triplet() const { return t_; }
  bool has_fast_path() const { return fast_; }

  /// Advances n in place; returns false (n untouched) if the result would not fit.
  bool step(std::uint64_t& n) const {
    if (!fast_) return false;
    std::uint64_t q = n / d64_, r = n - q * d64_;
    if (r == 0) {
      n = q;
      return true;
    }
    __int128 v = static_cast<__int128>(a64_) * q + static_cast<__int128>(c64_) * static_cast<__int128>(r) + add64_;
    if (v <= 0 || v > static_cast<__int128>(UINT64_MAX)) return false;
    n = static_cast<std::uint64_t>(v);
    return true;
  }

  void step(Integer& n) const {
    thread_local Integer q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), t_.d.get_mpz_t());
    if (r == 0) {
      mpz_swap(n.get_mpz_t(), q.get_mpz_t());
      return;
    }
    mpz_mul(n.get_mpz_t(), t_.alpha.get_mpz_t(), q.get_mpz_t());
    mpz_addmul(n.get_mpz_t(), r.get_mpz_t(), c_.get_mpz_t());
    if (t_.kappa < 0) mpz_add(n.get_mpz_t(), n.get_mpz_t(), add_.get_mpz_t());
    if (n <= 0) throw error(errc::internal_defect, "map left the positive integers at " + t_.display());
  }

  Integer operator()(const Integer& n) const {
    if (n < 1) throw error(errc::invalid_parameters, "n must be a positive integer");
    Integer v = n;
    step(v);
    return v;
  }

 private:
  Triplet t_;
  Integer c_, add_;
  bool fast_ = false;
  std::uint64_t d64_ = 0;
  std::int64_t a64_ = 0, c64_ = 0, add64_ = 0;
};

inline Integer apply_map(const Triplet& t, const Integer& n) { return TripletMap(t)(n); }

inline Integer apply_map_iter(const Triplet& t, const Integer& n, std::uint64_t k) {
  TripletMap m(t);
  if (n < 1) throw error(errc::invalid_parameters, "n must be a positive integer");
  Integer v = n;
  for (std::uint64_t i = 0; i < k; ++i) m.step(v);
  return v;
}

}  // namespace gcollatz
