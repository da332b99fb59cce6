#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"
#include "triplet.hpp"

namespace gcollatz {

struct Limits {
  std::uint64_t max_steps = 100000;
  Integer max_value = pow_ui(10, 30);
  std::set<Integer> known_cycle_minima;
  bool record_path = false;

  void validate() const {
    if (max_steps < 1) throw error(errc::invalid_parameters, "max_steps must be >= 1");
    if (max_value < 1) throw error(errc::invalid_parameters, "max_value must be >= 1");
  }
};

class Cycle {
 public:
  Cycle() = default;

  const std::vector<Integer>& elements() const { return elements_; }
  const Integer& omega() const { return elements_.front(); }
  std::size_t length() const { return elements_.size(); }
  std::size_t kbar() const { return kbar_; }
  const Integer& max_elem() const { return max_; }

  friend bool operator==(const Cycle& a, const Cycle& b) { return a.elements_ == b.elements_; }
  friend bool operator<(const Cycle& a, const Cycle& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.omega() < b.omega();
  }

 private:
  std::vector<Integer> elements_;
  std::size_t kbar_ = 0;
  Integer max_;

  friend Cycle canonicalize(const Triplet& t, std::vector<Integer> elements);
};

/// Rotates a closed orbit so its minimum leads, after checking it really is one.
inline Cycle canonicalize(const Triplet& t, std::vector<Integer> elements) {
  if (elements.empty()) throw error(errc::not_a_cycle, "empty element list");
  TripletMap m(t);
  std::set<Integer> seen;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Integer& x = elements[i];
    if (x < 1) throw error(errc::not_a_cycle, "non-positive element " + x.get_str());
    if (!seen.insert(x).second) throw error(errc::not_a_cycle, "repeated element " + x.get_str());
    const Integer& next = elements[(i + 1) % elements.size()];
    if (m(x) != next)
      throw error(errc::not_a_cycle, "T(" + x.get_str() + ") != " + next.get_str() + " for " + t.display());
  }
  auto lead = std::min_element(elements.begin(), elements.end());
  std::rotate(elements.begin(), lead, elements.end());
  Cycle c;
  c.kbar_ = static_cast<std::size_t>(std::count_if(elements.begin(), elements.end(), [&](const Integer& x) {
    return !mpz_divisible_p(x.get_mpz_t(), t.d.get_mpz_t());
  }));
  c.max_ = *std::max_element(elements.begin(), elements.end());
  c.elements_ = std::move(elements);
  return c;
}

namespace detail {

inline bool advance(const TripletMap& m, std::uint64_t& x) { return m.step(x); }
inline bool advance(const TripletMap& m, Integer& x) {
  m.step(x);
  return true;
}
inline Integer widen(std::uint64_t x) { return from_u64(x); }
inline Integer widen(const Integer& x) { return x; }

enum class Walk { cycle, step_cap, value_cap, overflow, stopped };

template <class Int>
struct WalkResult {
  Walk status = Walk::step_cap;
  Int last{};              // value that triggered the stop, or a point on the cycle
  std::uint64_t lambda = 0;
  std::uint64_t steps = 0;
};

/// Brent's cycle finder with caps. `visit` sees every new value (start included)
/// and returns true to stop the walk.
template <class Int, class Visit>
WalkResult<Int> brent_walk(const TripletMap& m, const Int& x0, std::uint64_t max_steps, const Int& max_value,
                           Visit&& visit) {
  WalkResult<Int> r;
  if (visit(x0)) {
    r.status = Walk::stopped;
    r.last = x0;
    return r;
  }
  Int tortoise = x0, hare = x0;
  std::uint64_t power = 1, lam = 0;
  for (;;) {
    if (r.steps >= max_steps) {
      r.status = Walk::step_cap;
      r.last = hare;
      return r;
    }
    if (!advance(m, hare)) {
      r.status = Walk::overflow;
      return r;
    }
    ++r.steps;
    ++lam;
    if (hare > max_value) {
      r.status = Walk::value_cap;
      r.last = hare;
      return r;
    }
    if (hare == tortoise) {
      r.status = Walk::cycle;
      r.last = hare;
      r.lambda = lam;
      return r;
    }
    if (visit(hare)) {
      r.status = Walk::stopped;
      r.last = hare;
      return r;
    }
    if (lam == power) {
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
  }
}

template <class Int>
std::vector<Integer> collect_cycle(const TripletMap& m, Int x, std::uint64_t lambda) {
  std::vector<Integer> out;
  out.reserve(lambda);
  for (std::uint64_t i = 0; i < lambda; ++i) {
    out.push_back(widen(x));
    advance(m, x);
  }
  return out;
}

/// Index of the first element of the cycle along the orbit of x0 (the tail length).
template <class Int>
std::uint64_t tail_length(const TripletMap& m, const Int& x0, std::uint64_t lambda) {
  Int a = x0, b = x0;
  for (std::uint64_t i = 0; i < lambda; ++i) advance(m, b);
  std::uint64_t mu = 0;
  while (a != b) {
    advance(m, a);
    advance(m, b);
    ++mu;
  }
  return mu;
}

inline std::uint64_t u64_cap(const Integer& max_value) {
  auto v = to_u64(max_value);
  return v ? *v : UINT64_MAX;
}

}  // namespace detail

enum class Terminal { entered_known_cycle, cycle_detected, step_cap_exceeded, value_cap_exceeded };

inline const char* terminal_name(Terminal t) {
  switch (t) {
    case Terminal::entered_known_cycle: return "EnteredKnownCycle";
    case Terminal::cycle_detected: return "CycleDetected";
    case Terminal::step_cap_exceeded: return "StepCapExceeded";
    case Terminal::value_cap_exceeded: return "ValueCapExceeded";
  }
  return "?";
}

struct Trajectory {
  Integer start;
  std::uint64_t visited_count = 0;  // applications of T performed
  Terminal terminal = Terminal::step_cap_exceeded;
  Integer peak;
  Integer last;
  std::optional<Integer> known_minimum;
  std::optional<Cycle> cycle;
  std::vector<Integer> path;  // filled when Limits::record_path is set
};

inline Trajectory trace(const Triplet& t, const Integer& n, const Limits& limits) {
  limits.validate();
  if (n < 1) throw error(errc::invalid_parameters, "n must be a positive integer");
  TripletMap m(t);
  Trajectory tr;
  tr.start = n;
  tr.peak = n;
  auto visit = [&](const Integer& x) {
    if (x > tr.peak) tr.peak = x;
    if (limits.record_path) tr.path.push_back(x);
    return limits.known_cycle_minima.count(x) > 0;
  };
  auto w = detail::brent_walk<Integer>(m, n, limits.max_steps, limits.max_value, visit);
  tr.visited_count = w.steps;
  tr.last = w.last;
  switch (w.status) {
    case detail::Walk::stopped:
      tr.terminal = Terminal::entered_known_cycle;
      tr.known_minimum = w.last;
      break;
    case detail::Walk::cycle: {
      tr.terminal = Terminal::cycle_detected;
      tr.cycle = canonicalize(t, detail::collect_cycle(m, w.last, w.lambda));
      std::uint64_t first_repeat = detail::tail_length(m, n, w.lambda) + w.lambda;
      tr.visited_count = first_repeat;
      if (limits.record_path && tr.path.size() > first_repeat) tr.path.resize(first_repeat);
      break;
    }
    case detail::Walk::value_cap:
      tr.terminal = Terminal::value_cap_exceeded;
      break;
    default:
      tr.terminal = Terminal::step_cap_exceeded;
      break;
  }
  return tr;
}

inline std::optional<Cycle> detect_cycle_from(const Triplet& t, const Integer& n, const Limits& limits = {}) {
  limits.validate();
  if (n < 1) throw error(errc::invalid_parameters, "n must be a positive integer");
  TripletMap m(t);
  auto none = [](const auto&) { return false; };
  if (auto n64 = to_u64(n); n64 && m.has_fast_path()) {
    auto w = detail::brent_walk<std::uint64_t>(m, *n64, limits.max_steps, detail::u64_cap(limits.max_value), none);
    if (w.status == detail::Walk::cycle) return canonicalize(t, detail::collect_cycle(m, w.last, w.lambda));
    if (w.status != detail::Walk::overflow) return std::nullopt;
  }
  auto w = detail::brent_walk<Integer>(m, n, limits.max_steps, limits.max_value, none);
  if (w.status == detail::Walk::cycle) return canonicalize(t, detail::collect_cycle(m, w.last, w.lambda));
  return std::nullopt;
}

namespace detail {

/// Elements of already-found cycles, for early exit during enumeration.
struct ElementIndex {
  std::unordered_map<std::uint64_t, std::size_t> small;
  std::map<Integer, std::size_t> large;

  void add(const Cycle& c, std::size_t id) {
    for (const auto& x : c.elements()) {
      if (auto v = to_u64(x)) small.emplace(*v, id);
      else large.emplace(x, id);
    }
  }
  std::optional<std::size_t> find(std::uint64_t x) const {
    auto it = small.find(x);
    if (it == small.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find(const Integer& x) const {
    if (auto v = to_u64(x)) return find(*v);
    auto it = large.find(x);
    if (it == large.end()) return std::nullopt;
    return it->second;
  }
};

struct SeedOutcome {
  Walk status;
  std::optional<Cycle> cycle;
  std::optional<std::size_t> hit;  // index of the known cycle entered
};

inline SeedOutcome run_seed(const TripletMap& m, const Integer& seed, const Limits& limits, const ElementIndex& index) {
  auto finish = [&](const auto& w) {
    SeedOutcome o{w.status, std::nullopt, std::nullopt};
    if (w.status == Walk::cycle) o.cycle = canonicalize(m.triplet(), collect_cycle(m, w.last, w.lambda));
    if (w.status == Walk::stopped) o.hit = index.find(w.last);
    return o;
  };
  if (auto s = to_u64(seed); s && m.has_fast_path()) {
    auto w = brent_walk<std::uint64_t>(m, *s, limits.max_steps, u64_cap(limits.max_value),
                                       [&](std::uint64_t x) { return index.find(x).has_value(); });
    if (w.status != Walk::overflow) return finish(w);
  }
  auto w = brent_walk<Integer>(m, seed, limits.max_steps, limits.max_value,
                               [&](const Integer& x) { return index.find(x).has_value(); });
  return finish(w);
}

}  // namespace detail

/// Every cycle reached from seeds lo..hi, deduplicated by minimum and sorted by (L, omega).
/// Seeds that hit a cap are appended to `undecided` when given.
inline std::vector<Cycle> enumerate_cycles(const Triplet& t, const Integer& lo, const Integer& hi,
                                           const Limits& limits = {}, std::vector<Integer>* undecided = nullptr,
                                           unsigned threads = 1) {
  limits.validate();
  if (lo < 1 || lo > hi) throw error(errc::invalid_parameters, "need 1 <= seed_lo <= seed_hi");
  TripletMap m(t);
  threads = std::max(1u, threads);
  Integer span = hi - lo + 1;
  if (span < threads) threads = static_cast<unsigned>(span.get_ui());

  struct Local {
    std::map<Integer, Cycle> found;
    std::vector<Integer> undecided;
  };
  std::vector<Local> locals(threads);
  auto work = [&](unsigned w) {
    Local& L = locals[w];
    detail::ElementIndex index;
    for (Integer s = lo + w; s <= hi; s += threads) {
      auto o = detail::run_seed(m, s, limits, index);
      if (o.cycle) {
        auto [it, fresh] = L.found.emplace(o.cycle->omega(), *o.cycle);
        if (fresh) index.add(it->second, 0);
      } else if (o.status == detail::Walk::step_cap || o.status == detail::Walk::value_cap) {
        L.undecided.push_back(s);
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  std::map<Integer, Cycle> merged;
  std::vector<Integer> und;
  for (auto& L : locals) {
    merged.insert(L.found.begin(), L.found.end());
    und.insert(und.end(), L.undecided.begin(), L.undecided.end());
  }
  std::vector<Cycle> out;
  for (auto& [_, c] : merged) out.push_back(c);
  std::sort(out.begin(), out.end());
  if (undecided) {
    std::sort(und.begin(), und.end());
    *undecided = std::move(und);
  }
  return out;
}

struct SeedLabel {
  enum Kind { converged, undecided } kind = undecided;
  std::optional<Integer> omega;  // set when converged
  std::string reason;            // cap or foreign cycle that stopped an undecided seed
};

inline SeedLabel classify_seed(const Triplet& t, const Integer& n, const std::vector<Cycle>& cycles,
                               const Limits& limits = {}) {
  limits.validate();
  if (n < 1) throw error(errc::invalid_parameters, "n must be a positive integer");
  TripletMap m(t);
  detail::ElementIndex index;
  for (std::size_t i = 0; i < cycles.size(); ++i) index.add(cycles[i], i);
  auto o = detail::run_seed(m, n, limits, index);
  SeedLabel label;
  switch (o.status) {
    case detail::Walk::stopped:
      label.kind = SeedLabel::converged;
      label.omega = cycles[*o.hit].omega();
      break;
    case detail::Walk::cycle:
      label.reason = "entered cycle " + o.cycle->omega().get_str() + " outside the target set";
      break;
    case detail::Walk::value_cap:
      label.reason = "ValueCapExceeded";
      break;
    default:
      label.reason = "StepCapExceeded";
      break;
  }
  return label;
}

/// T^l(n_k) for alpha = d^nu1 + 1, beta = d^(2*mu0 + nu1) - alpha^2 and n_k = beta*(d^k + 1):
///   beta * (alpha^l d^(k-l) + sum_{i<l} alpha^i d^(nu1-i-1) + 1).
/// The residue argument behind it only carries through while l <= nu1.
inline Integer closed_form_iterate(unsigned long d, unsigned long nu1, unsigned long mu0, unsigned long k,
                                   unsigned long l) {
  if (d < 2) throw error(errc::invalid_parameters, "d must be >= 2");
  if (nu1 < 2) throw error(errc::invalid_parameters, "nu1 must be >= 2");
  if (2 * mu0 <= nu1) throw error(errc::invalid_parameters, "need 2*mu0 > nu1");
  if (k < 1 || l < 1 || l > k) throw error(errc::invalid_parameters, "need 1 <= l <= k");
  if (l > nu1) throw error(errc::invalid_parameters, "closed form only holds for l <= nu1");
  Integer alpha = pow_ui(d, nu1) + 1;
  Integer beta = pow_ui(d, 2 * mu0 + nu1) - alpha * alpha;
  Integer s = pow_ui(alpha, l) * pow_ui(d, k - l) + 1;
  for (unsigned long i = 0; i < l; ++i) s += pow_ui(alpha, i) * pow_ui(d, nu1 - i - 1);
  return beta * s;
}

}  // namespace gcollatz
