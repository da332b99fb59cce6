#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "diophantine.hpp"
#include "dynamics.hpp"
#include "families.hpp"
#include "json.hpp"
#include "necessary.hpp"
#include "triplet.hpp"
#include "verifier.hpp"

namespace gcollatz {

enum class Format { text, csv, json };

using json = nlohmann::json;

inline json triplet_json(const Triplet& t) {
  return {{"d", t.d.get_str()}, {"alpha", t.alpha.get_str()}, {"beta", t.beta.get_str()},
          {"kappa", t.kappa > 0 ? "+" : "-"}, {"compact", t.str()}};
}

inline json cycle_json(const Triplet& t, const Cycle& c) {
  json e = json::array();
  for (const auto& x : c.elements()) e.push_back(x.get_str());
  return {{"triplet", t.str()},
          {"omega", c.omega().get_str()},
          {"length", c.length()},
          {"kbar", c.kbar()},
          {"elements", e},
          {"max_elem", c.max_elem().get_str()}};
}

inline json cycles_json(const Triplet& t, const std::vector<Cycle>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(cycle_json(t, c));
  return {{"triplet", triplet_json(t)}, {"cycles", a}};
}

inline json predicted_json(const PredictedCycleSet& s) {
  json j = cycles_json(s.triplet, s.cycles);
  json params = json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  j["provenance"] = {{"family", s.family}, {"params", params}};
  j["lower_bound_on_order"] = s.lower_bound_on_order;
  j["generator_count"] = s.generator_count;
  return j;
}

inline json bound_json(const BoundReport& r) {
  json j;
  j["method"] = method_name(r.method);
  j["triplet"] = triplet_json(r.triplet);
  j["M"] = r.M.get_str();
  j["bound"] = r.bound.get_str();
  if (r.floor_value) j["floor_value"] = r.floor_value->get_str();
  if (r.peak_index) j["peak_index"] = *r.peak_index;
  if (r.n0) j["n0"] = *r.n0;
  j["constant"] = {{"name", r.constant_name}, {"lo", r.constant_lo}, {"hi", r.constant_hi}};
  if (!r.mu.empty()) j["mu"] = r.mu;
  j["advisory"] = r.advisory;
  json rows = json::array();
  for (const auto& row : r.table) {
    json o = {{"n", row.n}, {"p", row.p.get_str()}, {"q", row.q.get_str()}};
    if (r.method == BoundMethod::algorithm2) {
      o["D"] = row.approx;
      o["sign"] = row.sign;
    } else {
      o["value"] = row.value.get_str();
    }
    rows.push_back(o);
  }
  j["table"] = rows;
  return j;
}

inline json necessary_json(const Triplet& t, const Cycle& c, const NecessaryConditionReport& r) {
  json terms = json::object();
  for (const auto& x : r.terms) terms[x.name] = {{"lo", x.lo}, {"hi", x.hi}};
  auto links = [](const std::vector<NecessaryConditionReport::Link>& v) {
    json a = json::array();
    for (const auto& l : v) a.push_back({{"relation", l.relation}, {"holds", l.holds}});
    return a;
  };
  return {{"triplet", t.str()},        {"omega", c.omega().get_str()}, {"max_chain_holds", r.max_chain_holds},
          {"min_chain_holds", r.min_chain_holds}, {"terms", terms},      {"max_chain", links(r.max_chain)},
          {"min_chain", links(r.min_chain)}};
}

inline std::string cycles_csv(const Triplet& t, const std::vector<Cycle>& cs) {
  std::string s = "triplet,omega,length,kbar,max_elem\n";
  for (const auto& c : cs)
    s += t.str() + "," + c.omega().get_str() + "," + std::to_string(c.length()) + "," + std::to_string(c.kbar()) +
         "," + c.max_elem().get_str() + "\n";
  return s;
}

inline std::string bound_csv(const BoundReport& r) {
  if (r.method == BoundMethod::hurwitz)
    return "method,triplet,M,floor_value,bound\nHurwitz," + r.triplet.str() + "," + r.M.get_str() + "," +
           r.floor_value->get_str() + "," + r.bound.get_str() + "\n";
  const char* col = r.method == BoundMethod::algorithm1 ? "R_n" : r.method == BoundMethod::algorithm2 ? "D_n" : "bound_n";
  std::string s = std::string("n,p_n,q_n,") + col + "\n";
  for (const auto& row : r.table)
    s += std::to_string(row.n) + "," + row.p.get_str() + "," + row.q.get_str() + "," +
         (r.method == BoundMethod::algorithm2 ? row.approx : row.value.get_str()) + "\n";
  return s;
}

inline std::string checkpoint_csv(const Checkpoint& cp) {
  std::ostringstream o;
  o << "key,value\n"
    << "triplet," << cp.triplet.str() << "\n"
    << "lo," << cp.lo << "\n"
    << "hi," << cp.hi << "\n"
    << "frontier," << cp.frontier << "\n"
    << "digest," << cp.digest << "\n"
    << "exception_count," << cp.exceptions.size() << "\n"
    << "\nn,status\n";
  for (const auto& e : cp.exceptions) o << e.n << "," << e.status << "\n";
  return o.str();
}

inline std::string cycles_text(const Triplet& t, const std::vector<Cycle>& cs) {
  std::ostringstream o;
  o << t.display() << ": " << cs.size() << " cycle" << (cs.size() == 1 ? "" : "s") << "\n";
  for (const auto& c : cs) {
    o << "  Omega(" << c.omega() << ")  L=" << c.length() << "  Kbar=" << c.kbar() << "  max=" << c.max_elem();
    if (c.length() <= 12) {
      o << "  (";
      for (const auto& x : c.elements()) o << x << " -> ";
      o << c.omega() << ")";
    }
    o << "\n";
  }
  return o.str();
}

inline std::string predicted_text(const PredictedCycleSet& s) {
  std::ostringstream o;
  o << s.family << "(";
  for (std::size_t i = 0; i < s.params.size(); ++i) o << (i ? ", " : "") << s.params[i].first << "=" << s.params[i].second;
  o << ") -> ";
  o << cycles_text(s.triplet, s.cycles);
  o << "order >= " << s.lower_bound_on_order;
  if (s.generator_count != s.cycles.size()) o << " (" << s.generator_count << " generators)";
  o << "\n";
  return o.str();
}

inline std::string bound_text(const BoundReport& r) {
  std::ostringstream o;
  o << method_name(r.method) << " for " << r.triplet.display() << " with min(Omega) >= " << r.M << "\n";
  o << r.constant_name << " in [" << r.constant_lo << ", " << r.constant_hi << "]\n";
  switch (r.method) {
    case BoundMethod::hurwitz:
      o << "floor(mu0*sqrt(M0)) = " << *r.floor_value << "\nL >= " << r.bound << "\n";
      return o.str();
    case BoundMethod::algorithm1:
      o << "R_inf = " << r.bound << " at n0 = " << *r.peak_index << "\n";
      break;
    case BoundMethod::algorithm2:
      o << "L >= p_" << *r.peak_index << " = " << r.bound << "  (n0 = " << *r.n0 << ")\n";
      break;
    case BoundMethod::mu_bound:
      o << "mu = " << r.mu << "; advisory bound L >= " << r.bound << "\n";
      break;
  }
  const char* col = r.method == BoundMethod::algorithm1 ? "R_n" : r.method == BoundMethod::algorithm2 ? "D_n" : "bound_n";
  o << std::setw(4) << "n" << std::setw(26) << "p_n" << std::setw(26) << "q_n" << std::setw(26) << col << "\n";
  for (const auto& row : r.table) {
    bool mark = r.peak_index && *r.peak_index == row.n;
    o << std::setw(4) << row.n << std::setw(26) << row.p << std::setw(26) << row.q << std::setw(26)
      << (r.method == BoundMethod::algorithm2 ? row.approx : row.value.get_str()) << (mark ? " *" : "") << "\n";
  }
  return o.str();
}

inline std::string checkpoint_text(const Checkpoint& cp) {
  std::ostringstream o;
  o << "verified " << cp.triplet.display() << " on [" << cp.lo << ", " << cp.frontier << "]";
  o << " against targets {";
  for (std::size_t i = 0; i < cp.targets.size(); ++i) o << (i ? ", " : "") << cp.targets[i];
  o << "}\n";
  o << "exceptions: " << cp.exceptions.size() << "\n";
  for (const auto& e : cp.exceptions) o << "  " << e.n << "  " << e.status << "\n";
  o << std::fixed << std::setprecision(3) << "wall time " << cp.wall_time << " s, " << std::setprecision(0)
    << cp.throughput << " seeds/s\n";
  return o.str();
}

inline std::string emit(const BoundReport& r, Format f) {
  if (f == Format::json) return bound_json(r).dump(2) + "\n";
  if (f == Format::csv) return bound_csv(r);
  return bound_text(r);
}

inline std::string emit(const PredictedCycleSet& s, Format f) {
  if (f == Format::json) return predicted_json(s).dump(2) + "\n";
  if (f == Format::csv) return cycles_csv(s.triplet, s.cycles);
  return predicted_text(s);
}

inline std::string emit(const Checkpoint& cp, Format f) {
  if (f == Format::json) return checkpoint_to_json(cp).dump(2) + "\n";
  if (f == Format::csv) return checkpoint_csv(cp);
  return checkpoint_text(cp);
}

}  // namespace gcollatz
