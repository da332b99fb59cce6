#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gcollatz.hpp"

namespace gcollatz::cli {

namespace detail {

inline std::vector<Integer> parse_list(const std::string& s) {
  std::vector<Integer> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_integer(item));
  return out;
}

inline std::uint64_t parse_u64(const std::string& s, const char* flag) {
  auto v = to_u64(parse_integer(s));
  if (!v) throw error(errc::invalid_parameters, std::string(flag) + " out of range: " + s);
  return *v;
}

inline mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw error(errc::invalid_parameters, "not a rational: " + s);
  q.canonicalize();
  return q;
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw error(errc::invalid_parameters, "cannot write " + path);
  f << body;
}

}  // namespace detail

/// Parses and runs one command. Returns 0 on success, 1 on domain errors, 2 on usage errors.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Collatz maps: cycles, bounds and range verification", "gcollatz"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string json_path, csv_path;
  app.add_option("--json", json_path, "Write a JSON report to PATH");
  app.add_option("--csv", csv_path, "Write a CSV report to PATH");

  std::string triplet_s, n_s, from_s, to_s, known_s, targets_s, checkpoint_s, max_value_s, min_omega_s, mu_s = "2",
                                                                                          range_s, spec_s, a0_s;
  std::string max_steps_s = "100000", iterations_s = "1", chunk_s = "65536";
  unsigned threads = 0, precision_bits = 128;
  bool record_path = false, shortcut = false, necessary = false;
  unsigned long d = 0, nu0 = 0, nu1 = 0, delta = 0, mu0 = 0, p = 0, q = 0;
  std::string k0 = "+", k1 = "+", kappa = "+";

  auto add_triplet = [&](CLI::App* c) { c->add_option("--triplet", triplet_s, "d:alpha:beta:+|-")->required(); };
  auto add_caps = [&](CLI::App* c) {
    c->add_option("--max-steps", max_steps_s, "Step cap per orbit");
    c->add_option("--max-value", max_value_s, "Value cap per orbit (default 10^30)");
  };

  auto* check = app.add_subcommand("check", "Check well-formedness of a triplet");
  add_triplet(check);

  auto* map = app.add_subcommand("map", "Apply the map k times");
  add_triplet(map);
  map->add_option("--n", n_s, "Starting value")->required();
  map->add_option("--iterations,-k", iterations_s, "Number of applications");

  auto* trace_c = app.add_subcommand("trace", "Follow one trajectory");
  add_triplet(trace_c);
  trace_c->add_option("--n", n_s, "Starting value")->required();
  trace_c->add_option("--known", known_s, "Comma-separated known cycle minima");
  trace_c->add_flag("--path", record_path, "Print the full path");
  add_caps(trace_c);

  auto* cycles = app.add_subcommand("cycles", "Enumerate cycles reached from a seed range");
  add_triplet(cycles);
  cycles->add_option("--from", from_s, "First seed")->required();
  cycles->add_option("--to", to_s, "Last seed")->required();
  cycles->add_option("--threads", threads, "Worker threads");
  cycles->add_flag("--necessary", necessary, "Also check the necessary length conditions on each cycle");
  add_caps(cycles);

  auto* family = app.add_subcommand("family", "Build a family triplet with its proven cycles");
  family->require_subcommand(1);
  auto* f31 = family->add_subcommand("thm31", "alpha = d^nu1 - k1*delta, beta = k0*(d^nu0 - alpha)");
  f31->add_option("--d", d)->required();
  f31->add_option("--nu0", nu0)->required();
  f31->add_option("--nu1", nu1)->required();
  f31->add_option("--delta", delta)->required();
  f31->add_option("--k0", k0);
  f31->add_option("--k1", k1);
  auto* f32 = family->add_subcommand("thm32", "alpha = d^nu1 + 1, beta = d^(2 mu0 + nu1) - alpha^2");
  f32->add_option("--d", d)->required();
  f32->add_option("--nu1", nu1)->required();
  f32->add_option("--mu0", mu0)->required();
  auto* fscale = family->add_subcommand("scale", "Scale the cycles of a base family by a0 = 1 mod d");
  fscale->add_option("--base", spec_s, "Base family spec, e.g. thm32:d=5,nu1=1,mu0=2")->required();
  fscale->add_option("--a0", a0_s)->required();
  auto* fd1 = family->add_subcommand("dplus1", "(d, d+1, -1)+ or (d, d+1, 1)-");
  fd1->add_option("--d", d)->required();
  fd1->add_option("--kappa", kappa);
  auto* fm = family->add_subcommand("mersenne", "(2^(p-1), 2^p - 1, 1)+");
  fm->add_option("--p", p)->required();
  auto* fp2 = family->add_subcommand("power2", "(2^p+2^q, 2^p+2^(q+1), 2^p)+");
  fp2->add_option("--p", p)->required();
  fp2->add_option("--q", q)->required();
  auto* fspec = family->add_subcommand("spec", "Family given as one string");
  fspec->add_option("spec", spec_s)->required();

  auto* bound = app.add_subcommand("bound", "Lower bounds on the length of cycles with large minimum");
  bound->require_subcommand(1);
  std::vector<CLI::App*> bound_subs;
  for (const char* name : {"hurwitz", "alg1", "alg2", "mu"}) {
    auto* b = bound->add_subcommand(name);
    add_triplet(b);
    b->add_option("--min-omega", min_omega_s, "Lower bound on the cycle minimum (b^e accepted)")->required();
    b->add_option("--precision-bits", precision_bits, "Starting working precision");
    bound_subs.push_back(b);
  }
  bound_subs[3]->add_option("--mu", mu_s, "Irrationality exponent as a rational, default 2");
  bound_subs[3]->add_option("--range", range_s, "Convergent indices n1:n2");

  auto* verify = app.add_subcommand("verify", "Check that every seed in a range reaches a target cycle");
  add_triplet(verify);
  verify->add_option("--from", from_s, "First seed");
  verify->add_option("--to", to_s, "Last seed")->required();
  verify->add_option("--targets", targets_s, "Comma-separated target cycle minima")->required();
  verify->add_flag("--shortcut", shortcut, "Stop once an orbit drops below its seed (needs --from 1)");
  verify->add_option("--chunk", chunk_s, "Seeds per work unit");
  verify->add_option("--threads", threads, "Worker threads (default: GCOLLATZ_THREADS or all cores)");
  verify->add_option("--checkpoint", checkpoint_s, "Checkpoint file, rewritten as the frontier advances");
  add_caps(verify);

  auto* resume_c = app.add_subcommand("resume", "Extend a checkpointed verification");
  resume_c->add_option("--checkpoint", checkpoint_s, "Checkpoint file")->required();
  resume_c->add_option("--to", to_s, "New last seed")->required();
  resume_c->add_option("--triplet", triplet_s, "Expected triplet (integrity check)");
  resume_c->add_option("--threads", threads, "Worker threads");

  std::vector<std::string> argv_store{"gcollatz"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  auto emit_all = [&](const std::string& text, const std::string& j, const std::string& c) {
    out << text;
    if (!json_path.empty()) detail::write_file(json_path, j);
    if (!csv_path.empty()) detail::write_file(csv_path, c);
  };
  auto limits = [&] {
    Limits l;
    l.max_steps = detail::parse_u64(max_steps_s, "--max-steps");
    if (!max_value_s.empty()) l.max_value = parse_integer(max_value_s);
    l.validate();
    return l;
  };
  auto sign_of = [](const std::string& s) {
    if (s == "+" || s == "+1" || s == "1") return 1;
    if (s == "-" || s == "-1") return -1;
    throw error(errc::invalid_parameters, "sign must be + or -: " + s);
  };

  try {
    if (*check) {
      Triplet t = parse_triplet(triplet_s);
      auto w = check_wellformed(t);
      json j = {{"triplet", triplet_json(t)},
                {"divisibility_ok", w.divisibility_ok},
                {"magnitude_ok", w.magnitude_ok},
                {"well_formed", w.ok()}};
      if (w.witness) j["witness"] = {{"n", w.witness->get_str()}, {"T", w.witness_value->get_str()}};
      emit_all(w.explain(t) + "\n", j.dump(2) + "\n",
               "triplet,divisibility_ok,magnitude_ok\n" + t.str() + "," + (w.divisibility_ok ? "1" : "0") + "," +
                   (w.magnitude_ok ? "1" : "0") + "\n");
      if (!w.ok()) {
        err << "NotWellFormed: " << w.explain(t) << "\n";
        return 1;
      }
      return 0;
    }
    if (*map) {
      Triplet t = parse_triplet(triplet_s);
      Integer n = parse_integer(n_s);
      std::uint64_t k = detail::parse_u64(iterations_s, "--iterations");
      Integer v = apply_map_iter(t, n, k);
      std::string label = k == 1 ? "T(" + n.get_str() + ")" : "T^" + std::to_string(k) + "(" + n.get_str() + ")";
      emit_all(label + " = " + v.get_str() + "\n",
               json{{"triplet", t.str()}, {"n", n.get_str()}, {"k", k}, {"value", v.get_str()}}.dump(2) + "\n",
               "n,k,value\n" + n.get_str() + "," + std::to_string(k) + "," + v.get_str() + "\n");
      return 0;
    }
    if (*trace_c) {
      Triplet t = parse_triplet(triplet_s);
      Limits l = limits();
      for (auto& w : detail::parse_list(known_s)) l.known_cycle_minima.insert(w);
      l.record_path = true;
      Trajectory tr = trace(t, parse_integer(n_s), l);
      std::ostringstream o;
      o << "trajectory of " << tr.start << " under " << t.display() << ": " << terminal_name(tr.terminal);
      if (tr.known_minimum) o << "(" << *tr.known_minimum << ")";
      if (tr.cycle) o << "(" << tr.cycle->omega() << ", L=" << tr.cycle->length() << ")";
      o << " after " << tr.visited_count << " steps, peak " << tr.peak << "\n";
      if (record_path) {
        for (std::size_t i = 0; i < tr.path.size(); ++i) o << (i ? " -> " : "  ") << tr.path[i];
        o << "\n";
      }
      json path = json::array();
      for (const auto& x : tr.path) path.push_back(x.get_str());
      json j = {{"triplet", t.str()},
                {"start", tr.start.get_str()},
                {"visited_count", tr.visited_count},
                {"terminal", terminal_name(tr.terminal)},
                {"peak", tr.peak.get_str()},
                {"path", path}};
      if (tr.known_minimum) j["omega"] = tr.known_minimum->get_str();
      if (tr.cycle) j["cycle"] = cycle_json(t, *tr.cycle);
      std::string csv = "step,value\n";
      for (std::size_t i = 0; i < tr.path.size(); ++i) csv += std::to_string(i) + "," + tr.path[i].get_str() + "\n";
      emit_all(o.str(), j.dump(2) + "\n", csv);
      return 0;
    }
    if (*cycles) {
      Triplet t = parse_triplet(triplet_s);
      std::vector<Integer> undecided;
      auto cs = enumerate_cycles(t, parse_integer(from_s), parse_integer(to_s), limits(), &undecided,
                                 threads ? threads : 1);
      std::string text = cycles_text(t, cs);
      if (!undecided.empty()) text += std::to_string(undecided.size()) + " seeds undecided at the caps\n";
      json j = cycles_json(t, cs);
      json und = json::array();
      for (const auto& u : undecided) und.push_back(u.get_str());
      j["undecided"] = und;
      if (necessary) {
        json checks = json::array();
        for (const auto& c : cs) {
          auto r = check_cycle_necessary_conditions(t, c);
          text += "  Omega(" + c.omega().get_str() + "): max chain " + (r.max_chain_holds ? "holds" : "FAILS") + ", min chain " +
                  (r.min_chain_holds ? "holds" : "FAILS") + "\n";
          checks.push_back(necessary_json(t, c, r));
        }
        j["necessary_conditions"] = checks;
      }
      emit_all(text, j.dump(2) + "\n", cycles_csv(t, cs));
      return 0;
    }
    if (*family) {
      PredictedCycleSet s;
      if (*f31) s = build_thm31({d, nu0, nu1, delta, sign_of(k0), sign_of(k1)});
      else if (*f32) s = build_thm32({d, mu0, nu1});
      else if (*fscale) {
        auto base = build_family(spec_s);
        s = scale_cycles(base.triplet, base.cycles, parse_integer(a0_s));
        s.params[0].second = spec_s;
      } else if (*fd1) s = build_dplus1(d, sign_of(kappa));
      else if (*fm) s = build_mersenne(p);
      else if (*fp2) s = build_power2_family(static_cast<unsigned>(p), static_cast<unsigned>(q));
      else s = build_family(spec_s);
      emit_all(emit(s, Format::text), emit(s, Format::json), emit(s, Format::csv));
      return 0;
    }
    if (*bound) {
      Triplet t = parse_triplet(triplet_s);
      Integer M = parse_integer(min_omega_s);
      PrecisionPolicy policy{static_cast<mpfr_prec_t>(precision_bits),
                             std::max<mpfr_prec_t>(16384, static_cast<mpfr_prec_t>(precision_bits))};
      BoundReport r;
      if (*bound_subs[0]) r = hurwitz_bound(t, M, policy);
      else if (*bound_subs[1]) r = algorithm1_rinf(t, M, policy);
      else if (*bound_subs[2]) r = algorithm2_farey(t, M, policy);
      else {
        std::optional<std::pair<std::size_t, std::size_t>> range;
        if (!range_s.empty()) {
          auto colon = range_s.find(':');
          if (colon == std::string::npos) throw error(errc::invalid_parameters, "--range expects n1:n2");
          range = std::make_pair(detail::parse_u64(range_s.substr(0, colon), "--range"),
                                 detail::parse_u64(range_s.substr(colon + 1), "--range"));
        }
        r = mu_bound(t, M, detail::parse_rational(mu_s), range, policy);
      }
      emit_all(emit(r, Format::text), emit(r, Format::json), emit(r, Format::csv));
      return 0;
    }
    if (*verify) {
      VerificationJob job;
      job.triplet = parse_triplet(triplet_s);
      job.lo = from_s.empty() ? Integer(1) : parse_integer(from_s);
      job.hi = parse_integer(to_s);
      job.targets = detail::parse_list(targets_s);
      job.limits = limits();
      job.chunk_size = detail::parse_u64(chunk_s, "--chunk");
      job.below_frontier_shortcut = shortcut;
      job.threads = threads;
      job.checkpoint_path = checkpoint_s;
      Checkpoint cp = verify_range(job);
      emit_all(emit(cp, Format::text), emit(cp, Format::json), emit(cp, Format::csv));
      return cp.exceptions.empty() ? 0 : 1;
    }
    if (*resume_c) {
      Checkpoint cp = read_checkpoint_file(checkpoint_s);
      VerificationJob job = job_from_checkpoint(cp, parse_integer(to_s));
      if (!triplet_s.empty()) job.triplet = parse_triplet(triplet_s);
      job.threads = threads;
      job.checkpoint_path = checkpoint_s;
      Checkpoint next = resume(cp, job);
      emit_all(emit(next, Format::text), emit(next, Format::json), emit(next, Format::csv));
      return next.exceptions.empty() ? 0 : 1;
    }
  } catch (const error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace gcollatz::cli
