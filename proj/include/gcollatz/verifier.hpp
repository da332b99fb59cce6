#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "errors.hpp"
#include "integer.hpp"
#include "json.hpp"
#include "triplet.hpp"

namespace gcollatz {

/// Worker count from GCOLLATZ_THREADS, else the hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("GCOLLATZ_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Checkpoint;

struct VerificationJob {
  Triplet triplet;
  Integer lo = 1, hi = 1;
  std::vector<Integer> targets;  // cycle minima
  Limits limits;
  std::uint64_t chunk_size = 1u << 16;
  bool below_frontier_shortcut = false;
  unsigned threads = 0;  // 0: default_threads()
  std::string checkpoint_path;  // written atomically as the frontier advances, and at the end
  // Called under the merge lock each time the frontier advances; returning false stops the run.
  std::function<bool(const Checkpoint&)> progress;
};

struct ExceptionRecord {
  Integer n;
  std::string status;
  friend bool operator==(const ExceptionRecord& a, const ExceptionRecord& b) {
    return a.n == b.n && a.status == b.status;
  }
};

struct Checkpoint {
  int version = 1;
  Triplet triplet;
  Integer lo, hi;
  std::vector<Integer> targets;
  std::uint64_t max_steps = 0;
  Integer max_value;
  bool shortcut = false;
  std::uint64_t chunk_size = 0;
  std::string digest;
  Integer frontier;
  std::vector<ExceptionRecord> exceptions;
  double throughput = 0;  // seeds per second
  double wall_time = 0;   // seconds
};

namespace detail {

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw error(errc::internal_defect, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string job_digest(const Triplet& t, const Integer& lo, std::vector<Integer> targets,
                              std::uint64_t max_steps, const Integer& max_value, bool shortcut) {
  std::sort(targets.begin(), targets.end());
  std::string s = "gcollatz-verify-v1\ntriplet=" + t.str() + "\nlo=" + lo.get_str() + "\ntargets=";
  for (std::size_t i = 0; i < targets.size(); ++i) s += (i ? "," : "") + targets[i].get_str();
  s += "\nmax_steps=" + std::to_string(max_steps) + "\nmax_value=" + max_value.get_str() +
       "\nshortcut=" + (shortcut ? "1" : "0") + "\n";
  return sha256_hex(s);
}

inline std::string checkpoint_digest(const Checkpoint& cp) {
  return job_digest(cp.triplet, cp.lo, cp.targets, cp.max_steps, cp.max_value, cp.shortcut);
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const Checkpoint& cp) {
  nlohmann::json j;
  j["version"] = cp.version;
  j["triplet"] = cp.triplet.str();
  j["lo"] = cp.lo.get_str();
  j["hi"] = cp.hi.get_str();
  nlohmann::json t = nlohmann::json::array();
  for (const auto& x : cp.targets) t.push_back(x.get_str());
  j["targets"] = t;
  j["max_steps"] = std::to_string(cp.max_steps);
  j["max_value"] = cp.max_value.get_str();
  j["shortcut"] = cp.shortcut;
  j["chunk_size"] = std::to_string(cp.chunk_size);
  j["digest"] = cp.digest;
  j["frontier"] = cp.frontier.get_str();
  nlohmann::json e = nlohmann::json::array();
  for (const auto& x : cp.exceptions) e.push_back({{"n", x.n.get_str()}, {"status", x.status}});
  j["exceptions"] = e;
  j["throughput"] = cp.throughput;
  j["wall_time"] = cp.wall_time;
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    Checkpoint cp;
    cp.version = j.at("version").get<int>();
    if (cp.version != 1) throw error(errc::invalid_checkpoint, "unsupported checkpoint version");
    cp.triplet = parse_triplet(j.at("triplet").get<std::string>());
    cp.lo = parse_integer(j.at("lo").get<std::string>());
    cp.hi = parse_integer(j.at("hi").get<std::string>());
    for (const auto& x : j.at("targets")) cp.targets.push_back(parse_integer(x.get<std::string>()));
    cp.max_steps = std::stoull(j.at("max_steps").get<std::string>());
    cp.max_value = parse_integer(j.at("max_value").get<std::string>());
    cp.shortcut = j.at("shortcut").get<bool>();
    cp.chunk_size = std::stoull(j.at("chunk_size").get<std::string>());
    cp.digest = j.at("digest").get<std::string>();
    cp.frontier = parse_integer(j.at("frontier").get<std::string>());
    for (const auto& x : j.at("exceptions"))
      cp.exceptions.push_back({parse_integer(x.at("n").get<std::string>()), x.at("status").get<std::string>()});
    cp.throughput = j.at("throughput").get<double>();
    cp.wall_time = j.at("wall_time").get<double>();
    if (cp.frontier < cp.lo - 1 || cp.frontier > cp.hi)
      throw error(errc::invalid_checkpoint, "frontier outside [lo-1, hi]");
    if (detail::checkpoint_digest(cp) != cp.digest)
      throw error(errc::digest_mismatch, "checkpoint contents do not match its digest");
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::invalid_checkpoint, e.what());
  } catch (const std::logic_error& e) {
    throw error(errc::invalid_checkpoint, e.what());
  }
}

inline Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::invalid_checkpoint, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::invalid_checkpoint, e.what());
  }
  return checkpoint_from_json(j);
}

/// Temp file plus rename, so a reader never sees a half-written checkpoint.
inline void write_checkpoint_file(const Checkpoint& cp, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw error(errc::invalid_checkpoint, "cannot write " + tmp);
    out << checkpoint_to_json(cp).dump(2) << "\n";
    if (!out) throw error(errc::invalid_checkpoint, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

/// What the already-verified region below the job's lo says about a value.
struct Prior {
  bool covers_prefix = false;          // [1, lo) is verified
  std::set<std::uint64_t> exceptions;  // seeds below lo that did not converge
};

class Engine {
 public:
  Engine(const VerificationJob& job, const Prior& prior)
      : job_(job), map_(job.triplet), prior_(prior) {
    if (job.targets.empty()) throw error(errc::invalid_targets, "target set is empty");
    for (const auto& w : job.targets) {
      auto c = w >= 1 ? detect_cycle_from(job.triplet, w, job.limits) : std::nullopt;
      if (!c || c->omega() != w)
        throw error(errc::invalid_targets, w.get_str() + " is not the minimum of a cycle of " + job.triplet.display());
      for (const auto& x : c->elements()) {
        big_targets_.insert(x);
        if (auto v = to_u64(x)) small_targets_.push_back(*v);
      }
    }
    std::sort(small_targets_.begin(), small_targets_.end());
    small_targets_.erase(std::unique(small_targets_.begin(), small_targets_.end()), small_targets_.end());
    tmax_ = small_targets_.back();
    cap64_ = u64_cap(job.limits.max_value);
    auto lo = to_u64(job.lo), hi = to_u64(job.hi);
    if (!lo || !hi || *hi == UINT64_MAX) throw error(errc::invalid_parameters, "seed range must lie below 2^64 - 1");
    lo_ = *lo;
    hi_ = *hi;
    if (job.below_frontier_shortcut && lo_ > 1 && !prior.covers_prefix)
      throw error(errc::shortcut_unsound, "shortcut needs lo = 1 or a checkpoint covering [1, lo)");
    shortcut_ = job.below_frontier_shortcut;
    chunk_ = std::max<std::uint64_t>(1, job.chunk_size);
    nchunks_ = (hi_ - lo_) / chunk_ + 1;
    done_ = std::make_unique<std::atomic<bool>[]>(nchunks_);
    for (std::uint64_t i = 0; i < nchunks_; ++i) done_[i] = false;
    results_.resize(nchunks_);
  }

  /// Runs all chunks; returns the contiguous frontier reached and the merged exceptions up to it.
  std::pair<std::uint64_t, std::vector<ExceptionRecord>> run(unsigned threads,
                                                             const std::function<bool(std::uint64_t, std::uint64_t)>& on_advance) {
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex merge;
    std::uint64_t contiguous = 0;
    auto worker = [&] {
      for (;;) {
        if (stop) return;
        std::uint64_t c = next++;
        if (c >= nchunks_) return;
        process_chunk(c);
        std::lock_guard<std::mutex> g(merge);
        bool advanced = false;
        while (contiguous < nchunks_ && done_[contiguous].load(std::memory_order_acquire)) {
          ++contiguous;
          advanced = true;
        }
        if (advanced && on_advance && !on_advance(frontier_of(contiguous), contiguous)) stop = true;
      }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(nchunks_, 1024))));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    return {frontier_of(contiguous), exceptions_upto(contiguous)};
  }

  std::uint64_t frontier_of(std::uint64_t chunks_done) const {
    if (chunks_done == 0) return lo_ - 1;
    return std::min(hi_, lo_ + chunks_done * chunk_ - 1);
  }

  std::vector<ExceptionRecord> exceptions_upto(std::uint64_t chunks_done) const {
    std::vector<ExceptionRecord> out;
    for (std::uint64_t c = 0; c < chunks_done; ++c)
      for (const auto& [n, s] : results_[c]) out.push_back({from_u64(n), s});
    return out;
  }

 private:
  enum class Seg { converged, dropped, step_cap, value_cap, cycle, overflow };

  const VerificationJob& job_;
  TripletMap map_;
  const Prior& prior_;
  std::vector<std::uint64_t> small_targets_;
  std::set<Integer> big_targets_;
  std::uint64_t tmax_ = 0, cap64_ = 0, lo_ = 0, hi_ = 0, chunk_ = 1, nchunks_ = 0;
  bool shortcut_ = false;
  std::unique_ptr<std::atomic<bool>[]> done_;
  std::vector<std::vector<std::pair<std::uint64_t, std::string>>> results_;

  bool is_target(std::uint64_t x) const {
    return x <= tmax_ && std::binary_search(small_targets_.begin(), small_targets_.end(), x);
  }

  struct SegOut {
    Seg kind = Seg::converged;
    Integer value;  // drop target or cycle minimum
  };

  /// One orbit segment from `start` with a fresh step budget, 64-bit first.
  SegOut segment(std::uint64_t start) const {
    SegOut out;
    if (is_target(start)) return out;
    std::uint64_t x = start, tort = start, power = 1, lam = 0, steps = 0;
    const std::uint64_t max_steps = job_.limits.max_steps;
    for (;;) {
      if (steps >= max_steps) {
        out.kind = Seg::step_cap;
        return out;
      }
      std::uint64_t y = x;
      if (!map_.step(y)) break;
      x = y;
      ++steps;
      ++lam;
      if (is_target(x)) return out;
      if (shortcut_ && x < start) {
        out.kind = Seg::dropped;
        out.value = from_u64(x);
        return out;
      }
      if (x > cap64_) {
        out.kind = Seg::value_cap;
        return out;
      }
      if (x == tort) {
        std::uint64_t m = x, z = x;
        for (std::uint64_t i = 0; i < lam; ++i) {
          map_.step(z);
          m = std::min(m, z);
        }
        out.kind = Seg::cycle;
        out.value = from_u64(m);
        return out;
      }
      if (lam == power) {
        tort = x;
        power <<= 1;
        lam = 0;
      }
    }
    return segment_big(from_u64(start), from_u64(x), steps);
  }

  SegOut segment_big(const Integer& start, Integer x, std::uint64_t steps) const {
    SegOut out;
    Integer tort = x;
    std::uint64_t power = 1, lam = 0;
    const std::uint64_t max_steps = job_.limits.max_steps;
    for (;;) {
      if (steps >= max_steps) {
        out.kind = Seg::step_cap;
        return out;
      }
      map_.step(x);
      ++steps;
      ++lam;
      if (big_targets_.count(x)) return out;
      if (shortcut_ && x < start) {
        out.kind = Seg::dropped;
        out.value = x;
        return out;
      }
      if (x > job_.limits.max_value) {
        out.kind = Seg::value_cap;
        return out;
      }
      if (x == tort) {
        Integer m = x, z = x;
        for (std::uint64_t i = 0; i < lam; ++i) {
          map_.step(z);
          if (z < m) m = z;
        }
        out.kind = Seg::cycle;
        out.value = m;
        return out;
      }
      if (lam == power) {
        tort = x;
        power <<= 1;
        lam = 0;
      }
    }
  }

  /// Known verdict for a value below the seed being processed, if any.
  std::optional<bool> known_converged(std::uint64_t x, std::uint64_t chunk,
                                      const std::vector<std::pair<std::uint64_t, std::string>>& local) const {
    auto in = [x](const std::vector<std::pair<std::uint64_t, std::string>>& v) {
      return std::binary_search(v.begin(), v.end(), std::make_pair(x, std::string()),
                                [](const auto& a, const auto& b) { return a.first < b.first; });
    };
    if (x < lo_) {
      if (!prior_.covers_prefix) return std::nullopt;
      return prior_.exceptions.count(x) == 0;
    }
    std::uint64_t c = (x - lo_) / chunk_;
    if (c == chunk) return !in(local);
    if (done_[c].load(std::memory_order_acquire)) return !in(results_[c]);
    return std::nullopt;
  }

  /// Status of seed n; empty string means converged.
  std::string evaluate(std::uint64_t n, std::uint64_t chunk,
                       const std::vector<std::pair<std::uint64_t, std::string>>& local) const {
    std::uint64_t cur = n;
    std::optional<std::uint64_t> first_drop;
    for (;;) {
      SegOut s = segment(cur);
      switch (s.kind) {
        case Seg::converged:
          return {};
        case Seg::dropped: {
          std::uint64_t x = *to_u64(s.value);
          if (!first_drop) first_drop = x;
          auto k = known_converged(x, chunk, local);
          if (k) return *k ? std::string() : "DescendsTo(" + std::to_string(*first_drop) + ")";
          cur = x;
          continue;
        }
        default:
          break;
      }
      if (first_drop) return "DescendsTo(" + std::to_string(*first_drop) + ")";
      if (s.kind == Seg::step_cap) return "StepCapExceeded";
      if (s.kind == Seg::value_cap) return "ValueCapExceeded";
      return "EnteredCycle(" + s.value.get_str() + ")";
    }
  }

  void process_chunk(std::uint64_t c) {
    std::uint64_t a = lo_ + c * chunk_;
    std::uint64_t b = std::min(hi_, a + chunk_ - 1);
    std::vector<std::pair<std::uint64_t, std::string>> local;
    for (std::uint64_t n = a;; ++n) {
      std::string s = evaluate(n, c, local);
      if (!s.empty()) local.emplace_back(n, std::move(s));
      if (n == b) break;
    }
    results_[c] = std::move(local);
    done_[c].store(true, std::memory_order_release);
  }
};

inline Checkpoint run_job(const VerificationJob& job, const Prior& prior, Checkpoint base) {
  auto t0 = std::chrono::steady_clock::now();
  Engine engine(job, prior);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  auto snapshot = [&](std::uint64_t frontier, std::vector<ExceptionRecord> exc) {
    Checkpoint cp = base;
    cp.frontier = from_u64(frontier);
    cp.exceptions.insert(cp.exceptions.end(), exc.begin(), exc.end());
    cp.wall_time = elapsed();
    Integer done = cp.frontier - job.lo + 1;
    cp.throughput = cp.wall_time > 0 ? done.get_d() / cp.wall_time : 0;
    return cp;
  };
  auto on_advance = [&](std::uint64_t frontier, std::uint64_t chunks) {
    if (job.checkpoint_path.empty() && !job.progress) return true;
    Checkpoint cp = snapshot(frontier, engine.exceptions_upto(chunks));
    if (!job.checkpoint_path.empty()) gcollatz::write_checkpoint_file(cp, job.checkpoint_path);
    return job.progress ? job.progress(cp) : true;
  };
  unsigned threads = job.threads ? job.threads : default_threads();
  auto [frontier, exc] = engine.run(threads, on_advance);
  Checkpoint cp = snapshot(frontier, std::move(exc));
  if (!job.checkpoint_path.empty()) gcollatz::write_checkpoint_file(cp, job.checkpoint_path);
  return cp;
}

inline Checkpoint echo(const VerificationJob& job) {
  Checkpoint cp;
  cp.triplet = job.triplet;
  cp.lo = job.lo;
  cp.hi = job.hi;
  cp.targets = job.targets;
  std::sort(cp.targets.begin(), cp.targets.end());
  cp.max_steps = job.limits.max_steps;
  cp.max_value = job.limits.max_value;
  cp.shortcut = job.below_frontier_shortcut;
  cp.chunk_size = job.chunk_size;
  cp.digest = job_digest(job.triplet, job.lo, job.targets, job.limits.max_steps, job.limits.max_value,
                         job.below_frontier_shortcut);
  cp.frontier = job.lo - 1;
  return cp;
}

}  // namespace detail

inline Checkpoint verify_range(const VerificationJob& job) {
  job.limits.validate();
  if (job.lo < 1 || job.lo > job.hi) throw error(errc::invalid_parameters, "need 1 <= lo <= hi");
  return detail::run_job(job, detail::Prior{}, detail::echo(job));
}

/// Rebuilds the job a checkpoint describes, with the range ending at `hi`.
inline VerificationJob job_from_checkpoint(const Checkpoint& cp, const Integer& hi) {
  VerificationJob job;
  job.triplet = cp.triplet;
  job.lo = cp.lo;
  job.hi = hi;
  job.targets = cp.targets;
  job.limits.max_steps = cp.max_steps;
  job.limits.max_value = cp.max_value;
  job.below_frontier_shortcut = cp.shortcut;
  job.chunk_size = cp.chunk_size;
  return job;
}

/// Continues `cp` up to `supplied.hi`. The supplied job must describe the same campaign.
inline Checkpoint resume(const Checkpoint& cp, const VerificationJob& supplied) {
  if (detail::checkpoint_digest(cp) != cp.digest)
    throw error(errc::digest_mismatch, "checkpoint contents do not match its digest");
  auto mine = detail::job_digest(supplied.triplet, supplied.lo, supplied.targets, supplied.limits.max_steps,
                                 supplied.limits.max_value, supplied.below_frontier_shortcut);
  if (mine != cp.digest) throw error(errc::digest_mismatch, "supplied job does not match the checkpoint");
  if (supplied.hi <= cp.frontier)
    throw error(errc::nothing_to_do, "frontier " + cp.frontier.get_str() + " already covers " + supplied.hi.get_str());
  VerificationJob rest = supplied;
  rest.lo = cp.frontier + 1;
  rest.limits.validate();
  detail::Prior prior;
  prior.covers_prefix = cp.lo == 1;
  for (const auto& e : cp.exceptions)
    if (auto v = to_u64(e.n)) prior.exceptions.insert(*v);
  Checkpoint base = cp;
  base.hi = supplied.hi;
  // Throughput and wall time describe this leg only.
  return detail::run_job(rest, prior, base);
}

inline Checkpoint resume(const Checkpoint& cp, const Integer& hi_new, unsigned threads = 0) {
  VerificationJob job = job_from_checkpoint(cp, hi_new);
  job.threads = threads;
  return resume(cp, job);
}

}  // namespace gcollatz
