#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "gcollatz/gcollatz.hpp"

using namespace gcollatz;

namespace {

Triplet T(long d, long a, long b, int k) { return Triplet{d, a, b, k}; }

VerificationJob job(const Triplet& t, long lo, long hi, std::vector<Integer> targets, bool shortcut = false,
                    unsigned threads = 1) {
  VerificationJob j;
  j.triplet = t;
  j.lo = lo;
  j.hi = hi;
  j.targets = std::move(targets);
  j.below_frontier_shortcut = shortcut;
  j.threads = threads;
  j.chunk_size = 4096;
  return j;
}

template <class F>
errc code_of(F&& f) {
  try {
    f();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gcollatz::error thrown";
  return errc::internal_defect;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gcollatz_" + name + "_" + std::to_string(::getpid()) + ".json"))
      .string();
}

// Small caps make (8,12,4)+ seeds that head for Omega(67) or run long show up as exceptions.
VerificationJob partial_job(bool shortcut, unsigned threads) {
  auto j = job(T(8, 12, 4, 1), 1, 30000, {1}, shortcut, threads);
  j.limits.max_steps = 400;
  j.chunk_size = 1000;
  return j;
}

}  // namespace

TEST(Verify, ConvergesEverywhere) {
  auto a = verify_range(job(T(10, 12, 8, 1), 1, 200000, {4}));
  EXPECT_EQ(a.frontier, 200000);
  EXPECT_TRUE(a.exceptions.empty());
  auto b = verify_range(job(T(2, 3, 1, 1), 1, 1000000, {1}, true));
  EXPECT_EQ(b.frontier, 1000000);
  EXPECT_TRUE(b.exceptions.empty());
  EXPECT_GT(b.throughput, 0);
}

TEST(Verify, InvalidTargets) {
  EXPECT_EQ(code_of([] { verify_range(job(T(2, 9, 1, 1), 1, 100, {})); }), errc::invalid_targets);
  EXPECT_EQ(code_of([] { verify_range(job(T(2, 3, 1, 1), 1, 100, {2})); }), errc::invalid_targets);  // 2 is not a minimum
  EXPECT_EQ(code_of([] { verify_range(job(T(2, 3, 1, 1), 1, 100, {3})); }), errc::invalid_targets);
}

TEST(Verify, ShortcutNeedsCoveredPrefix) {
  EXPECT_EQ(code_of([] { verify_range(job(T(2, 3, 1, 1), 50, 100, {1}, true)); }), errc::shortcut_unsound);
  EXPECT_EQ(code_of([] { verify_range(job(T(2, 3, 1, 1), 100, 50, {1})); }), errc::invalid_parameters);
}

TEST(Verify, ExceptionsCarryStatus) {
  auto cp = verify_range(job(T(8, 12, 4, 1), 1, 2000, {1}));
  ASSERT_FALSE(cp.exceptions.empty());
  bool saw67 = false;
  for (const auto& e : cp.exceptions) {
    if (e.n == 67) {
      EXPECT_EQ(e.status, "EnteredCycle(67)");
      saw67 = true;
    }
  }
  EXPECT_TRUE(saw67);
  for (std::size_t i = 1; i < cp.exceptions.size(); ++i) EXPECT_LT(cp.exceptions[i - 1].n, cp.exceptions[i].n);

  auto capped = job(T(2, 3, 1, 1), 1, 100, {1});
  capped.limits.max_steps = 20;
  auto c = verify_range(capped);
  bool saw27 = false;
  for (const auto& e : c.exceptions)
    if (e.n == 27) saw27 = e.status == "StepCapExceeded";
  EXPECT_TRUE(saw27);
}

TEST(Verify, ShortcutSoundness) {
  for (auto [t, w] : {std::pair{T(10, 12, 8, 1), 4L}, std::pair{T(2, 3, 1, 1), 1L}}) {
    auto off = verify_range(job(t, 1, 100000, {w}, false));
    auto on = verify_range(job(t, 1, 100000, {w}, true));
    EXPECT_EQ(off.exceptions, on.exceptions);
    EXPECT_EQ(off.frontier, on.frontier);
  }
  // With exceptions present, every seed that descends into an exception is itself an exception.
  auto off = verify_range(partial_job(false, 1));
  auto on = verify_range(partial_job(true, 1));
  std::set<Integer> a, b;
  for (const auto& e : off.exceptions) a.insert(e.n);
  for (const auto& e : on.exceptions) b.insert(e.n);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST(Verify, ScheduleIndependence) {
  auto one = verify_range(partial_job(true, 1));
  for (unsigned threads : {2u, 3u, 8u}) {
    auto many = verify_range(partial_job(true, threads));
    EXPECT_EQ(one.exceptions, many.exceptions) << threads;
    EXPECT_EQ(one.frontier, many.frontier);
  }
  auto off1 = verify_range(partial_job(false, 1));
  auto off4 = verify_range(partial_job(false, 4));
  EXPECT_EQ(off1.exceptions, off4.exceptions);
}

TEST(Verify, PowerTwoInventories) {
  for (unsigned p = 0; p <= 8; ++p)
    for (unsigned q = 0; q <= p; ++q) {
      auto s = build_power2_family(p, q);
      VerificationJob j;
      j.triplet = s.triplet;
      j.hi = 100000;
      for (const auto& c : s.cycles) j.targets.push_back(c.omega());
      j.below_frontier_shortcut = true;
      auto cp = verify_range(j);
      EXPECT_TRUE(cp.exceptions.empty()) << s.triplet.display() << " first " << cp.exceptions.front().n << " "
                                         << cp.exceptions.front().status;
    }
}

TEST(Checkpoint, JsonRoundTrip) {
  auto cp = verify_range(partial_job(true, 1));
  auto back = checkpoint_from_json(checkpoint_to_json(cp));
  EXPECT_EQ(back.triplet, cp.triplet);
  EXPECT_EQ(back.frontier, cp.frontier);
  EXPECT_EQ(back.exceptions, cp.exceptions);
  EXPECT_EQ(back.digest, cp.digest);
  EXPECT_EQ(back.targets, cp.targets);
  EXPECT_EQ(back.max_value, cp.max_value);
}

TEST(Checkpoint, ResumeEqualsOneShot) {
  auto full = verify_range(partial_job(true, 2));

  auto first = partial_job(true, 2);
  first.hi = 12345;
  std::string path = temp_path("resume");
  first.checkpoint_path = path;
  verify_range(first);
  auto loaded = read_checkpoint_file(path);
  EXPECT_EQ(loaded.frontier, 12345);
  auto rest = resume(loaded, 30000, 3);
  EXPECT_EQ(rest.frontier, full.frontier);
  EXPECT_EQ(rest.exceptions, full.exceptions);
  EXPECT_EQ(rest.hi, 30000);
  std::filesystem::remove(path);

  // Two plain legs without shortcut as well.
  auto a = verify_range(job(T(10, 12, 8, 1), 1, 1000000, {4}));
  auto b0 = job(T(10, 12, 8, 1), 1, 500000, {4});
  auto b = resume(verify_range(b0), 1000000);
  EXPECT_EQ(a.frontier, b.frontier);
  EXPECT_EQ(a.exceptions, b.exceptions);
}

TEST(Checkpoint, Rejections) {
  auto cp = verify_range(job(T(10, 12, 8, 1), 1, 10000, {4}));
  EXPECT_EQ(code_of([&] { resume(cp, 10000); }), errc::nothing_to_do);

  auto altered = job_from_checkpoint(cp, 20000);
  altered.triplet = T(2, 3, 1, 1);
  altered.targets = {1};
  EXPECT_EQ(code_of([&] { resume(cp, altered); }), errc::digest_mismatch);

  auto tampered = cp;
  tampered.max_steps = 7;
  EXPECT_EQ(code_of([&] { resume(tampered, 20000); }), errc::digest_mismatch);

  auto j = checkpoint_to_json(cp);
  j["frontier"] = "999999999";
  EXPECT_EQ(code_of([&] { checkpoint_from_json(j); }), errc::invalid_checkpoint);
  auto k = checkpoint_to_json(cp);
  k["version"] = 99;
  EXPECT_EQ(code_of([&] { checkpoint_from_json(k); }), errc::invalid_checkpoint);
}

TEST(Checkpoint, ProgressCanStop) {
  auto j = job(T(10, 12, 8, 1), 1, 100000, {4});
  j.chunk_size = 1000;
  int calls = 0;
  j.progress = [&](const Checkpoint& cp) {
    ++calls;
    return cp.frontier < 5000;
  };
  auto cp = verify_range(j);
  EXPECT_GE(cp.frontier, 5000);
  EXPECT_LT(cp.frontier, 100000);
  EXPECT_GT(calls, 0);
  auto rest = resume(cp, 100000);
  EXPECT_EQ(rest.frontier, 100000);
  EXPECT_TRUE(rest.exceptions.empty());
}

TEST(Checkpoint, Digest) {
  auto cp = verify_range(job(T(10, 12, 8, 1), 1, 100, {4}));
  EXPECT_EQ(cp.digest.size(), 64u);
  EXPECT_EQ(detail::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
