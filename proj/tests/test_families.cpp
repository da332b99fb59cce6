#include <gtest/gtest.h>

#include "family_draws.hpp"
#include "gcollatz/gcollatz.hpp"

using namespace gcollatz;

namespace {

Triplet T(long d, long a, long b, int k) { return Triplet{d, a, b, k}; }

std::vector<Integer> ints(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

std::vector<Integer> minima(const PredictedCycleSet& s) {
  std::vector<Integer> out;
  for (const auto& c : s.cycles) out.push_back(c.omega());
  std::sort(out.begin(), out.end());
  return out;
}

const Cycle& find(const PredictedCycleSet& s, long omega) {
  for (const auto& c : s.cycles)
    if (c.omega() == omega) return c;
  throw std::runtime_error("missing cycle " + std::to_string(omega));
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

}  // namespace

TEST(Thm31, CaseOneAndTwoOne) {
  auto s = build_thm31({3, 3, 2, 1, 1, 1});
  EXPECT_EQ(s.triplet, T(3, 8, 19, 1));
  EXPECT_EQ(minima(s), ints({1, 2, 19, 38}));
  EXPECT_EQ(find(s, 1).length(), 3u);
  EXPECT_EQ(find(s, 2).elements(), ints({2, 18, 6}));
  EXPECT_EQ(find(s, 19).elements(), ints({19, 57}));
  EXPECT_EQ(find(s, 38).length(), 2u);
}

TEST(Thm31, NegativeBeta) {
  auto s = build_thm31({3, 2, 3, 1, 1, -1});
  EXPECT_EQ(s.triplet, T(3, 28, -19, 1));
  EXPECT_EQ(minima(s), ints({1, 2, 19, 38}));
  EXPECT_EQ(find(s, 1).length(), 2u);
  EXPECT_EQ(find(s, 2).length(), 2u);
  EXPECT_EQ(find(s, 19).elements(), ints({19, 171, 57}));
  EXPECT_EQ(find(s, 38).length(), 3u);
}

TEST(Thm31, CaseTwoTwo) {
  auto s = build_thm31({12, 3, 2, 10, 1, 1});
  EXPECT_EQ(s.triplet, T(12, 134, 1594, 1));
  EXPECT_EQ(s.cycles.size(), 13u);
  for (long r = 1; r <= 11; ++r) EXPECT_EQ(find(s, r).elements(), ints({r, 144 * r, 12 * r}));
  EXPECT_EQ(find(s, 797).elements(), ints({797, 9564}));
  EXPECT_EQ(find(s, 1594).length(), 2u);
}

TEST(Thm31, NoCaseApplies) {
  // kappa0 = kappa1 = -1: alpha = 3^2 + 1 = 10, beta = -(3 - 10) = 7, so kappa1*beta < 0.
  EXPECT_EQ(code_of([] { build_thm31({3, 1, 2, 1, -1, -1}); }), errc::no_case_applies);
}

TEST(Thm31, LengthsFollowTheCase) {
  for (const auto& d : draws::thm31(60, 31)) {
    auto& s = d.set;
    for (const auto& c : s.cycles) ASSERT_TRUE(draws::closes(s.triplet, c)) << d.label;
  }
}

TEST(Thm32, FiveSixExample) {
  auto s = build_thm32({5, 2, 1});
  EXPECT_EQ(s.triplet, T(5, 6, 3089, 1));
  EXPECT_EQ(minima(s), ints({11, 16, 17, 21, 22, 23, 26, 27, 28, 29, 31, 32, 33, 34, 37, 38, 39,
                             43, 44, 49, 56, 62, 68, 74, 81, 87, 93, 99, 106, 112, 118, 124, 3089}));
  for (const auto& c : s.cycles) EXPECT_EQ(c.length(), 5u);
  EXPECT_GE(s.generator_count, 2u * 16u);
  EXPECT_EQ(s.lower_bound_on_order, 33u);
}

TEST(Thm32, NegativeBetaSkipsOmegaBeta) {
  auto s = build_thm32({2, 1, 1});
  EXPECT_EQ(s.triplet, T(2, 3, -1, 1));
  EXPECT_EQ(minima(s), ints({5}));
  EXPECT_EQ(find(s, 5).elements(), ints({5, 7, 10}));
  auto fixed = detect_cycle_from(s.triplet, 1);
  ASSERT_TRUE(fixed);
  EXPECT_EQ(fixed->elements(), ints({1}));
}

TEST(Thm32, NuOneAboveOne) {
  auto s = build_thm32({5, 2, 3});
  for (const auto& c : s.cycles) EXPECT_EQ(c.length(), 7u);
  EXPECT_FALSE(std::any_of(s.cycles.begin(), s.cycles.end(), [&](const Cycle& c) {
    return c.omega() == s.triplet.beta;
  }));
}

TEST(Thm32, CountsAndLengths) {
  for (const auto& d : draws::thm32(40, 32)) {
    auto& s = d.set;
    unsigned long dd = s.triplet.d.get_ui();
    unsigned long mu0 = std::stoul(s.params[2].second), nu1 = std::stoul(s.params[1].second);
    EXPECT_GE(s.generator_count, mu0 * (dd - 1) * (dd - 1)) << d.label;
    for (const auto& c : s.cycles) {
      ASSERT_TRUE(draws::closes(s.triplet, c)) << d.label;
      if (c.omega() != s.triplet.beta) EXPECT_EQ(c.length(), 2 * mu0 + nu1) << d.label;
    }
  }
}

TEST(Scale, Examples) {
  auto base = build_thm32({5, 2, 1});
  auto s = scale_cycles(base.triplet, base.cycles, 121);
  EXPECT_EQ(s.triplet, T(5, 6, 373769, 1));
  EXPECT_EQ(s.cycles.size(), 33u);
  EXPECT_EQ(find(s, 1331).length(), 5u);
  EXPECT_EQ(find(s, 1936).length(), 5u);
  EXPECT_EQ(find(s, 373769).length(), 5u);

  auto collatz = build_mersenne(2);
  auto id = scale_cycles(collatz.triplet, collatz.cycles, 1);
  EXPECT_EQ(id.triplet, collatz.triplet);
  EXPECT_EQ(id.cycles, collatz.cycles);

  auto five = scale_cycles(collatz.triplet, collatz.cycles, 5);
  EXPECT_EQ(five.triplet, T(2, 3, 5, 1));
  EXPECT_EQ(five.cycles.at(0).elements(), ints({5, 10}));

  EXPECT_EQ(code_of([&] { scale_cycles(base.triplet, base.cycles, 7); }), errc::invalid_parameters);
}

TEST(Scale, CommutesWithTheMap) {
  for (auto [d, a, b0] : {std::tuple{5L, 6L, 3089L}, {2L, 3L, 1L}, {3L, 8L, 19L}, {4L, 10L, 54L}})
    for (long j : {1L, 2L, 7L}) {
      long a0 = 1 + j * d;
      Triplet base = T(d, a, b0, 1), big = T(d, a, a0 * b0, 1);
      TripletMap tb(base), tg(big);
      for (long n = 1; n <= 1000; ++n) ASSERT_EQ(tg(Integer(a0 * n)), a0 * tb(Integer(n))) << d << " " << n;
    }
}

TEST(DPlusOne, Examples) {
  auto fixed = build_dplus1(4, 1);
  EXPECT_EQ(fixed.triplet, T(4, 5, -1, 1));
  EXPECT_EQ(minima(fixed), ints({1, 2, 3}));
  for (const auto& c : fixed.cycles) EXPECT_EQ(c.length(), 1u);

  EXPECT_EQ(build_dplus1(3, -1).cycles.at(0).elements(), ints({1, 2, 3}));
  auto classic = build_dplus1(2, -1);
  EXPECT_EQ(classic.triplet, T(2, 3, 1, -1));
  EXPECT_EQ(classic.cycles.at(0).elements(), ints({1, 2}));
}

TEST(Mersenne, Examples) {
  EXPECT_EQ(build_mersenne(2).triplet, T(2, 3, 1, 1));
  EXPECT_EQ(build_mersenne(2).cycles.at(0).length(), 2u);
  auto m3 = build_mersenne(3);
  EXPECT_EQ(m3.triplet, T(4, 7, 1, 1));
  EXPECT_EQ(m3.cycles.at(0).elements(), ints({1, 2, 4}));
  auto m5 = build_mersenne(5);
  EXPECT_EQ(m5.triplet, T(16, 31, 1, 1));
  EXPECT_EQ(m5.cycles.at(0).length(), 5u);
}

TEST(Power2, Examples) {
  auto a = build_power2_family(0, 0);
  EXPECT_EQ(a.triplet, T(2, 3, 1, 1));
  EXPECT_EQ(a.cycles.at(0).length(), 2u);

  auto b = build_power2_family(3, 1);
  EXPECT_EQ(b.triplet, T(10, 12, 8, 1));
  EXPECT_EQ(b.cycles.at(0).elements(), ints({4, 8, 16, 24, 32, 40}));

  auto c = build_power2_family(2, 2);
  EXPECT_EQ(c.triplet, T(8, 12, 4, 1));
  EXPECT_EQ(find(c, 1).elements(), ints({1, 2, 4, 8}));
  EXPECT_EQ(find(c, 67).elements(), ints({67, 102, 156, 236, 356, 536}));
}

TEST(Power2, ExceptionalTable) {
  for (const auto& x : power2_exceptions()) {
    auto s = build_power2_family(x.p, x.q);
    EXPECT_EQ(find(s, static_cast<long>(x.omega)).length(), x.length) << x.p << "," << x.q;
  }
  EXPECT_EQ(power2_triplet(5, 2), T(36, 40, 32, 1));
  EXPECT_EQ(build_power2_family(5, 2).cycles.size(), 3u);
}

TEST(Power2, GenericCycleLength) {
  for (unsigned p = 0; p <= 12; ++p)
    for (unsigned q = 0; q <= p; ++q) {
      auto s = build_power2_family(p, q);
      Integer w = pow_ui(2, p - q);
      EXPECT_EQ(find(s, w.get_si()).length(), (std::size_t{1} << (p - q)) + q + 1) << p << "," << q;
    }
}

TEST(Families, SpecStrings) {
  EXPECT_EQ(build_family("thm31:d=3,nu0=3,nu1=2,delta=1,k0=+,k1=+").triplet, T(3, 8, 19, 1));
  EXPECT_EQ(build_family("thm32:d=5,nu1=1,mu0=2").triplet, T(5, 6, 3089, 1));
  EXPECT_EQ(build_family("dplus1:d=4,k=+").triplet, T(4, 5, -1, 1));
  EXPECT_EQ(build_family("mersenne:p=5").triplet, T(16, 31, 1, 1));
  EXPECT_EQ(build_family("power2:p=3,q=1").triplet, T(10, 12, 8, 1));
  auto s = build_family("scale:a0=121,base=thm32:d=5,nu1=1,mu0=2");
  EXPECT_EQ(s.triplet, T(5, 6, 373769, 1));
  EXPECT_EQ(s.cycles.size(), 33u);
  EXPECT_EQ(code_of([] { build_family("thm99:d=3"); }), errc::invalid_parameters);
  EXPECT_EQ(code_of([] { build_family("thm32:d=5"); }), errc::invalid_parameters);
}

TEST(Families, RandomDrawsClose) {
  using Gen = std::vector<draws::Draw> (*)(std::size_t, std::uint64_t);
  for (Gen g : {Gen(draws::scale), Gen(draws::dplus1), Gen(draws::mersenne), Gen(draws::power2)}) {
    auto ds = g(40, 99);
    EXPECT_EQ(ds.size(), 40u);
    for (const auto& d : ds)
      for (const auto& c : d.set.cycles) ASSERT_TRUE(draws::closes(d.set.triplet, c)) << d.label;
  }
}
