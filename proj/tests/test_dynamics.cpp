#include <gtest/gtest.h>

#include "gcollatz/gcollatz.hpp"

using namespace gcollatz;

namespace {

Triplet T(long d, long a, long b, int k) { return Triplet{d, a, b, k}; }

std::vector<Integer> ints(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

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

void expect_closed(const Triplet& t, const Cycle& c) {
  TripletMap m(t);
  Integer x = c.omega();
  for (std::size_t k = 1; k <= c.length(); ++k) {
    m.step(x);
    if (k < c.length()) ASSERT_NE(x, c.omega()) << "proper sub-period " << k << " in " << t.display();
  }
  EXPECT_EQ(x, c.omega()) << t.display();
  EXPECT_EQ(c.omega(), *std::min_element(c.elements().begin(), c.elements().end()));
  EXPECT_GE(c.kbar(), 1u);
  EXPECT_LE(c.kbar(), c.length());
}

}  // namespace

TEST(Limits, Validation) {
  Limits l;
  l.max_steps = 0;
  EXPECT_EQ(code_of([&] { l.validate(); }), errc::invalid_parameters);
  Limits v;
  v.max_value = 0;
  EXPECT_EQ(code_of([&] { v.validate(); }), errc::invalid_parameters);
}

TEST(Trace, EntersKnownCycle) {
  Limits l;
  l.known_cycle_minima = {1};
  l.record_path = true;
  auto tr = trace(T(2, 3, 1, 1), 6, l);
  EXPECT_EQ(tr.terminal, Terminal::entered_known_cycle);
  ASSERT_TRUE(tr.known_minimum);
  EXPECT_EQ(*tr.known_minimum, 1);
  EXPECT_EQ(tr.path, ints({6, 3, 5, 8, 4, 2, 1}));
  EXPECT_EQ(tr.peak, 8);
  EXPECT_EQ(tr.visited_count, 6u);
}

TEST(Trace, DetectsCycle) {
  auto tr = trace(T(3, 8, 19, 1), 2, Limits{});
  EXPECT_EQ(tr.terminal, Terminal::cycle_detected);
  ASSERT_TRUE(tr.cycle);
  EXPECT_EQ(tr.cycle->elements(), ints({2, 18, 6}));
}

TEST(Trace, StepCap) {
  Limits l;
  l.max_steps = 2;
  auto tr = trace(T(2, 3, 1, 1), 7, l);
  EXPECT_EQ(tr.terminal, Terminal::step_cap_exceeded);
  EXPECT_LE(tr.visited_count, 2u);
}

TEST(Trace, ValueCap) {
  Limits l;
  l.max_value = 100;
  auto tr = trace(T(2, 3, 1, 1), 27, l);
  EXPECT_EQ(tr.terminal, Terminal::value_cap_exceeded);
}

TEST(DetectCycle, Examples) {
  auto c = detect_cycle_from(T(10, 12, 8, 1), 25);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->elements(), ints({4, 8, 16, 24, 32, 40}));

  auto c7 = detect_cycle_from(T(3, 4, 1, -1), 7);
  ASSERT_TRUE(c7);
  EXPECT_EQ(c7->omega(), 7);
  EXPECT_EQ(c7->length(), 9u);
  EXPECT_EQ(c7->elements(), ints({7, 10, 14, 19, 26, 35, 47, 63, 21}));

  Limits l;
  l.max_steps = 1000;
  l.max_value = pow_ui(10, 18);
  EXPECT_FALSE(detect_cycle_from(T(2, 9, 1, 1), 1, l));
}

TEST(Canonicalize, Examples) {
  auto a = canonicalize(T(3, 8, 19, 1), ints({57, 19}));
  EXPECT_EQ(a.omega(), 19);
  EXPECT_EQ(a.elements(), ints({19, 57}));
  EXPECT_EQ(a.length(), 2u);

  auto b = canonicalize(T(4, 5, -1, 1), ints({1}));
  EXPECT_EQ(b.omega(), 1);
  EXPECT_EQ(b.length(), 1u);

  auto c = canonicalize(T(3, 4, 1, -1), ints({2, 3, 1}));
  EXPECT_EQ(c.elements(), ints({1, 2, 3}));
  EXPECT_EQ(c.length(), 3u);

  EXPECT_EQ(code_of([] { canonicalize(T(3, 8, 19, 1), ints({19, 58})); }), errc::not_a_cycle);
  EXPECT_EQ(code_of([] { canonicalize(T(3, 8, 19, 1), ints({19, 57, 19, 57})); }), errc::not_a_cycle);
}

TEST(Enumerate, Examples) {
  auto a = enumerate_cycles(T(3, 8, 19, 1), 1, 200, Limits{});
  std::vector<Integer> w;
  for (auto& c : a) w.push_back(c.omega());
  EXPECT_EQ(w, ints({19, 38, 1, 2}));  // sorted by (L, omega)

  auto b = enumerate_cycles(T(5, 6, 4, 1), 1, 100, Limits{});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].omega(), 4);
  EXPECT_EQ(b[0].length(), 5u);
  EXPECT_EQ(b[0].kbar(), 4u);

  auto c = enumerate_cycles(T(8, 12, 4, 1), 1, 600, Limits{});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].omega(), 1);
  EXPECT_EQ(c[0].length(), 4u);
  EXPECT_EQ(c[1].omega(), 67);
  EXPECT_EQ(c[1].length(), 6u);
  EXPECT_EQ(c[1].elements(), ints({67, 102, 156, 236, 356, 536}));
}

TEST(Enumerate, FourTenFiftyFourInventory) {
  // Frozen from an independent brute-force iteration over seeds 1..40000.
  const std::vector<std::pair<long, std::size_t>> expected = {
      {9, 2},     {18, 2},    {27, 2},     {1, 3},      {2, 3},      {3, 3},     {477, 5},   {549, 5},   {693, 5},
      {702, 5},   {774, 5},   {837, 5},    {918, 5},    {927, 5},    {999, 5},   {1062, 5},  {1143, 5},  {1287, 5},
      {6, 6},     {639, 10},  {7, 15},     {678, 15},   {189, 20},   {342, 25},  {78, 27},   {93, 27},   {198, 30},
      {237, 30},  {13, 36},   {5967, 98},  {1518, 108}, {214, 246},  {25983, 583}, {31662, 583}, {4174, 681},
      {14927, 681}};
  auto cs = enumerate_cycles(T(4, 10, 54, 1), 1, 40000, Limits{});
  ASSERT_EQ(cs.size(), expected.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    EXPECT_EQ(cs[i].omega(), expected[i].first) << i;
    EXPECT_EQ(cs[i].length(), expected[i].second) << i;
    expect_closed(T(4, 10, 54, 1), cs[i]);
  }
  // 33534 sits on a tail that ends in the cycle with minimum 918.
  EXPECT_FALSE(std::any_of(cs.begin(), cs.end(), [](const Cycle& c) { return c.omega() == 33534; }));
  auto c = detect_cycle_from(T(4, 10, 54, 1), 33534);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->omega(), 918);
}

TEST(Enumerate, DeterministicAcrossThreads) {
  auto t = T(4, 10, 54, 1);
  std::vector<Integer> u1, u4;
  auto one = enumerate_cycles(t, 1, 20000, Limits{}, &u1, 1);
  auto four = enumerate_cycles(t, 1, 20000, Limits{}, &u4, 4);
  auto again = enumerate_cycles(t, 1, 20000, Limits{}, nullptr, 3);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, again);
  EXPECT_EQ(u1, u4);
}

TEST(Enumerate, RejectsBadRange) {
  EXPECT_EQ(code_of([] { enumerate_cycles(T(2, 3, 1, 1), 10, 5, Limits{}); }), errc::invalid_parameters);
  EXPECT_EQ(code_of([] { enumerate_cycles(T(2, 3, 1, 1), 0, 5, Limits{}); }), errc::invalid_parameters);
}

TEST(Enumerate, UndecidedSeedsReported) {
  Limits l;
  l.max_steps = 1000;
  l.max_value = pow_ui(10, 18);
  std::vector<Integer> und;
  auto cs = enumerate_cycles(T(2, 9, 1, 1), 1, 50, l, &und);
  EXPECT_FALSE(und.empty());
  for (auto& c : cs) expect_closed(T(2, 9, 1, 1), c);
}

TEST(Cycle, RotationInvariance) {
  const std::vector<Triplet> ts = {T(4, 10, 54, 1), T(3, 4, 1, -1), T(8, 12, 4, 1), T(12, 134, 1594, 1)};
  for (const auto& t : ts) {
    for (const auto& c : enumerate_cycles(t, 1, 3000, Limits{})) {
      expect_closed(t, c);
      for (const auto& x : c.elements()) {
        auto again = detect_cycle_from(t, x);
        ASSERT_TRUE(again);
        EXPECT_EQ(*again, c);
      }
    }
  }
}

TEST(Classify, Examples) {
  auto t = T(2, 3, 1, 1);
  auto one = *detect_cycle_from(t, 1);
  auto a = classify_seed(t, 27, {one});
  EXPECT_EQ(a.kind, SeedLabel::converged);
  EXPECT_EQ(*a.omega, 1);

  auto u = T(10, 12, 8, 1);
  auto four = *detect_cycle_from(u, 4);
  auto b = classify_seed(u, 1000000, {four});
  EXPECT_EQ(b.kind, SeedLabel::converged);
  EXPECT_EQ(*b.omega, 4);

  Limits small;
  small.max_steps = 200;
  small.max_value = pow_ui(10, 12);
  auto c = classify_seed(T(2, 9, 1, 1), 5, {}, small);
  EXPECT_EQ(c.kind, SeedLabel::undecided);
  EXPECT_FALSE(c.omega);
}

TEST(ClosedForm, Examples) {
  // d=3, nu1=2, mu0=2: alpha = 10, beta = 3^6 - 100 = 629, T(n_1) = beta*(alpha + 3 + 1).
  EXPECT_EQ(closed_form_iterate(3, 2, 2, 1, 1), Integer(629) * 14);
  Triplet t{3, 10, 629, 1};
  EXPECT_EQ(closed_form_iterate(3, 2, 2, 1, 1), apply_map(t, Integer(629) * 4));
  EXPECT_EQ(code_of([] { closed_form_iterate(2, 2, 2, 2, 0); }), errc::invalid_parameters);
  EXPECT_EQ(code_of([] { closed_form_iterate(2, 1, 2, 2, 1); }), errc::invalid_parameters);
  EXPECT_EQ(code_of([] { closed_form_iterate(2, 2, 2, 2, 3); }), errc::invalid_parameters);
  // Outside l <= nu1 the residue pattern behind the formula breaks; the iterate is still well defined.
  EXPECT_EQ(code_of([] { closed_form_iterate(2, 2, 2, 3, 3); }), errc::invalid_parameters);
  EXPECT_EQ(apply_map_iter(Triplet{2, 5, 39, 1}, Integer(39) * 9, 3), 1131);
}

TEST(ClosedForm, AgreesWithIteration) {
  int checked = 0;
  for (unsigned long d : {2ul, 3ul})
    for (unsigned long nu1 : {2ul, 3ul})
      for (unsigned long mu0 : {2ul, 3ul}) {
        Integer alpha = pow_ui(d, nu1) + 1;
        Integer beta = pow_ui(d, 2 * mu0 + nu1) - alpha * alpha;
        Triplet t{Integer(d), alpha, beta, 1};
        for (unsigned long k = 1; k <= 5; ++k)
          for (unsigned long l = 1; l <= std::min(k, nu1); ++l) {
            Integer nk = beta * (pow_ui(d, k) + 1);
            EXPECT_EQ(closed_form_iterate(d, nu1, mu0, k, l), apply_map_iter(t, nk, l))
                << d << " " << nu1 << " " << mu0 << " " << k << " " << l;
            ++checked;
          }
      }
  EXPECT_GT(checked, 50);
}
