#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace netstab;
using namespace testsupport;

TEST_CASE("objective decomposition on the shipped fixtures", "[recovery]") {
  const SystemPattern p = load_p11();
  const CandidatePattern cand = load_cand6();
  const RecoveryObjective obj = make_recovery_objective(p, cand);
  CHECK(obj.base == 7);
  CHECK(obj.base_matching == 9);
  CHECK_FALSE(obj.approximate);
  // each unreachable component exposes one recoverable dimension
  CHECK(obj.scc_blocks == std::vector<std::vector<int>>{{1}, {2}});
  REQUIRE(obj.coverage.size() == 6);
  CHECK(obj.coverage[0].empty());                     // -> x2, reachable
  CHECK(obj.coverage[1] == std::vector<int>{1});      // -> x3
  CHECK(obj.coverage[2] == std::vector<int>{2});      // -> x11
  CHECK(obj.coverage[3].empty());                     // -> x5, reachable
  CHECK(obj.coverage[4] == std::vector<int>{1});      // -> x6
  CHECK(obj.coverage[5] == std::vector<int>{2});      // -> x8
}

TEST_CASE("objective values on the shipped fixtures", "[recovery]") {
  const SystemPattern p = load_p11();
  const CandidatePattern cand = load_cand6();
  CHECK(recovery_value(p, cand, {}) == 7);
  CHECK(recovery_value(p, cand, {3}) == 9);
  CHECK(recovery_value(p, cand, {2, 3, 4}) == 11);
  CHECK(recovery_value(p, cand, {1, 2, 3}) == 11);
  CHECK_THROWS_AS(recovery_value(p, cand, {7}), PatternError);
}

TEST_CASE("greedy selection on the shipped fixtures", "[recovery]") {
  const RecoveryResult r = greedy_recover(load_p11(), load_cand6(), 3);
  CHECK(r.picks == std::vector<int>{3, 1, 2});
  CHECK(r.trace == std::vector<int>{9, 10, 11});
  CHECK(r.final_value == 11);
  CHECK(r.chosen == std::vector<int>{1, 2, 3});
  CHECK_FALSE(r.approximate);
  CHECK_FALSE(r.budget_clamped);
}

TEST_CASE("exhaustive selection on the shipped fixtures", "[recovery]") {
  const RecoveryResult r = recover_exact(load_p11(), load_cand6(), 3);
  CHECK(r.final_value == 11);
  CHECK(r.chosen == std::vector<int>{1, 2, 3});
  CHECK(r.method == RecoveryMethod::Exact);
  CHECK(r.picks.empty());
}

TEST_CASE("zero budget returns the baseline", "[recovery]") {
  const SystemPattern p = load_p11();
  const CandidatePattern cand = load_cand6();
  for (const RecoveryResult r : {greedy_recover(p, cand, 0), recover_exact(p, cand, 0)}) {
    CHECK(r.chosen.empty());
    CHECK(r.final_value == 7);
  }
}

TEST_CASE("saturated patterns gain nothing and pick lowest indices", "[recovery]") {
  const SystemPattern p =
      parse_system(R"({"n": 2, "a_edges": [[1,2]], "b_edges": [[1,1]]})");
  const CandidatePattern cand(2, 3, {{1, 1}, {2, 2}, {2, 3}});
  const RecoveryResult r = greedy_recover(p, cand, 2);
  CHECK(r.final_value == 2);
  CHECK(r.picks == std::vector<int>{1, 2});
  CHECK(r.trace == std::vector<int>{2, 2});
}

TEST_CASE("budget beyond the candidate count clamps with a flag", "[recovery]") {
  const RecoveryResult r = greedy_recover(load_p11(), load_cand6(), 10);
  CHECK(r.budget_clamped);
  CHECK(int(r.chosen.size()) == 6);
  CHECK(r.final_value == 11);
}

TEST_CASE("greedy trace equals the objective along its own prefixes", "[recovery]") {
  std::mt19937_64 eng(1515);
  for (int t = 0; t < 15; ++t) {
    const SystemPattern p = random_tight_pattern(eng, 8, 3);
    const CandidatePattern cand = random_candidates(eng, p.state_count(), 5, 0.35);
    const RecoveryResult r = greedy_recover(p, cand, 3);
    REQUIRE(r.picks.size() == r.trace.size());
    std::vector<int> prefix;
    for (std::size_t i = 0; i < r.picks.size(); ++i) {
      prefix.push_back(r.picks[i]);
      CHECK(r.trace[i] == recovery_value(p, cand, prefix));
    }
  }
}

TEST_CASE("objective is monotone under adding candidates", "[recovery]") {
  std::mt19937_64 eng(1616);
  for (int t = 0; t < 12; ++t) {
    const SystemPattern p = random_pattern(eng, 8, 3, 0.3, 0.4, 0.25);
    const CandidatePattern cand = random_candidates(eng, p.state_count(), 5, 0.35);
    const int mc = cand.candidate_count();
    for (std::uint32_t mask = 0; mask < (1u << mc); ++mask) {
      std::vector<int> base_set;
      for (int c = 0; c < mc; ++c)
        if (mask & (1u << c)) base_set.push_back(c + 1);
      const int f0 = recovery_value(p, cand, base_set);
      for (int c = 1; c <= mc; ++c) {
        if (mask & (1u << (c - 1))) continue;
        std::vector<int> plus = base_set;
        plus.push_back(c);
        CHECK(recovery_value(p, cand, plus) >= f0);
      }
    }
  }
}

TEST_CASE("objective is submodular", "[recovery]") {
  std::mt19937_64 eng(1717);
  for (int t = 0; t < 10; ++t) {
    const SystemPattern p = random_pattern(eng, 8, 3, 0.3, 0.4, 0.25);
    const CandidatePattern cand = random_candidates(eng, p.state_count(), 5, 0.35);
    const int mc = cand.candidate_count();
    std::vector<int> f(std::size_t(1) << mc);
    for (std::uint32_t mask = 0; mask < (1u << mc); ++mask) {
      std::vector<int> sel;
      for (int c = 0; c < mc; ++c)
        if (mask & (1u << c)) sel.push_back(c + 1);
      f[mask] = recovery_value(p, cand, sel);
    }
    for (std::uint32_t small = 0; small < (1u << mc); ++small)
      for (std::uint32_t big = small; big < (1u << mc); ++big) {
        if ((small & big) != small) continue;  // need small subset of big
        for (int c = 0; c < mc; ++c) {
          const std::uint32_t bit = 1u << c;
          if (big & bit) continue;
          CHECK(f[big | bit] - f[big] <= f[small | bit] - f[small]);
        }
      }
  }
}

TEST_CASE("greedy stays within the submodular guarantee of exhaustive search", "[recovery]") {
  std::mt19937_64 eng(1818);
  constexpr double kGuarantee = 1.0 - 1.0 / 2.718281828459045;
  for (int t = 0; t < 10; ++t) {
    const SystemPattern p = random_tight_pattern(eng, 8, 3);
    const CandidatePattern cand = random_candidates(eng, p.state_count(), 6, 0.3);
    const int k = 1 + int(eng() % 3);
    const RecoveryResult g = greedy_recover(p, cand, k);
    const RecoveryResult ex = recover_exact(p, cand, k);
    CHECK(g.final_value <= ex.final_value);
    CHECK(double(g.final_value) >= kGuarantee * double(ex.final_value));
  }
}

TEST_CASE("decomposition agrees with the certified bounds when tight", "[recovery]") {
  const SystemPattern p = load_p11();
  const CandidatePattern cand = load_cand6();
  for (std::uint32_t mask = 0; mask < (1u << 6); ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    std::vector<int> sel;
    for (int c = 0; c < 6; ++c)
      if (mask & (1u << c)) sel.push_back(c + 1);
    const MdimEstimate e = mdim_bounds(append_candidates(p, cand, sel));
    if (e.exact) CHECK(recovery_value(p, cand, sel) == e.lower);
  }
}
