#pragma once

// Actuator recovery: choose up to k candidate input columns to append so the
// certified stabilizable-subspace dimension of the augmented pattern is
// maximized. The objective decomposes as a constant base plus a coverage term
// over input-unreachable components plus a matching-gain term, which makes it
// monotone submodular; the greedy selection therefore carries the usual
// (1 - 1/e) approximation guarantee.

#include <algorithm>
#include <vector>

#include "netstab/analyze.hpp"

namespace netstab {

struct RecoveryObjective {
  int base = 0;                              // certified m-dim of the unaugmented pattern
  int base_matching = 0;                     // max matching of [A B] over all rows
  std::vector<std::vector<int>> scc_blocks;  // universe elements per unreachable component
  std::vector<std::vector<int>> coverage;    // per candidate: sorted covered elements
  bool approximate = false;                  // some component interval was not tight
};

namespace rec_detail {

inline bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace rec_detail

inline RecoveryObjective make_recovery_objective(const SystemPattern& p,
                                                 const CandidatePattern& cand,
                                                 const SearchLimits& limits = {}) {
  if (cand.state_count() != p.state_count())
    throw PatternError("candidate pattern is for a different state count");
  RecoveryObjective obj;
  const SystemGraph g = build_graph(p);
  const MdimEstimate est = mdim_bounds(p, limits);
  obj.base = est.lower;
  obj.approximate = !est.exact || !est.search_exact;
  const BipartiteView sv = BipartiteView::system(p);
  obj.base_matching = max_matching_size(sv, sv.rows);

  const auto comps = scc_decompose(g, g.unreachable);
  std::vector<int> comp_of(g.n + 1, -1);
  int next_element = 1;
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    for (int v : comps[ci]) comp_of[v] = int(ci);
    const int trank = term_rank(BipartiteView::state_block(p, comps[ci]));
    const auto pack = detail::component_packing(g, comps[ci], limits);
    const int r_size = trank - pack.value;
    std::vector<int> block(r_size);
    for (int t = 0; t < r_size; ++t) block[t] = next_element++;
    obj.scc_blocks.push_back(std::move(block));
  }

  obj.coverage.assign(cand.candidate_count(), {});
  for (int c = 1; c <= cand.candidate_count(); ++c) {
    std::vector<char> touched(comps.size(), 0);
    for (const auto& [s, cc] : cand.entries())
      if (cc == c && comp_of[s] >= 0) touched[comp_of[s]] = 1;
    for (std::size_t ci = 0; ci < comps.size(); ++ci)
      if (touched[ci])
        obj.coverage[c - 1].insert(obj.coverage[c - 1].end(), obj.scc_blocks[ci].begin(),
                                   obj.scc_blocks[ci].end());
    std::sort(obj.coverage[c - 1].begin(), obj.coverage[c - 1].end());
  }
  return obj;
}

namespace rec_detail {

inline int evaluate(const RecoveryObjective& obj, const SystemPattern& p,
                    const CandidatePattern& cand, const std::vector<int>& chosen) {
  std::vector<char> in(1, 0);
  int covered = 0;
  std::size_t max_el = 0;
  for (const auto& block : obj.scc_blocks)
    for (int e : block) max_el = std::max(max_el, std::size_t(e));
  in.assign(max_el + 1, 0);
  for (int c : chosen)
    for (int e : obj.coverage[c - 1])
      if (!in[e]) {
        in[e] = 1;
        ++covered;
      }
  const SystemPattern aug = append_candidates(p, cand, chosen);
  const BipartiteView view = BipartiteView::system(aug);
  const int q = max_matching_size(view, view.rows) - obj.base_matching;
  return obj.base + covered + q;
}

}  // namespace rec_detail

// Value of the augmented pattern's certified m-dim for a chosen candidate
// subset, evaluated through the base + coverage + matching-gain
// decomposition.
inline int recovery_value(const SystemPattern& p, const CandidatePattern& cand,
                          const std::vector<int>& chosen, const SearchLimits& limits = {}) {
  const RecoveryObjective obj = make_recovery_objective(p, cand, limits);
  std::vector<int> sel(chosen);
  std::sort(sel.begin(), sel.end());
  sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
  for (int c : sel)
    if (c < 1 || c > cand.candidate_count())
      throw PatternError("chosen candidate " + std::to_string(c) + " out of range 1.." +
                         std::to_string(cand.candidate_count()));
  return rec_detail::evaluate(obj, p, cand, sel);
}

enum class RecoveryMethod { Greedy, Exact };

struct RecoveryResult {
  std::vector<int> chosen;  // sorted
  std::vector<int> picks;   // greedy pick order (empty for exact)
  std::vector<int> trace;   // objective after each pick (greedy only)
  int final_value = 0;
  RecoveryMethod method = RecoveryMethod::Greedy;
  bool approximate = false;
  bool budget_clamped = false;
};

// Greedy maximization: k rounds, each adding the candidate of largest
// marginal gain, smallest index on ties.
inline RecoveryResult greedy_recover(const SystemPattern& p, const CandidatePattern& cand,
                                     int budget, const SearchLimits& limits = {}) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  RecoveryResult out;
  out.method = RecoveryMethod::Greedy;
  const RecoveryObjective obj = make_recovery_objective(p, cand, limits);
  out.approximate = obj.approximate;
  const int mc = cand.candidate_count();
  if (budget > mc) {
    out.budget_clamped = true;
    budget = mc;
  }

  std::vector<int> current;
  int current_value = rec_detail::evaluate(obj, p, cand, {});
  for (int round = 0; round < budget; ++round) {
    int best_c = -1, best_v = 0;
    for (int c = 1; c <= mc; ++c) {
      if (std::find(current.begin(), current.end(), c) != current.end()) continue;
      std::vector<int> trial(current);
      trial.push_back(c);
      std::sort(trial.begin(), trial.end());
      const int v = rec_detail::evaluate(obj, p, cand, trial);
      if (best_c == -1 || v > best_v) {
        best_c = c;
        best_v = v;
      }
    }
    current.push_back(best_c);
    std::sort(current.begin(), current.end());
    current_value = best_v;
    out.picks.push_back(best_c);
    out.trace.push_back(current_value);
  }
  out.chosen = current;
  out.final_value = current_value;
  return out;
}

// Exhaustive baseline over all subsets within the budget; ties broken by
// lexicographically smallest chosen set.
inline RecoveryResult recover_exact(const SystemPattern& p, const CandidatePattern& cand,
                                    int budget, const SearchLimits& limits = {}) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  RecoveryResult out;
  out.method = RecoveryMethod::Exact;
  const RecoveryObjective obj = make_recovery_objective(p, cand, limits);
  out.approximate = obj.approximate;
  const int mc = cand.candidate_count();
  if (budget > mc) {
    out.budget_clamped = true;
    budget = mc;
  }

  bool have = false;
  std::vector<int> pick;
  auto consider = [&](const std::vector<int>& sel) {
    const int v = rec_detail::evaluate(obj, p, cand, sel);
    if (!have || v > out.final_value ||
        (v == out.final_value && rec_detail::lex_less(sel, out.chosen))) {
      have = true;
      out.final_value = v;
      out.chosen = sel;
    }
  };
  consider({});
  for (int size = 1; size <= budget; ++size) {
    pick.assign(size, 0);
    for (int i = 0; i < size; ++i) pick[i] = i + 1;
    while (true) {
      consider(pick);
      int i = size - 1;
      while (i >= 0 && pick[i] == mc - (size - 1 - i)) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace netstab
