#pragma once

// Worst-case actuator disabling: which budget-limited set of input columns,
// once removed, minimizes the certified stabilizable-subspace dimension. On
// patterns whose state part satisfies Hall's condition the problem is an
// instance of Min-k-Union over per-component coverage sets, and conversely
// every Min-k-Union instance embeds as a disabling problem on a gadget of
// disjoint 2-cycles.

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "netstab/analyze.hpp"

namespace netstab {

struct SetSystem {
  int universe_size = 0;
  std::vector<std::vector<int>> sets;  // 1-based sorted elements
  int base_value = 0;                  // constant offset of the induced objective
};

struct AssumptionViolation : std::runtime_error {
  std::vector<int> witness;
  AssumptionViolation(const std::string& msg, std::vector<int> w)
      : std::runtime_error(msg), witness(std::move(w)) {}
};

enum class AttackMethod { Exact, Reduction };
enum class SolveMode { Exact, Heuristic };

struct AttackResult {
  std::vector<int> removed;  // sorted input columns
  int objective = 0;         // estimated m-dim after removal
  Estimator estimator = Estimator::Lower;
  AttackMethod method = AttackMethod::Exact;
  bool approximate = false;     // some evaluated interval was not tight
  bool budget_clamped = false;  // budget exceeded the input count
};

namespace detail {

inline bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Visits subsets of {1..m} of size 0..k in a deterministic order.
template <typename F>
inline void for_each_subset_up_to(int m, int k, F&& f) {
  std::vector<int> pick;
  f(pick);
  for (int size = 1; size <= std::min(k, m); ++size) {
    pick.assign(size, 0);
    for (int i = 0; i < size; ++i) pick[i] = i + 1;
    while (true) {
      f(pick);
      int i = size - 1;
      while (i >= 0 && pick[i] == m - (size - 1 - i)) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
}

}  // namespace detail

// Enumerates every removal set within the budget and evaluates the chosen
// bound on the remaining pattern; ties broken by lexicographically smallest
// removal set. Intended for modest input counts.
inline AttackResult attack_exact(const SystemPattern& p, int budget,
                                 Estimator est = Estimator::Lower,
                                 const SearchLimits& limits = {}) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  AttackResult out;
  out.estimator = est;
  out.method = AttackMethod::Exact;
  const int m = p.input_count();
  if (budget > m) {
    out.budget_clamped = true;
    budget = m;
  }
  bool have = false;
  detail::for_each_subset_up_to(m, budget, [&](const std::vector<int>& removed) {
    std::vector<int> keep;
    for (int j = 1; j <= m; ++j)
      if (std::find(removed.begin(), removed.end(), j) == removed.end()) keep.push_back(j);
    const MdimEstimate e = mdim_bounds(select_columns(p, keep), limits);
    out.approximate = out.approximate || !e.exact;
    const int obj = estimate_of(e, est);
    if (!have || obj < out.objective ||
        (obj == out.objective && detail::lex_less(removed, out.removed))) {
      have = true;
      out.objective = obj;
      out.removed = removed;
    }
  });
  return out;
}

struct ReductionInstance {
  SetSystem system;
  bool approximate = false;              // some component interval was not tight
  std::vector<std::vector<int>> blocks;  // universe elements per component
};

// On a pattern whose state bipartite structure satisfies Hall's condition,
// removal objectives decompose per state component: each component D keeps a
// fixed contribution mdim(D) and exposes |D| - mdim(D) further dimensions
// exactly when some kept input reaches it. The coverage sets of the inputs
// form the Min-k-Union instance returned here.
inline ReductionInstance build_min_k_union_instance(const SystemPattern& p,
                                                    Estimator est = Estimator::Lower,
                                                    const SearchLimits& limits = {}) {
  const SystemGraph g = build_graph(p);
  std::vector<int> all_states(g.n);
  for (int i = 0; i < g.n; ++i) all_states[i] = i + 1;
  const BipartiteView state_view = BipartiteView::state_block(p, all_states);
  if (hall_deficiency(state_view, all_states) > 0) {
    auto witness = hall_witness(state_view, all_states);
    std::string msg = "state pattern violates Hall's condition; deficient set {";
    for (std::size_t i = 0; i < witness.size(); ++i)
      msg += (i ? "," : "") + std::to_string(witness[i]);
    msg += "}";
    throw AssumptionViolation(msg, std::move(witness));
  }

  ReductionInstance out;
  const auto comps = scc_decompose(g, all_states);
  std::vector<int> comp_of(g.n + 1, -1);
  int next_element = 1;
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    for (int v : comps[ci]) comp_of[v] = int(ci);
    const auto pack = detail::component_packing(g, comps[ci], limits);
    const auto is = detail::component_independent_set(g, comps[ci], limits);
    const int lo = pack.value;
    const int up = int(comps[ci].size()) - int(is.vertices.size());
    if (lo != up || !pack.exact || !is.exact) out.approximate = true;
    const int mdim_c = (est == Estimator::Lower) ? lo : up;
    out.system.base_value += mdim_c;
    const int r_size = int(comps[ci].size()) - mdim_c;
    std::vector<int> block(r_size);
    for (int t = 0; t < r_size; ++t) block[t] = next_element++;
    out.blocks.push_back(std::move(block));
  }
  out.system.universe_size = next_element - 1;

  out.system.sets.assign(g.m, {});
  for (int j = 0; j < g.m; ++j) {
    std::vector<char> touched(comps.size(), 0);
    for (int s : g.input_to[j]) touched[comp_of[s]] = 1;
    for (std::size_t ci = 0; ci < comps.size(); ++ci)
      if (touched[ci])
        out.system.sets[j].insert(out.system.sets[j].end(), out.blocks[ci].begin(),
                                  out.blocks[ci].end());
    std::sort(out.system.sets[j].begin(), out.system.sets[j].end());
  }
  return out;
}

// Smallest union achievable by exactly keep of the sets. Exact mode
// enumerates all selections; heuristic mode greedily adds the set of minimum
// marginal growth. Ties go to the lexicographically smallest selection.
inline std::vector<int> solve_min_k_union(const SetSystem& sys, int keep, SolveMode mode) {
  const int p = int(sys.sets.size());
  if (keep < 0 || keep > p) throw std::invalid_argument("keep must lie in 0..|sets|");

  auto union_size = [&](const std::vector<int>& sel) {
    std::vector<char> in(sys.universe_size + 1, 0);
    int count = 0;
    for (int s : sel)
      for (int e : sys.sets[s - 1])
        if (!in[e]) {
          in[e] = 1;
          ++count;
        }
    return count;
  };

  if (mode == SolveMode::Exact) {
    std::vector<int> best;
    int best_union = 0;
    bool have = false;
    std::vector<int> pick(keep);
    for (int i = 0; i < keep; ++i) pick[i] = i + 1;
    while (true) {
      const int u = union_size(pick);
      if (!have || u < best_union || (u == best_union && detail::lex_less(pick, best))) {
        have = true;
        best_union = u;
        best = pick;
      }
      if (keep == 0) break;
      int i = keep - 1;
      while (i >= 0 && pick[i] == p - (keep - 1 - i)) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < keep; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
  }

  std::vector<int> sel;
  std::vector<char> covered(sys.universe_size + 1, 0);
  std::vector<char> taken(p + 1, 0);
  for (int round = 0; round < keep; ++round) {
    int pick = -1, pick_growth = 0;
    for (int s = 1; s <= p; ++s) {
      if (taken[s]) continue;
      int growth = 0;
      for (int e : sys.sets[s - 1])
        if (!covered[e]) ++growth;
      if (pick == -1 || growth < pick_growth) {
        pick = s;
        pick_growth = growth;
      }
    }
    taken[pick] = 1;
    sel.push_back(pick);
    for (int e : sys.sets[pick - 1]) covered[e] = 1;
  }
  return sel;
}

// Embeds a Min-k-Union instance as a disabling problem: one 2-cycle per
// universe element (states e and e + universe), input j feeding state e for
// each e in set j. Keeping a set makes its elements' 2-cycles reachable, each
// worth one extra dimension over its autonomous contribution.
inline std::pair<SystemPattern, int> reduce_min_k_union_to_attack(const SetSystem& sys, int keep) {
  const int p = int(sys.sets.size());
  if (keep < 0 || keep > p) throw std::invalid_argument("keep must lie in 0..|sets|");
  const int nu = sys.universe_size;
  std::set<IndexPair> a, b;
  for (int e = 1; e <= nu; ++e) a.insert({e, e + nu});
  for (int j = 1; j <= p; ++j)
    for (int e : sys.sets[j - 1]) {
      if (e < 1 || e > nu)
        throw std::invalid_argument("set element " + std::to_string(e) + " out of range 1.." +
                                    std::to_string(nu));
      b.insert({e, j});
    }
  return {SystemPattern(2 * nu, p, std::move(a), std::move(b)), p - keep};
}

// Attack through the Min-k-Union reduction: build the instance, choose the
// inputs to keep, remove the rest.
inline AttackResult attack_via_reduction(const SystemPattern& p, int budget,
                                         Estimator est = Estimator::Lower,
                                         SolveMode mode = SolveMode::Exact,
                                         const SearchLimits& limits = {}) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  AttackResult out;
  out.estimator = est;
  out.method = AttackMethod::Reduction;
  const int m = p.input_count();
  if (budget > m) {
    out.budget_clamped = true;
    budget = m;
  }
  const ReductionInstance inst = build_min_k_union_instance(p, est, limits);
  out.approximate = inst.approximate;
  const std::vector<int> kept = solve_min_k_union(inst.system, m - budget, mode);
  std::vector<char> keep_mask(m + 1, 0);
  for (int j : kept) keep_mask[j] = 1;
  for (int j = 1; j <= m; ++j)
    if (!keep_mask[j]) out.removed.push_back(j);
  std::vector<char> in(inst.system.universe_size + 1, 0);
  int u = 0;
  for (int s : kept)
    for (int e : inst.system.sets[s - 1])
      if (!in[e]) {
        in[e] = 1;
        ++u;
      }
  out.objective = inst.system.base_value + u;
  return out;
}

// Accepts {"universe": int, "sets": [[...], ...]} with 1-based elements.
inline SetSystem parse_set_system(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PatternError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw PatternError("top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "universe" && key != "sets") throw PatternError("unknown key \"" + key + "\"");
  }
  if (!j.contains("universe")) throw PatternError("missing key \"universe\"");
  const long long u = detail::require_int(j["universe"], "universe");
  if (u < 0) throw PatternError("universe must be nonnegative");
  SetSystem sys;
  sys.universe_size = int(u);
  if (j.contains("sets")) {
    if (!j["sets"].is_array()) throw PatternError("sets must be an array");
    for (const auto& s : j["sets"]) {
      if (!s.is_array()) throw PatternError("each set must be an array, got " + s.dump());
      std::vector<int> set;
      for (const auto& e : s) {
        const long long v = detail::require_int(e, "set element");
        if (v < 1 || v > u)
          throw PatternError("set element " + std::to_string(v) + " out of range 1.." +
                             std::to_string(u));
        set.push_back(int(v));
      }
      std::sort(set.begin(), set.end());
      if (std::adjacent_find(set.begin(), set.end()) != set.end())
        throw PatternError("duplicate element in set " + s.dump());
      sys.sets.push_back(std::move(set));
    }
  }
  return sys;
}

}  // namespace netstab
