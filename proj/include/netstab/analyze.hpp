#pragma once

// Structural stabilizability tests and certified bounds on the generic
// dimension of the stabilizable subspace (m-dim). The lower bound comes from
// a vertex-disjoint cycle packing of the input-unreachable part, the upper
// bound from an independent set of loop-free vertices; both searches run per
// connected component, exactly below a size threshold and greedily above it.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "netstab/graph.hpp"

namespace netstab {

struct SearchLimits {
  int is_exact_limit = 24;       // branch and bound cutoff per component
  int packing_exact_limit = 18;  // bitmask DP cutoff per component
};

struct StabilizabilityVerdict {
  bool stabilizable = false;
  std::vector<int> missing_selfloops;  // unreachable states without a loop
  int hall_deficiency = 0;             // over the reachable rows of [A B]
  std::optional<std::vector<int>> deficient_witness;
};

// A vertex-disjoint cycle: one vertex for a self-loop, two for an undirected
// edge, three or more for a longer cycle. Contributes ceil(|C|/2) to the
// packing value.
struct Cycle {
  std::vector<int> vertices;
  int value() const { return (int(vertices.size()) + 1) / 2; }
};

struct PackingResult {
  int value = 0;
  std::vector<Cycle> cycles;
  bool exact = true;
};

struct IndependentSetResult {
  std::vector<int> vertices;
  bool exact = true;
};

struct MdimEstimate {
  int lower = 0;
  int upper = 0;
  int reachable_trank = 0;
  std::vector<Cycle> cycle_packing;
  std::vector<int> independent_set;
  bool exact = false;        // lower == upper
  bool search_exact = true;  // witness searches all ran in exact mode
};

enum class Estimator { Lower, Upper };

inline int estimate_of(const MdimEstimate& e, Estimator est) {
  return est == Estimator::Lower ? e.lower : e.upper;
}

inline StabilizabilityVerdict check_stabilizable(const SystemPattern& p) {
  const SystemGraph g = build_graph(p);
  StabilizabilityVerdict v;
  for (int s : g.unreachable)
    if (!g.loop[s]) v.missing_selfloops.push_back(s);
  const BipartiteView view = BipartiteView::system(p);
  v.hall_deficiency = hall_deficiency(view, g.reachable);
  if (v.hall_deficiency > 0) v.deficient_witness = hall_witness(view, g.reachable);
  v.stabilizable = v.missing_selfloops.empty() && v.hall_deficiency == 0;
  return v;
}

inline bool is_structurally_controllable(const SystemPattern& p) {
  const SystemGraph g = build_graph(p);
  if (int(g.reachable.size()) != g.n) return false;
  if (g.n == 0) return true;
  return hall_deficiency(BipartiteView::system(p), g.reachable) == 0;
}

// Generic dimension of the controllable subspace: the term rank of [A B]
// restricted to the input-reachable rows. Columns of unreachable states never
// meet those rows, so no column restriction is needed.
inline int generic_controllable_dim(const SystemPattern& p) {
  const SystemGraph g = build_graph(p);
  if (g.reachable.empty()) return 0;
  return max_matching_size(BipartiteView::system(p), g.reachable);
}

namespace detail {

struct ComponentContext {
  std::vector<int> verts;            // sorted original ids
  std::vector<std::uint32_t> adj;    // local adjacency bitmasks, self excluded
  std::vector<char> loop;            // local loop flags
  std::vector<std::vector<int>> nbr; // local adjacency lists, ascending

  ComponentContext(const SystemGraph& g, const std::vector<int>& comp) : verts(comp) {
    std::sort(verts.begin(), verts.end());
    const int k = int(verts.size());
    adj.assign(k, 0);
    loop.assign(k, 0);
    nbr.assign(k, {});
    for (int a = 0; a < k; ++a) {
      loop[a] = g.loop[verts[a]];
      for (int w : g.adj[verts[a]]) {
        const auto it = std::lower_bound(verts.begin(), verts.end(), w);
        if (it != verts.end() && *it == w) {
          const int b = int(it - verts.begin());
          if (b != a) {
            if (k <= 32) adj[a] |= (1u << b);
            nbr[a].push_back(b);
          }
        }
      }
    }
  }
};

// Exact maximum independent set, include-first branch and bound over
// ascending vertices; the first maximum found is the lexicographically
// smallest one.
struct IsSearch {
  const ComponentContext& ctx;
  std::vector<int> best;

  explicit IsSearch(const ComponentContext& c) : ctx(c) {}

  void dfs(std::vector<int>& cur, const std::vector<int>& cand) {
    if (int(cur.size()) + int(cand.size()) <= int(best.size())) return;
    if (cand.empty()) {
      best = cur;
      return;
    }
    const int v = cand.front();
    std::vector<int> incl;
    for (std::size_t i = 1; i < cand.size(); ++i) {
      const int u = cand[i];
      if (std::find(ctx.nbr[v].begin(), ctx.nbr[v].end(), u) == ctx.nbr[v].end())
        incl.push_back(u);
    }
    cur.push_back(v);
    dfs(cur, incl);
    cur.pop_back();
    std::vector<int> excl(cand.begin() + 1, cand.end());
    dfs(cur, excl);
  }

  std::vector<int> run() {
    std::vector<int> cand;
    for (int a = 0; a < int(ctx.verts.size()); ++a)
      if (!ctx.loop[a]) cand.push_back(a);
    std::vector<int> cur;
    dfs(cur, cand);
    return best;
  }
};

inline std::vector<int> greedy_independent_set(const ComponentContext& ctx) {
  const int k = int(ctx.verts.size());
  std::vector<char> alive(k, 1);
  for (int a = 0; a < k; ++a)
    if (ctx.loop[a]) alive[a] = 0;
  std::vector<int> chosen;
  while (true) {
    int pick = -1, pick_deg = 0;
    for (int a = 0; a < k; ++a) {
      if (!alive[a]) continue;
      int deg = 0;
      for (int b : ctx.nbr[a])
        if (alive[b]) ++deg;
      if (pick == -1 || deg < pick_deg) {
        pick = a;
        pick_deg = deg;
      }
    }
    if (pick == -1) break;
    chosen.push_back(pick);
    alive[pick] = 0;
    for (int b : ctx.nbr[pick]) alive[b] = 0;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Exact cycle packing by DP over vertex subsets. Only self-loops, single
// edges and chordless odd cycles are enumerated: an even cycle is worth no
// more than the perfect matching on its own vertices, and an odd cycle with a
// chord splits into a shorter odd cycle plus a matched path of equal value.
struct PackingSearch {
  const ComponentContext& ctx;
  const int k;
  std::vector<signed char> memo;

  explicit PackingSearch(const ComponentContext& c)
      : ctx(c), k(int(c.verts.size())), memo(std::size_t(1) << k, -1) {}

  template <typename F>
  void chordless_odd_cycles(int v, std::uint32_t mask, F&& emit) {
    std::vector<int> path{v};
    std::uint32_t pathmask = 1u << v;
    extend(v, mask, path, pathmask, emit);
  }

  template <typename F>
  void extend(int v, std::uint32_t mask, std::vector<int>& path, std::uint32_t pathmask, F&& emit) {
    const int t = path.back();
    for (int w : ctx.nbr[t]) {
      if (w <= v) continue;
      const std::uint32_t wb = 1u << w;
      if (!(mask & wb) || (pathmask & wb)) continue;
      const std::uint32_t interior = pathmask & ~(1u << v) & ~(1u << t);
      if (ctx.adj[w] & interior) continue;  // chord into the path interior
      if (path.size() >= 2 && (ctx.adj[w] & (1u << v))) {
        // w joins v: either it closes the cycle here or it would leave a
        // chord back to v, so the path never extends past it. The first
        // step is exempt -- its edge to v is a cycle edge.
        if ((path.size() + 1) % 2 == 1 && path[1] < w) {
          path.push_back(w);
          emit(path, pathmask | wb);
          path.pop_back();
        }
      } else {
        path.push_back(w);
        extend(v, mask, path, pathmask | wb, emit);
        path.pop_back();
      }
    }
  }

  int value(std::uint32_t mask) {
    if (mask == 0) return 0;
    signed char& slot = memo[mask];
    if (slot >= 0) return slot;
    const int v = __builtin_ctz(mask);
    const std::uint32_t vb = 1u << v;
    const int sub0 = value(mask & ~vb);
    int best = sub0;
    if (ctx.loop[v]) best = std::max(best, 1 + sub0);
    for (int u : ctx.nbr[v]) {
      const std::uint32_t ub = 1u << u;
      if (u > v && (mask & ub)) best = std::max(best, 1 + value(mask & ~vb & ~ub));
    }
    chordless_odd_cycles(v, mask, [&](const std::vector<int>& cyc, std::uint32_t cmask) {
      const int val = (int(cyc.size()) + 1) / 2;
      best = std::max(best, val + value(mask & ~cmask));
    });
    slot = (signed char)best;
    return best;
  }

  // Walks the optimum again, preferring to cover the smallest open vertex.
  std::vector<Cycle> reconstruct() {
    std::vector<Cycle> out;
    std::uint32_t mask = (k == 32) ? 0xffffffffu : ((1u << k) - 1);
    while (mask != 0) {
      const int v = __builtin_ctz(mask);
      const std::uint32_t vb = 1u << v;
      const int target = value(mask);
      const int sub0 = value(mask & ~vb);
      if (ctx.loop[v] && 1 + sub0 == target) {
        out.push_back({{ctx.verts[v]}});
        mask &= ~vb;
        continue;
      }
      bool done = false;
      for (int u : ctx.nbr[v]) {
        const std::uint32_t ub = 1u << u;
        if (u > v && (mask & ub) && 1 + value(mask & ~vb & ~ub) == target) {
          out.push_back({{ctx.verts[v], ctx.verts[u]}});
          mask &= ~vb & ~ub;
          done = true;
          break;
        }
      }
      if (done) continue;
      std::vector<int> chosen;
      std::uint32_t chosen_mask = 0;
      chordless_odd_cycles(v, mask, [&](const std::vector<int>& cyc, std::uint32_t cmask) {
        if (!chosen.empty()) return;
        const int val = (int(cyc.size()) + 1) / 2;
        if (val + value(mask & ~cmask) == target) {
          chosen = cyc;
          chosen_mask = cmask;
        }
      });
      if (!chosen.empty()) {
        Cycle c;
        for (int a : chosen) c.vertices.push_back(ctx.verts[a]);
        out.push_back(std::move(c));
        mask &= ~chosen_mask;
        continue;
      }
      if (sub0 != target) throw std::logic_error("cycle packing reconstruction failed");
      mask &= ~vb;
    }
    return out;
  }
};

// Heuristic packing for oversized components: all self-loops, a maximum
// matching of the loop-free rest as 2-cycles, then triangle augmentation.
inline PackingResult greedy_packing(const ComponentContext& ctx) {
  const int k = int(ctx.verts.size());
  PackingResult out;
  out.exact = false;
  std::vector<char> used(k, 0);
  for (int a = 0; a < k; ++a)
    if (ctx.loop[a]) {
      out.cycles.push_back({{ctx.verts[a]}});
      used[a] = 1;
    }

  std::vector<int> rest;
  for (int a = 0; a < k; ++a)
    if (!used[a]) rest.push_back(a);
  std::vector<std::vector<int>> radj(rest.size());
  for (std::size_t i = 0; i < rest.size(); ++i)
    for (int b : ctx.nbr[rest[i]]) {
      const auto it = std::lower_bound(rest.begin(), rest.end(), b);
      if (it != rest.end() && *it == b) radj[i].push_back(int(it - rest.begin()));
    }
  const std::vector<int> mate = general_max_matching(radj);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < rest.size(); ++i)
    if (mate[i] > int(i)) pairs.push_back({int(i), mate[i]});
  std::vector<char> rest_used(rest.size(), 0);
  for (const auto& [a, b] : pairs) rest_used[a] = rest_used[b] = 1;

  // Replace a matched edge by a triangle through an unused common neighbor.
  bool changed = true;
  std::vector<std::vector<int>> triangles;
  while (changed) {
    changed = false;
    for (auto& pr : pairs) {
      if (pr.first < 0) continue;
      for (int w = 0; w < int(rest.size()); ++w) {
        if (rest_used[w]) continue;
        const bool wa = std::find(radj[w].begin(), radj[w].end(), pr.first) != radj[w].end();
        const bool wb = std::find(radj[w].begin(), radj[w].end(), pr.second) != radj[w].end();
        if (wa && wb) {
          triangles.push_back({pr.first, pr.second, w});
          rest_used[w] = 1;
          pr.first = -1;
          changed = true;
          break;
        }
      }
    }
  }
  for (const auto& pr : pairs)
    if (pr.first >= 0)
      out.cycles.push_back({{ctx.verts[rest[pr.first]], ctx.verts[rest[pr.second]]}});
  for (const auto& t : triangles) {
    std::vector<int> ids{ctx.verts[rest[t[0]]], ctx.verts[rest[t[1]]], ctx.verts[rest[t[2]]]};
    std::sort(ids.begin(), ids.end());
    out.cycles.push_back({ids});
  }
  for (const auto& c : out.cycles) out.value += c.value();
  return out;
}

inline PackingResult component_packing(const SystemGraph& g, const std::vector<int>& comp,
                                       const SearchLimits& limits) {
  const ComponentContext ctx(g, comp);
  const int exact_cap = std::min(limits.packing_exact_limit, 24);  // mask width guard
  if (int(comp.size()) <= exact_cap) {
    PackingSearch search(ctx);
    PackingResult out;
    out.value = search.value((comp.size() == 32) ? 0xffffffffu : ((1u << comp.size()) - 1));
    out.cycles = search.reconstruct();
    out.exact = true;
    return out;
  }
  return greedy_packing(ctx);
}

inline IndependentSetResult component_independent_set(const SystemGraph& g,
                                                      const std::vector<int>& comp,
                                                      const SearchLimits& limits) {
  const ComponentContext ctx(g, comp);
  IndependentSetResult out;
  std::vector<int> local;
  if (int(comp.size()) <= limits.is_exact_limit) {
    IsSearch search(ctx);
    local = search.run();
    out.exact = true;
  } else {
    local = greedy_independent_set(ctx);
    out.exact = false;
  }
  for (int a : local) out.vertices.push_back(ctx.verts[a]);
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

}  // namespace detail

// Maximum independent set among loop-free vertices of the induced subgraph,
// decomposed by connected component; exact up to the limit, greedy above it.
inline IndependentSetResult max_independent_set(const SystemGraph& g,
                                                const std::vector<int>& restrict_to,
                                                const SearchLimits& limits = {}) {
  IndependentSetResult out;
  for (const auto& comp : scc_decompose(g, restrict_to)) {
    const auto part = detail::component_independent_set(g, comp, limits);
    out.vertices.insert(out.vertices.end(), part.vertices.begin(), part.vertices.end());
    out.exact = out.exact && part.exact;
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

// Maximum-value vertex-disjoint cycle packing of the induced subgraph, value
// sum of ceil(|C|/2); exact per component up to the limit, greedy above it.
inline PackingResult max_cycle_packing(const SystemGraph& g, const std::vector<int>& restrict_to,
                                       const SearchLimits& limits = {}) {
  PackingResult out;
  for (const auto& comp : scc_decompose(g, restrict_to)) {
    auto part = detail::component_packing(g, comp, limits);
    out.value += part.value;
    for (auto& c : part.cycles) out.cycles.push_back(std::move(c));
    out.exact = out.exact && part.exact;
  }
  return out;
}

// Certified interval for the generic stabilizable-subspace dimension. The
// reachable part contributes its term rank exactly; each unreachable
// component contributes between its packing value and its size minus a
// maximum independent set of loop-free vertices.
inline MdimEstimate mdim_bounds(const SystemPattern& p, const SearchLimits& limits = {}) {
  const SystemGraph g = build_graph(p);
  MdimEstimate e;
  if (!g.reachable.empty())
    e.reachable_trank = max_matching_size(BipartiteView::system(p), g.reachable);
  int packing_total = 0;
  int is_slack_total = 0;
  for (const auto& comp : scc_decompose(g, g.unreachable)) {
    auto pack = detail::component_packing(g, comp, limits);
    auto is = detail::component_independent_set(g, comp, limits);
    packing_total += pack.value;
    is_slack_total += int(comp.size()) - int(is.vertices.size());
    for (auto& c : pack.cycles) e.cycle_packing.push_back(std::move(c));
    e.independent_set.insert(e.independent_set.end(), is.vertices.begin(), is.vertices.end());
    e.search_exact = e.search_exact && pack.exact && is.exact;
  }
  std::sort(e.independent_set.begin(), e.independent_set.end());
  e.lower = e.reachable_trank + packing_total;
  e.upper = e.reachable_trank + is_slack_total;
  e.exact = (e.lower == e.upper);
  return e;
}

}  // namespace netstab
