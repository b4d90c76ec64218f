#pragma once

// Shared test utilities: fixture loading, deterministic random instance
// generators, independent brute-force oracles for the combinatorial searches,
// and the explicit realization that witnesses the packing lower bound.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netstab/netstab.hpp"

namespace testsupport {

using namespace netstab;

inline std::string fixture_path(const std::string& name) {
  return std::string(NETSTAB_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SystemPattern load_p11() { return parse_system(read_file(fixture_path("p11.json"))); }

inline CandidatePattern load_cand6() {
  return parse_candidates(read_file(fixture_path("cand6.json")), 11);
}

inline SetSystem load_sets5() { return parse_set_system(read_file(fixture_path("sets5.json"))); }

// ---- deterministic random instances ----------------------------------------

inline double unit_draw(std::mt19937_64& eng) { return double(eng() >> 11) * 0x1.0p-53; }

inline SystemPattern random_pattern(std::mt19937_64& eng, int n_max, int m_max, double edge_p,
                                    double loop_p, double feed_p) {
  const int n = 1 + int(eng() % std::uint64_t(n_max));
  const int m = int(eng() % std::uint64_t(m_max + 1));
  std::set<IndexPair> a, b;
  for (int i = 1; i <= n; ++i) {
    if (unit_draw(eng) < loop_p) a.insert({i, i});
    for (int j = i + 1; j <= n; ++j)
      if (unit_draw(eng) < edge_p) a.insert({i, j});
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j)
      if (unit_draw(eng) < feed_p) b.insert({i, j});
  return SystemPattern(n, m, std::move(a), std::move(b));
}

// Pattern whose state bipartite structure satisfies Hall's condition and that
// has at least one input.
inline SystemPattern random_hall_pattern(std::mt19937_64& eng, int n_max, int m_max) {
  while (true) {
    SystemPattern p = random_pattern(eng, n_max, std::max(1, m_max), 0.35, 0.55, 0.30);
    if (p.input_count() == 0) continue;
    std::vector<int> all(p.state_count());
    for (int i = 0; i < p.state_count(); ++i) all[i] = i + 1;
    if (hall_deficiency(BipartiteView::state_block(p, all), all) == 0) return p;
  }
}

// Pattern with every state input-reachable.
inline SystemPattern random_irreducible_pattern(std::mt19937_64& eng, int n_max, int m_max) {
  while (true) {
    SystemPattern p = random_pattern(eng, n_max, std::max(1, m_max), 0.45, 0.30, 0.40);
    if (p.input_count() == 0) continue;
    if (int(build_graph(p).reachable.size()) == p.state_count()) return p;
  }
}

// Pattern whose certified interval is tight and fully searched, so the
// decomposition-based recovery objective is the exact certified value.
inline SystemPattern random_tight_pattern(std::mt19937_64& eng, int n_max, int m_max) {
  while (true) {
    SystemPattern p = random_pattern(eng, n_max, m_max, 0.30, 0.50, 0.25);
    const MdimEstimate e = mdim_bounds(p);
    if (e.exact && e.search_exact) return p;
  }
}

inline CandidatePattern random_candidates(std::mt19937_64& eng, int n, int mc_max, double p) {
  const int mc = 1 + int(eng() % std::uint64_t(mc_max));
  std::set<IndexPair> edges;
  for (int i = 1; i <= n; ++i)
    for (int c = 1; c <= mc; ++c)
      if (unit_draw(eng) < p) edges.insert({i, c});
  return CandidatePattern(n, mc, std::move(edges));
}

// ---- brute-force oracles ---------------------------------------------------

// Maximum matching by single augmenting-path search (Kuhn), independent of
// the Hopcroft-Karp implementation under test.
inline int kuhn_matching(const BipartiteView& view, const std::vector<int>& rows) {
  std::set<int> allowed(rows.begin(), rows.end());
  std::map<int, int> row_match;
  const int cols = int(view.cols.size());
  std::vector<char> visited;
  std::function<bool(int)> try_col = [&](int c) -> bool {
    for (int r : view.cols[c].rows) {
      if (!allowed.count(r) || visited[r]) continue;
      visited[r] = 1;
      auto it = row_match.find(r);
      if (it == row_match.end() || try_col(it->second)) {
        row_match[r] = c;
        return true;
      }
    }
    return false;
  };
  int size = 0;
  int max_row = 0;
  for (int r : rows) max_row = std::max(max_row, r);
  for (int c = 0; c < cols; ++c) {
    visited.assign(max_row + 1, 0);
    if (try_col(c)) ++size;
  }
  return size;
}

// max over subsets S of rows of |S| - |N(S)|, clamped at 0.
inline int brute_hall_max_deficiency(const BipartiteView& view, const std::vector<int>& rows) {
  const int k = int(rows.size());
  int worst = 0;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::set<int> ns;
    int size = 0;
    for (int i = 0; i < k; ++i) {
      if (!(mask & (1u << i))) continue;
      ++size;
      for (std::size_t c = 0; c < view.cols.size(); ++c)
        for (int r : view.cols[c].rows)
          if (r == rows[i]) ns.insert(int(c));
    }
    worst = std::max(worst, size - int(ns.size()));
  }
  return worst;
}

inline int brute_independent_set(const SystemGraph& g, const std::vector<int>& verts) {
  const int k = int(verts.size());
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      if (g.loop[verts[i]]) ok = false;
      for (int j = i + 1; j < k && ok; ++j) {
        if (!(mask & (1u << j))) continue;
        for (int w : g.adj[verts[i]])
          if (w == verts[j]) ok = false;
      }
    }
    if (ok) best = std::max(best, __builtin_popcount(mask));
  }
  return best;
}

// Exhaustive packing over families of loops, edges and arbitrary simple
// cycles (chords and even lengths allowed), unlike the pruned search in the
// library.
struct BrutePacking {
  const SystemGraph& g;
  std::vector<int> verts;
  std::vector<char> used;  // by local index

  BrutePacking(const SystemGraph& gg, std::vector<int> vv) : g(gg), verts(std::move(vv)) {
    std::sort(verts.begin(), verts.end());
    used.assign(verts.size(), 0);
  }

  bool adjacent(int a, int b) const {
    for (int w : g.adj[verts[a]])
      if (w == verts[b]) return true;
    return false;
  }

  int best = 0;

  void cycles_through(int v, std::vector<int>& path, int& acc) {
    const int t = path.back();
    for (int w = v + 1; w < int(verts.size()); ++w) {
      if (used[w] || !adjacent(t, w)) continue;
      bool on_path = false;
      for (int x : path)
        if (x == w) on_path = true;
      if (on_path) continue;
      path.push_back(w);
      if (path.size() >= 3 && adjacent(w, v) && path[1] < w) {
        for (int x : path) used[x] = 1;
        const int val = (int(path.size()) + 1) / 2;
        acc += val;
        search();
        acc -= val;
        for (int x : path) used[x] = 0;
      }
      cycles_through(v, path, acc);
      path.pop_back();
    }
  }

  int acc_ = 0;

  void search() {
    int v = -1;
    for (int i = 0; i < int(verts.size()); ++i)
      if (!used[i]) {
        v = i;
        break;
      }
    if (v == -1) {
      best = std::max(best, acc_);
      return;
    }
    used[v] = 1;
    // v in no cycle
    search();
    // self-loop
    if (g.loop[verts[v]]) {
      acc_ += 1;
      search();
      acc_ -= 1;
    }
    // edge (v, u)
    for (int u = v + 1; u < int(verts.size()); ++u) {
      if (used[u] || !adjacent(v, u)) continue;
      used[u] = 1;
      acc_ += 1;
      search();
      acc_ -= 1;
      used[u] = 0;
    }
    // longer cycles with minimum vertex v
    used[v] = 0;
    std::vector<int> path{v};
    used[v] = 1;
    cycles_through(v, path, acc_);
    used[v] = 0;
  }

  int run() {
    best = 0;
    acc_ = 0;
    search();
    return best;
  }
};

inline int brute_cycle_packing(const SystemGraph& g, const std::vector<int>& verts) {
  BrutePacking bp(g, verts);
  return bp.run();
}

// Connected components via union-find, the oracle for scc_decompose on
// symmetric patterns.
inline std::vector<std::vector<int>> dsu_components(const SystemGraph& g,
                                                    const std::vector<int>& verts) {
  std::map<int, int> parent;
  for (int v : verts) parent[v] = v;
  std::function<int(int)> find = [&](int v) -> int {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::set<int> in(verts.begin(), verts.end());
  for (int v : verts)
    for (int w : g.adj[v])
      if (in.count(w)) parent[find(v)] = find(w);
  std::map<int, std::vector<int>> groups;
  for (int v : verts) groups[find(v)].push_back(v);
  std::vector<std::vector<int>> comps;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    comps.push_back(members);
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

// ---- packing lower-bound witness -------------------------------------------

// Symmetric matrix supported on one cycle of odd length k >= 3 whose
// eigenvalues include exactly (k+1)/2 strictly negative ones; the uniform
// weight sign that achieves the count depends on k mod 4.
inline void fill_odd_cycle(Mat& a, const std::vector<int>& cycle) {
  const int k = int(cycle.size());
  for (double sign : {1.0, -1.0}) {
    Mat block(k, k);
    for (int t = 0; t < k; ++t) {
      const int u = t, v = (t + 1) % k;
      block(u, v) = block(v, u) = sign;
    }
    int neg = 0;
    for (double ev : jacobi_eigen(block).values)
      if (ev < -1e-9) ++neg;
    if (neg == (k + 1) / 2) {
      for (int t = 0; t < k; ++t) {
        const int u = cycle[t] - 1, v = cycle[(t + 1) % k] - 1;
        a(u, v) = a(v, u) = sign;
      }
      return;
    }
  }
  throw std::logic_error("no uniform sign realizes the odd cycle count");
}

// Realization attaining the certified lower bound: the reachable block is
// sampled (its controllable dimension hits the term rank generically), the
// unreachable block is zero except for the packing cycles, realized so each
// contributes exactly ceil(|C|/2) negative eigenvalues.
inline NumericRealization lower_bound_witness(const SystemPattern& p, const MdimEstimate& est,
                                              std::uint64_t seed) {
  const SystemGraph g = build_graph(p);
  NumericRealization r = sample_realization(p, seed);
  for (int i = 1; i <= g.n; ++i)
    for (int j = 1; j <= g.n; ++j)
      if (!g.reach_mask[i] || !g.reach_mask[j]) r.a(i - 1, j - 1) = 0.0;
  for (const auto& c : est.cycle_packing) {
    const int k = int(c.vertices.size());
    if (k == 1) {
      const int v = c.vertices[0] - 1;
      r.a(v, v) = -1.0;
    } else if (k == 2) {
      const int u = c.vertices[0] - 1, v = c.vertices[1] - 1;
      r.a(u, v) = r.a(v, u) = 1.0;
    } else if (k % 2 == 1) {
      fill_odd_cycle(r.a, c.vertices);
    } else {
      // alternating weights keep the bipartite block nonsingular
      for (int t = 0; t < k; ++t) {
        const int u = c.vertices[t] - 1, v = c.vertices[(t + 1) % k] - 1;
        const double w = (t % 2 == 0) ? 1.0 : 0.5;
        r.a(u, v) = r.a(v, u) = w;
      }
    }
  }
  return r;
}

}  // namespace testsupport
