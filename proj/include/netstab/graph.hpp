#pragma once

// Graph machinery shared by the structural tests: the state digraph with
// input reachability, SCC decomposition, and bipartite row/column views of
// [A B] blocks with maximum matching (Hopcroft-Karp), term rank and Hall
// deficiency. Also a general-graph maximum matching used by heuristics.

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <vector>

#include "netstab/pattern.hpp"

namespace netstab {

struct SystemGraph {
  int n = 0;
  int m = 0;
  std::vector<std::vector<int>> adj;       // 1-based, symmetric, self excluded
  std::vector<char> loop;                  // 1-based self-loop flag
  std::vector<std::vector<int>> input_to;  // per input (0-based), fed states
  std::vector<int> reachable;              // sorted
  std::vector<int> unreachable;            // sorted
  std::vector<char> reach_mask;            // 1-based
};

inline SystemGraph build_graph(const SystemPattern& p) {
  SystemGraph g;
  g.n = p.state_count();
  g.m = p.input_count();
  g.adj.assign(g.n + 1, {});
  g.loop.assign(g.n + 1, 0);
  g.input_to.assign(g.m, {});
  g.reach_mask.assign(g.n + 1, 0);

  for (const auto& [i, j] : p.a_entries()) {
    if (i == j)
      g.loop[i] = 1;
    else
      g.adj[j].push_back(i);  // entry (i,j) is the edge x_j -> x_i
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  for (const auto& [i, j] : p.b_entries()) g.input_to[j - 1].push_back(i);
  for (auto& f : g.input_to) std::sort(f.begin(), f.end());

  std::deque<int> queue;
  for (const auto& f : g.input_to)
    for (int s : f)
      if (!g.reach_mask[s]) {
        g.reach_mask[s] = 1;
        queue.push_back(s);
      }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : g.adj[v])
      if (!g.reach_mask[w]) {
        g.reach_mask[w] = 1;
        queue.push_back(w);
      }
  }
  for (int v = 1; v <= g.n; ++v)
    (g.reach_mask[v] ? g.reachable : g.unreachable).push_back(v);
  return g;
}

// Strongly connected components of the state digraph induced on restrict.
// With a symmetric pattern these coincide with connected components. Each
// component is sorted; components are ordered by smallest member.
inline std::vector<std::vector<int>> scc_decompose(const SystemGraph& g,
                                                   const std::vector<int>& restrict_to) {
  std::vector<char> in(g.n + 1, 0);
  for (int v : restrict_to) in[v] = 1;

  std::vector<int> index(g.n + 1, -1), low(g.n + 1, 0), stack;
  std::vector<char> on_stack(g.n + 1, 0);
  std::vector<std::vector<int>> comps;
  int counter = 0;

  // Iterative Tarjan to keep stack depth flat for long chains.
  struct Frame {
    int v;
    std::size_t next = 0;
  };
  for (int root : restrict_to) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const int v = f.v;
      bool descended = false;
      while (f.next < g.adj[v].size()) {
        const int w = g.adj[v][f.next++];
        if (!in[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::vector<int> comp;
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

enum class ColKind { State, Input };

struct BipartiteColumn {
  ColKind kind;
  int id;                 // state or input index, 1-based
  std::vector<int> rows;  // sorted state rows with a star in this column
};

// Rows are state indices; columns are state and/or input columns of [A B].
struct BipartiteView {
  std::vector<int> rows;  // sorted
  std::vector<BipartiteColumn> cols;

  // All n rows against the n state columns followed by the m input columns.
  static BipartiteView system(const SystemPattern& p) {
    BipartiteView v;
    v.rows.resize(p.state_count());
    for (int i = 0; i < p.state_count(); ++i) v.rows[i] = i + 1;
    std::vector<std::vector<int>> state_rows(p.state_count() + 1), input_rows(p.input_count() + 1);
    for (const auto& [i, j] : p.a_entries()) state_rows[j].push_back(i);
    for (const auto& [i, j] : p.b_entries()) input_rows[j].push_back(i);
    for (int c = 1; c <= p.state_count(); ++c) {
      std::sort(state_rows[c].begin(), state_rows[c].end());
      v.cols.push_back({ColKind::State, c, std::move(state_rows[c])});
    }
    for (int c = 1; c <= p.input_count(); ++c) {
      std::sort(input_rows[c].begin(), input_rows[c].end());
      v.cols.push_back({ColKind::Input, c, std::move(input_rows[c])});
    }
    return v;
  }

  // The principal A block on subset: rows and state columns both restricted.
  static BipartiteView state_block(const SystemPattern& p, const std::vector<int>& subset) {
    BipartiteView v;
    v.rows = subset;
    std::sort(v.rows.begin(), v.rows.end());
    std::vector<char> in(p.state_count() + 1, 0);
    for (int s : v.rows) in[s] = 1;
    for (int c : v.rows) {
      BipartiteColumn col{ColKind::State, c, {}};
      for (const auto& [i, j] : p.a_entries())
        if (j == c && in[i]) col.rows.push_back(i);
      std::sort(col.rows.begin(), col.rows.end());
      v.cols.push_back(std::move(col));
    }
    return v;
  }
};

struct MatchEdge {
  ColKind kind;
  int col_id;
  int row;
};

struct Matching {
  std::vector<MatchEdge> edges;
  int size() const { return int(edges.size()); }
};

namespace detail {

// Hopcroft-Karp over the view with rows restricted; deterministic because
// columns and adjacency lists are processed in index order.
struct HkSolver {
  const BipartiteView& view;
  std::vector<char> allowed;     // 1-based over rows
  std::vector<int> col_match;    // per column index: matched row or 0
  std::vector<int> row_match;    // per row id: matched column index or -1
  std::vector<int> dist;

  explicit HkSolver(const BipartiteView& v, const std::vector<int>& row_restrict) : view(v) {
    int max_row = 0;
    for (int r : v.rows) max_row = std::max(max_row, r);
    allowed.assign(max_row + 1, 0);
    std::vector<char> present(max_row + 1, 0);
    for (int r : v.rows) present[r] = 1;
    for (int r : row_restrict) {
      if (r < 1 || r > max_row || !present[r])
        throw std::invalid_argument("row restriction contains a row outside the view");
      allowed[r] = 1;
    }
    col_match.assign(view.cols.size(), 0);
    row_match.assign(max_row + 1, -1);
  }

  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::deque<int> q;
    dist.assign(view.cols.size(), kInf);
    for (std::size_t c = 0; c < view.cols.size(); ++c)
      if (col_match[c] == 0) {
        dist[c] = 0;
        q.push_back(int(c));
      }
    bool found = false;
    while (!q.empty()) {
      const int c = q.front();
      q.pop_front();
      for (int r : view.cols[c].rows) {
        if (!allowed[r]) continue;
        const int c2 = row_match[r];
        if (c2 == -1) {
          found = true;
        } else if (dist[c2] == kInf) {
          dist[c2] = dist[c] + 1;
          q.push_back(c2);
        }
      }
    }
    return found;
  }

  bool dfs(int c) {
    for (int r : view.cols[c].rows) {
      if (!allowed[r]) continue;
      const int c2 = row_match[r];
      if (c2 == -1 || (dist[c2] == dist[c] + 1 && dfs(c2))) {
        col_match[c] = r;
        row_match[r] = int(c);
        return true;
      }
    }
    dist[c] = kInf;
    return false;
  }

  int solve() {
    int size = 0;
    while (bfs()) {
      for (std::size_t c = 0; c < view.cols.size(); ++c)
        if (col_match[c] == 0 && dfs(int(c))) ++size;
    }
    return size;
  }
};

}  // namespace detail

// Maximum matching of the subgraph induced by row_restrict (all columns
// participate; columns with no star in the restricted rows are simply
// unmatchable).
inline Matching max_matching(const BipartiteView& view, const std::vector<int>& row_restrict) {
  detail::HkSolver hk(view, row_restrict);
  hk.solve();
  Matching m;
  for (std::size_t c = 0; c < view.cols.size(); ++c)
    if (hk.col_match[c] != 0)
      m.edges.push_back({view.cols[c].kind, view.cols[c].id, hk.col_match[c]});
  return m;
}

inline int max_matching_size(const BipartiteView& view, const std::vector<int>& row_restrict) {
  detail::HkSolver hk(view, row_restrict);
  return hk.solve();
}

inline int term_rank(const BipartiteView& view) { return max_matching_size(view, view.rows); }

// |rows| minus the maximum matching on them; 0 means Hall's condition holds
// on every subset of rows.
inline int hall_deficiency(const BipartiteView& view, const std::vector<int>& rows) {
  if (rows.empty()) return 0;
  return int(rows.size()) - max_matching_size(view, rows);
}

// A set S of rows with |N(S)| < |S|, witnessing positive deficiency; empty
// when the deficiency is zero. Extracted from a maximum matching by
// alternating search from unmatched rows, so |S| - |N(S)| equals the
// deficiency.
inline std::vector<int> hall_witness(const BipartiteView& view, const std::vector<int>& rows) {
  detail::HkSolver hk(view, rows);
  const int matched = hk.solve();
  if (matched == int(rows.size())) return {};

  int max_row = int(hk.row_match.size()) - 1;
  std::vector<std::vector<int>> row_cols(max_row + 1);
  for (std::size_t c = 0; c < view.cols.size(); ++c)
    for (int r : view.cols[c].rows)
      if (hk.allowed[r]) row_cols[r].push_back(int(c));

  std::vector<char> row_seen(max_row + 1, 0), col_seen(view.cols.size(), 0);
  std::deque<int> q;
  for (int r : rows)
    if (hk.row_match[r] == -1 && !row_seen[r]) {
      row_seen[r] = 1;
      q.push_back(r);
    }
  while (!q.empty()) {
    const int r = q.front();
    q.pop_front();
    for (int c : row_cols[r]) {
      if (col_seen[c]) continue;
      col_seen[c] = 1;
      const int r2 = hk.col_match[c];
      if (r2 != 0 && !row_seen[r2]) {
        row_seen[r2] = 1;
        q.push_back(r2);
      }
    }
  }
  std::vector<int> witness;
  for (int r : rows)
    if (row_seen[r]) witness.push_back(r);
  std::sort(witness.begin(), witness.end());
  return witness;
}

namespace detail {

// Edmonds blossom algorithm, O(V^3); vertices are 0-based local indices.
struct BlossomMatcher {
  int n;
  const std::vector<std::vector<int>>& adj;
  std::vector<int> match, parent, base;
  std::vector<char> used, blossom;

  explicit BlossomMatcher(const std::vector<std::vector<int>>& a)
      : n(int(a.size())), adj(a), match(n, -1) {}

  void mark_path(int v, int b, int child) {
    while (base[v] != b) {
      blossom[base[v]] = 1;
      blossom[base[match[v]]] = 1;
      parent[v] = child;
      child = match[v];
      v = parent[match[v]];
    }
  }

  int lca(int a, int b) {
    std::vector<char> used2(n, 0);
    for (int v = a;; v = parent[match[v]]) {
      v = base[v];
      used2[v] = 1;
      if (match[v] == -1) break;
    }
    for (int v = b;; v = parent[match[v]]) {
      v = base[v];
      if (used2[v]) return v;
    }
  }

  int find_path(int root) {
    used.assign(n, 0);
    parent.assign(n, -1);
    base.resize(n);
    for (int i = 0; i < n; ++i) base[i] = i;
    used[root] = 1;
    std::deque<int> q{root};
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      for (int to : adj[v]) {
        if (base[v] == base[to] || match[v] == to) continue;
        if (to == root || (match[to] != -1 && parent[match[to]] != -1)) {
          const int curbase = lca(v, to);
          blossom.assign(n, 0);
          mark_path(v, curbase, to);
          mark_path(to, curbase, v);
          for (int i = 0; i < n; ++i)
            if (blossom[base[i]]) {
              base[i] = curbase;
              if (!used[i]) {
                used[i] = 1;
                q.push_back(i);
              }
            }
        } else if (parent[to] == -1) {
          parent[to] = v;
          if (match[to] == -1) return to;
          used[match[to]] = 1;
          q.push_back(match[to]);
        }
      }
    }
    return -1;
  }

  int solve() {
    int result = 0;
    for (int v = 0; v < n; ++v) {
      if (match[v] != -1) continue;
      int u = find_path(v);
      if (u == -1) continue;
      ++result;
      while (u != -1) {
        const int pv = parent[u];
        const int ppv = match[pv];
        match[u] = pv;
        match[pv] = u;
        u = ppv;
      }
    }
    return result;
  }
};

}  // namespace detail

// Maximum matching of an undirected graph given as 0-based adjacency lists;
// returns the mate of each vertex or -1.
inline std::vector<int> general_max_matching(const std::vector<std::vector<int>>& adj) {
  detail::BlossomMatcher bm(adj);
  bm.solve();
  return bm.match;
}

}  // namespace netstab
