#pragma once

// Symmetric zero/star structure of an LTI network (A pattern plus input
// pattern B) and numeric realizations of it. Patterns are immutable once
// constructed; the A part is kept closed under transposition.

#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netstab/linalg.hpp"

namespace netstab {

struct PatternError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using IndexPair = std::pair<int, int>;  // 1-based (row, column)

class SystemPattern {
 public:
  // Applies symmetric closure to the state entries; validates index ranges.
  SystemPattern(int n, int m, std::set<IndexPair> a_entries, std::set<IndexPair> b_entries)
      : n_(n), m_(m) {
    if (n < 0) throw PatternError("state count must be nonnegative");
    if (m < 0) throw PatternError("input count must be nonnegative");
    for (const auto& [i, j] : a_entries) {
      if (i < 1 || i > n || j < 1 || j > n)
        throw PatternError("a entry [" + std::to_string(i) + "," + std::to_string(j) +
                           "] out of range 1.." + std::to_string(n));
      a_.insert({i, j});
      a_.insert({j, i});
    }
    for (const auto& [i, j] : b_entries) {
      if (i < 1 || i > n)
        throw PatternError("b entry [" + std::to_string(i) + "," + std::to_string(j) +
                           "] state index out of range 1.." + std::to_string(n));
      if (j < 1 || j > m)
        throw PatternError("b entry [" + std::to_string(i) + "," + std::to_string(j) +
                           "] input index out of range 1.." + std::to_string(m));
      b_.insert({i, j});
    }
  }

  int state_count() const { return n_; }
  int input_count() const { return m_; }
  const std::set<IndexPair>& a_entries() const { return a_; }
  const std::set<IndexPair>& b_entries() const { return b_; }
  bool a_star(int i, int j) const { return a_.count({i, j}) > 0; }
  bool b_star(int i, int j) const { return b_.count({i, j}) > 0; }

  bool operator==(const SystemPattern& o) const {
    return n_ == o.n_ && m_ == o.m_ && a_ == o.a_ && b_ == o.b_;
  }

 private:
  int n_ = 0;
  int m_ = 0;
  std::set<IndexPair> a_;
  std::set<IndexPair> b_;
};

class CandidatePattern {
 public:
  CandidatePattern(int n, int m_can, std::set<IndexPair> entries) : n_(n), m_can_(m_can) {
    if (m_can < 0) throw PatternError("candidate count must be nonnegative");
    for (const auto& [i, j] : entries) {
      if (i < 1 || i > n)
        throw PatternError("candidate entry [" + std::to_string(i) + "," + std::to_string(j) +
                           "] state index out of range 1.." + std::to_string(n));
      if (j < 1 || j > m_can)
        throw PatternError("candidate entry [" + std::to_string(i) + "," + std::to_string(j) +
                           "] column index out of range 1.." + std::to_string(m_can));
    }
    entries_ = std::move(entries);
  }

  int state_count() const { return n_; }
  int candidate_count() const { return m_can_; }
  const std::set<IndexPair>& entries() const { return entries_; }

 private:
  int n_ = 0;
  int m_can_ = 0;
  std::set<IndexPair> entries_;  // (state, candidate column)
};

struct NumericRealization {
  Mat a;
  Mat b;
  std::uint64_t seed = 0;
};

namespace detail {

inline long long require_int(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number_integer())
    throw PatternError(what + " must be an integer, got " + v.dump());
  return v.get<long long>();
}

inline IndexPair require_pair(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2)
    throw PatternError(what + " entry " + v.dump() + " must be a pair [i,j]");
  return {int(require_int(v[0], what)), int(require_int(v[1], what))};
}

}  // namespace detail

// Accepts {"n": int, "a_edges": [[i,j],...], "b_edges": [[i,j],...]} with an
// optional "m" giving the input count (otherwise the largest input index used).
// Each undirected state edge may be listed in either orientation; exact
// duplicates are rejected.
inline SystemPattern parse_system(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PatternError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw PatternError("top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "n" && key != "m" && key != "a_edges" && key != "b_edges")
      throw PatternError("unknown key \"" + key + "\"");
  }
  if (!j.contains("n")) throw PatternError("missing key \"n\"");
  const long long n = detail::require_int(j["n"], "n");
  if (n <= 0) throw PatternError("n must be positive, got " + std::to_string(n));

  std::set<IndexPair> a, b;
  if (j.contains("a_edges")) {
    if (!j["a_edges"].is_array()) throw PatternError("a_edges must be an array");
    for (const auto& e : j["a_edges"]) {
      const IndexPair p = detail::require_pair(e, "a_edges");
      if (p.first < 1 || p.first > n || p.second < 1 || p.second > n)
        throw PatternError("a_edges entry " + e.dump() + " out of range 1.." + std::to_string(n));
      if (!a.insert(p).second) throw PatternError("duplicate a_edges entry " + e.dump());
    }
  }
  int m = 0;
  if (j.contains("b_edges")) {
    if (!j["b_edges"].is_array()) throw PatternError("b_edges must be an array");
    for (const auto& e : j["b_edges"]) {
      const IndexPair p = detail::require_pair(e, "b_edges");
      if (p.first < 1 || p.first > n)
        throw PatternError("b_edges entry " + e.dump() + " state index out of range 1.." +
                           std::to_string(n));
      if (p.second < 1) throw PatternError("b_edges entry " + e.dump() + " input index must be >= 1");
      if (!b.insert(p).second) throw PatternError("duplicate b_edges entry " + e.dump());
      m = std::max(m, p.second);
    }
  }
  if (j.contains("m")) {
    const long long mf = detail::require_int(j["m"], "m");
    if (mf < m)
      throw PatternError("m = " + std::to_string(mf) + " smaller than largest input index " +
                         std::to_string(m));
    m = int(mf);
  }
  return SystemPattern(int(n), m, std::move(a), std::move(b));
}

// Canonical form: each undirected state edge written once with i <= j.
inline std::string serialize_system(const SystemPattern& p) {
  nlohmann::ordered_json j;
  j["n"] = p.state_count();
  j["m"] = p.input_count();
  j["a_edges"] = nlohmann::json::array();
  for (const auto& [i, k] : p.a_entries())
    if (i <= k) j["a_edges"].push_back({i, k});
  j["b_edges"] = nlohmann::json::array();
  for (const auto& [i, k] : p.b_entries()) j["b_edges"].push_back({i, k});
  return j.dump(2) + "\n";
}

// Accepts {"m_can": int, "edges": [[state, candidate],...]}.
inline CandidatePattern parse_candidates(const std::string& text, int n) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PatternError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw PatternError("top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "m_can" && key != "edges") throw PatternError("unknown key \"" + key + "\"");
  }
  if (!j.contains("m_can")) throw PatternError("missing key \"m_can\"");
  const long long m_can = detail::require_int(j["m_can"], "m_can");
  if (m_can < 0) throw PatternError("m_can must be nonnegative");
  std::set<IndexPair> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw PatternError("edges must be an array");
    for (const auto& e : j["edges"]) {
      const IndexPair p = detail::require_pair(e, "edges");
      if (!edges.insert(p).second) throw PatternError("duplicate edges entry " + e.dump());
    }
  }
  return CandidatePattern(n, int(m_can), std::move(edges));
}

// Restricts B to the given input columns, renumbering them 1..|keep| in the
// original column order.
inline SystemPattern select_columns(const SystemPattern& p, const std::vector<int>& keep) {
  std::set<int> ks(keep.begin(), keep.end());
  for (int j : ks)
    if (j < 1 || j > p.input_count())
      throw PatternError("selected column " + std::to_string(j) + " out of range 1.." +
                         std::to_string(p.input_count()));
  std::vector<int> order(ks.begin(), ks.end());
  std::set<IndexPair> b;
  for (const auto& [i, j] : p.b_entries()) {
    const auto it = std::find(order.begin(), order.end(), j);
    if (it != order.end()) b.insert({i, int(it - order.begin()) + 1});
  }
  return SystemPattern(p.state_count(), int(order.size()), p.a_entries(), std::move(b));
}

// Appends the chosen candidate columns after the existing inputs, in ascending
// candidate order.
inline SystemPattern append_candidates(const SystemPattern& p, const CandidatePattern& cand,
                                       const std::vector<int>& chosen) {
  if (cand.state_count() != p.state_count())
    throw PatternError("candidate pattern is for a different state count");
  std::set<int> cs(chosen.begin(), chosen.end());
  for (int c : cs)
    if (c < 1 || c > cand.candidate_count())
      throw PatternError("chosen candidate " + std::to_string(c) + " out of range 1.." +
                         std::to_string(cand.candidate_count()));
  std::vector<int> order(cs.begin(), cs.end());
  std::set<IndexPair> b = p.b_entries();
  for (const auto& [i, c] : cand.entries()) {
    const auto it = std::find(order.begin(), order.end(), c);
    if (it != order.end()) b.insert({i, p.input_count() + int(it - order.begin()) + 1});
  }
  return SystemPattern(p.state_count(), p.input_count() + int(order.size()), p.a_entries(),
                       std::move(b));
}

namespace detail {

// One value per independent star parameter, uniform on +-[1e-3, 1]. The band
// keeps sampled entries away from zero so numeric rank decisions are stable.
inline double draw_band(std::mt19937_64& eng) {
  const std::uint64_t r = eng();
  const double u = double(r >> 11) * 0x1.0p-53;  // [0, 1)
  const double mag = 1e-3 + u * (1.0 - 1e-3);
  return (r & 1u) ? -mag : mag;
}

}  // namespace detail

// Deterministic for a given seed; symmetric state entries share one draw.
inline NumericRealization sample_realization(const SystemPattern& p, std::uint64_t seed) {
  const int n = p.state_count();
  const int m = p.input_count();
  NumericRealization r;
  r.seed = seed;
  r.a = Mat(n, n);
  r.b = Mat(n, m);
  std::mt19937_64 eng(seed);
  for (const auto& [i, j] : p.a_entries()) {
    if (i > j) continue;
    const double v = detail::draw_band(eng);
    r.a(i - 1, j - 1) = v;
    r.a(j - 1, i - 1) = v;
  }
  for (const auto& [i, j] : p.b_entries()) r.b(i - 1, j - 1) = detail::draw_band(eng);
  return r;
}

}  // namespace netstab
