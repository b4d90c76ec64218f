// netstab: structural stabilizability analysis of symmetric network patterns.
//
//   analyze  <system.json>                       verdict + certified bounds
//   attack   <system.json>  --budget k           worst-case actuator removal
//   recover  <system.json>  --candidates m.json  actuator recovery selection
//   verify   <system.json>  --samples N          Monte-Carlo numeric cross-check
//   reduce   <sets.json>    --keep k             set-union instance as a pattern
//
// Exit codes: 0 success, 2 input error, 3 internal invariant violation,
// 4 resource limit (exact search over threshold without --force-heuristic).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netstab/netstab.hpp"

namespace {

using njson = nlohmann::ordered_json;
using namespace netstab;

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr long long kEnumCap = 2000000;  // exact enumeration ceiling

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PatternError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// sum of C(m, i) for i <= k, saturating well above the enumeration cap
long long subsets_up_to(int m, int k) {
  long double total = 0.0L, c = 1.0L;
  for (int i = 0; i <= std::min(k, m); ++i) {
    total += c;
    if (total > 1e15L) return 1000000000000000ll;
    c = c * (m - i) / (i + 1.0L);
  }
  return static_cast<long long>(total);
}

long long choose_count(int m, int k) {
  if (k < 0 || k > m) return 0;
  long double c = 1.0L;
  for (int i = 0; i < k; ++i) {
    c = c * (m - i) / (i + 1.0L);
    if (c > 1e15L) return 1000000000000000ll;
  }
  return static_cast<long long>(c);
}

SearchLimits env_limits() {
  SearchLimits lim;
  if (const char* s = std::getenv("NETSTAB_EXACT_LIMIT")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (s[0] == '\0' || end == nullptr || *end != '\0' || v < 0)
      throw PatternError("NETSTAB_EXACT_LIMIT must be a nonnegative integer");
    lim.is_exact_limit = static_cast<int>(std::min(v, 1000000L));
    lim.packing_exact_limit = static_cast<int>(std::min(v, 1000000L));
  }
  return lim;
}

njson cycles_json(const std::vector<Cycle>& cycles) {
  njson arr = njson::array();
  for (const auto& c : cycles) arr.push_back(c.vertices);
  return arr;
}

njson histogram_json(const std::map<int, int>& h) {
  njson j = njson::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

njson estimate_json(const MdimEstimate& e) {
  njson j;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  j["exact"] = e.exact;
  j["search_exact"] = e.search_exact;
  j["reachable_term_rank"] = e.reachable_trank;
  j["cycle_packing"] = cycles_json(e.cycle_packing);
  j["independent_set"] = e.independent_set;
  return j;
}

njson make_envelope(const std::string& command, const std::vector<std::string>& args,
                    const std::string& input_path, const std::string& input_bytes) {
  njson rep;
  rep["tool"] = njson{{"name", "netstab"}, {"version", kVersion}};
  rep["command"] = command;
  rep["argv"] = args;
  rep["input"] = njson{{"path", input_path}, {"digest", fnv1a_digest(input_bytes)}};
  return rep;
}

void emit_text(std::ostream& os, const njson& v, const std::string& path) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      emit_text(os, it.value(), path.empty() ? it.key() : path + "." + it.key());
  } else if (v.is_array()) {
    bool nested = false;
    for (const auto& e : v)
      if (e.is_structured()) nested = true;
    if (!nested) {
      os << path << ": " << v.dump() << "\n";
    } else {
      int i = 0;
      for (const auto& e : v) emit_text(os, e, path + "[" + std::to_string(i++) + "]");
    }
  } else {
    os << path << ": " << v.dump() << "\n";
  }
}

struct OutputOptions {
  bool json = false;
  bool timings = true;
  std::chrono::steady_clock::time_point start;
};

void emit(njson& rep, const OutputOptions& opt) {
  if (opt.timings) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - opt.start)
                        .count();
    rep["timings"] = njson{{"total_ms", static_cast<long long>(ms)}};
  }
  if (opt.json)
    std::cout << rep.dump(2) << "\n";
  else
    emit_text(std::cout, rep, "");
}

const char* estimator_name(Estimator e) { return e == Estimator::Lower ? "lower" : "upper"; }

Estimator estimator_from(const std::string& s) {
  return s == "upper" ? Estimator::Upper : Estimator::Lower;
}

void run_analyze(const std::string& path, const std::vector<std::string>& args,
                 const OutputOptions& opt) {
  const std::string bytes = read_file(path);
  const SystemPattern p = parse_system(bytes);
  const StabilizabilityVerdict v = check_stabilizable(p);
  const MdimEstimate e = mdim_bounds(p, env_limits());

  njson rep = make_envelope("analyze", args, path, bytes);
  njson payload;
  payload["state_count"] = p.state_count();
  payload["input_count"] = p.input_count();
  payload["stabilizable"] = v.stabilizable;
  payload["missing_selfloops"] = v.missing_selfloops;
  payload["hall_deficiency"] = v.hall_deficiency;
  if (v.deficient_witness)
    payload["deficient_rows"] = *v.deficient_witness;
  else
    payload["deficient_rows"] = nullptr;
  payload["controllable_dim"] = generic_controllable_dim(p);
  payload["mdim"] = estimate_json(e);
  rep["payload"] = std::move(payload);
  OutputOptions o = opt;
  emit(rep, o);
}

void run_attack(const std::string& path, const std::vector<std::string>& args, int budget,
                const std::string& method, const std::string& estimator, bool force_heuristic,
                const OutputOptions& opt) {
  const std::string bytes = read_file(path);
  const SystemPattern p = parse_system(bytes);
  if (budget < 0) throw PatternError("--budget must be nonnegative");
  const Estimator est = estimator_from(estimator);
  const SearchLimits limits = env_limits();
  const int m = p.input_count();

  AttackResult result;
  std::string mode_name = "exact";
  bool use_reduction = (method == "reduction");
  if (!use_reduction && subsets_up_to(m, std::min(budget, m)) > kEnumCap) {
    if (!force_heuristic)
      throw ResourceLimit("exact attack enumeration exceeds " + std::to_string(kEnumCap) +
                          " subsets; rerun with --method reduction or --force-heuristic");
    use_reduction = true;
  }
  if (use_reduction) {
    SolveMode mode = SolveMode::Exact;
    if (choose_count(m, m - std::min(budget, m)) > kEnumCap) {
      if (!force_heuristic)
        throw ResourceLimit("exact set-union enumeration exceeds " + std::to_string(kEnumCap) +
                            " subsets; rerun with --force-heuristic");
      mode = SolveMode::Heuristic;
      mode_name = "heuristic";
    }
    result = attack_via_reduction(p, budget, est, mode, limits);
  } else {
    result = attack_exact(p, budget, est, limits);
  }

  njson rep = make_envelope("attack", args, path, bytes);
  njson payload;
  payload["budget"] = budget;
  payload["removed"] = result.removed;
  payload["objective"] = result.objective;
  payload["estimator"] = estimator_name(result.estimator);
  payload["method"] = result.method == AttackMethod::Exact ? "exact" : "reduction";
  payload["mode"] = mode_name;
  payload["approximate"] = result.approximate;
  payload["budget_clamped"] = result.budget_clamped;
  rep["payload"] = std::move(payload);
  OutputOptions o = opt;
  emit(rep, o);
}

void run_recover(const std::string& path, const std::string& cand_path,
                 const std::vector<std::string>& args, int budget, const std::string& method,
                 bool force_heuristic, const OutputOptions& opt) {
  const std::string bytes = read_file(path);
  const std::string cand_bytes = read_file(cand_path);
  const SystemPattern p = parse_system(bytes);
  const CandidatePattern cand = parse_candidates(cand_bytes, p.state_count());
  if (budget < 0) throw PatternError("--budget must be nonnegative");
  const SearchLimits limits = env_limits();

  std::string method_name = method;
  RecoveryResult result;
  if (method == "exact" &&
      subsets_up_to(cand.candidate_count(), std::min(budget, cand.candidate_count())) > kEnumCap) {
    if (!force_heuristic)
      throw ResourceLimit("exact recovery enumeration exceeds " + std::to_string(kEnumCap) +
                          " subsets; rerun with --method greedy or --force-heuristic");
    method_name = "greedy";
  }
  if (method_name == "exact")
    result = recover_exact(p, cand, budget, limits);
  else
    result = greedy_recover(p, cand, budget, limits);

  njson rep = make_envelope("recover", args, path, bytes);
  rep["candidates_input"] = njson{{"path", cand_path}, {"digest", fnv1a_digest(cand_bytes)}};
  njson payload;
  payload["budget"] = budget;
  payload["base_value"] = recovery_value(p, cand, {}, limits);
  payload["chosen"] = result.chosen;
  payload["picks"] = result.picks;
  payload["trace"] = result.trace;
  payload["final_value"] = result.final_value;
  payload["method"] = result.method == RecoveryMethod::Greedy ? "greedy" : "exact";
  payload["approximate"] = result.approximate;
  payload["budget_clamped"] = result.budget_clamped;
  rep["payload"] = std::move(payload);
  OutputOptions o = opt;
  emit(rep, o);
}

void run_verify(const std::string& path, const std::vector<std::string>& args, int samples,
                std::uint64_t seed, double tol, double stab_tol, const OutputOptions& opt) {
  const std::string bytes = read_file(path);
  const SystemPattern p = parse_system(bytes);
  if (samples < 1) throw PatternError("--samples must be >= 1");
  if (tol <= 0 || stab_tol <= 0) throw PatternError("tolerances must be positive");
  const MdimEstimate e = mdim_bounds(p, env_limits());
  const NumericReport num = monte_carlo_mdim(p, samples, seed, tol, stab_tol);

  int upper_violations = 0;
  for (const auto& [dim, count] : num.stabdim_histogram)
    if (dim > e.upper) upper_violations += count;

  int modal_rank = 0, modal_count = 0;
  for (const auto& [rank, count] : num.rank_histogram)
    if (count > modal_count) {
      modal_rank = rank;
      modal_count = count;
    }

  njson rep = make_envelope("verify", args, path, bytes);
  rep["seed"] = seed;
  njson payload;
  payload["samples"] = num.samples;
  payload["rank_tolerance"] = tol;
  payload["stability_tolerance"] = stab_tol;
  payload["rank_histogram"] = histogram_json(num.rank_histogram);
  payload["stabdim_histogram"] = histogram_json(num.stabdim_histogram);
  payload["best_stabdim"] = num.best_stabdim;
  payload["controllable_dim"] = generic_controllable_dim(p);
  payload["modal_rank"] = modal_rank;
  payload["modal_rank_share"] = samples > 0 ? double(modal_count) / double(samples) : 0.0;
  payload["bounds"] = estimate_json(e);
  payload["lower_attained"] = num.best_stabdim >= e.lower;
  payload["upper_violations"] = upper_violations;
  rep["payload"] = std::move(payload);
  OutputOptions o = opt;
  emit(rep, o);

  if (upper_violations > 0)
    throw InvariantViolation(std::to_string(upper_violations) +
                             " sampled stabilizable dimensions exceed the certified upper bound " +
                             std::to_string(e.upper));
}

void run_reduce(const std::string& path, const std::vector<std::string>& args, int keep,
                const std::string& out_path, const OutputOptions& opt) {
  const std::string bytes = read_file(path);
  const SetSystem sys = parse_set_system(bytes);
  if (keep < 0 || keep > int(sys.sets.size()))
    throw PatternError("--keep must be between 0 and the number of sets");
  const auto [pattern, budget] = reduce_min_k_union_to_attack(sys, keep);
  const std::string serialized = serialize_system(pattern);

  njson rep = make_envelope("reduce", args, path, bytes);
  njson payload;
  payload["universe"] = sys.universe_size;
  payload["set_count"] = int(sys.sets.size());
  payload["keep"] = keep;
  payload["attack_budget"] = budget;
  payload["state_count"] = pattern.state_count();
  payload["input_count"] = pattern.input_count();
  payload["system"] = njson::parse(serialized);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw PatternError("cannot write " + out_path);
    out << serialized;
    payload["out"] = out_path;
  }
  rep["payload"] = std::move(payload);
  OutputOptions o = opt;
  emit(rep, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structural stabilizability of symmetric network patterns"};
  app.require_subcommand(1);

  OutputOptions opt;
  opt.start = std::chrono::steady_clock::now();
  bool no_timings = false;
  app.add_flag("--json", opt.json, "emit the report as JSON (default: flat text)");
  app.add_flag("--no-timings", no_timings, "omit the timings block from the report");

  std::string file, cand_path, out_path;
  std::string attack_method = "exact", recover_method = "greedy", estimator = "lower";
  int budget = 0, keep = 0, samples = 200;
  std::uint64_t seed = 0;
  double tol = kRankTol, stab_tol = kStabTol;
  bool force_heuristic = false;

  CLI::App* analyze = app.add_subcommand("analyze", "stabilizability verdict + certified bounds");
  analyze->add_option("file", file, "system pattern JSON file")->required();

  CLI::App* attack = app.add_subcommand("attack", "worst-case actuator removal within a budget");
  attack->add_option("file", file, "system pattern JSON file")->required();
  attack->add_option("--budget", budget, "maximum number of inputs to remove")->required();
  attack->add_option("--method", attack_method, "exact | reduction")
      ->check(CLI::IsMember({"exact", "reduction"}));
  attack->add_option("--estimator", estimator, "bound optimized: lower | upper")
      ->check(CLI::IsMember({"lower", "upper"}));
  attack->add_flag("--force-heuristic", force_heuristic,
                   "fall back to the greedy solver instead of failing on large searches");

  CLI::App* recover = app.add_subcommand("recover", "select candidate inputs to restore value");
  recover->add_option("file", file, "system pattern JSON file")->required();
  recover->add_option("--candidates", cand_path, "candidate column JSON file")->required();
  recover->add_option("--budget", budget, "maximum number of candidates to add")->required();
  recover->add_option("--method", recover_method, "greedy | exact")
      ->check(CLI::IsMember({"greedy", "exact"}));
  recover->add_flag("--force-heuristic", force_heuristic,
                    "fall back to greedy instead of failing on large exact searches");

  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo numeric cross-check of the bounds");
  verify->add_option("file", file, "system pattern JSON file")->required();
  verify->add_option("--samples", samples, "number of sampled realizations");
  verify->add_option("--seed", seed, "base RNG seed");
  verify->add_option("--tol", tol, "relative rank tolerance on singular values");
  verify->add_option("--stab-tol", stab_tol, "absolute eigenvalue stability tolerance");

  CLI::App* reduce = app.add_subcommand("reduce", "encode a set-union instance as a pattern");
  reduce->add_option("file", file, "set system JSON file")->required();
  reduce->add_option("--keep", keep, "number of sets the adversary keeps")->required();
  reduce->add_option("--out", out_path, "write the encoded system pattern to this file");

  for (CLI::App* sub : {analyze, attack, recover, verify, reduce}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  opt.timings = !no_timings;

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (app.got_subcommand(analyze))
      run_analyze(file, args, opt);
    else if (app.got_subcommand(attack))
      run_attack(file, args, budget, attack_method, estimator, force_heuristic, opt);
    else if (app.got_subcommand(recover))
      run_recover(file, cand_path, args, budget, recover_method, force_heuristic, opt);
    else if (app.got_subcommand(verify))
      run_verify(file, args, samples, seed, tol, stab_tol, opt);
    else if (app.got_subcommand(reduce))
      run_reduce(file, args, keep, out_path, opt);
  } catch (const AssumptionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PatternError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
