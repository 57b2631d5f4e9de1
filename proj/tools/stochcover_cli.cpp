// Command-line front end: solvers, verification oracles, instance generators
// and timing benchmarks, all emitting stable JSON reports.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stochcover/kcenter_adaptive.hpp"
#include "stochcover/kcenter_nonadaptive.hpp"
#include "stochcover/oracle.hpp"
#include "stochcover/setcover.hpp"

using json = nlohmann::ordered_json;
using namespace stochcover;
namespace orc = stochcover::oracle;

namespace {

constexpr int kSchemaVersion = 1;

double now_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fingerprint(const std::string& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const json& report, const std::string& out_path) {
  std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file: " + out_path);
    out << text;
  }
}

json base_report(const std::string& command, const std::string& doc) {
  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = command;
  report["instance_fingerprint"] = fingerprint(doc);
  return report;
}

// Binary searches mirroring the library solvers, with a per-evaluation trace.
struct TraceEntry {
  double r;
  double value;
};

CenterSolution traced_nonadaptive(const KCenterInstance& inst, int k, double rho,
                                  std::vector<TraceEntry>& trace) {
  if (k >= inst.n) return solve_nonadaptive(inst, k, rho);
  auto tree = build_rooted_tree(inst);
  auto d = all_pairs_distances(tree);
  auto radii = candidate_radii(d);
  const double threshold = (1.0 - rho) - 1e-9;
  auto value_at = [&](double r) {
    auto got = max_success_probability(tree, d, inst.probs, k, r);
    trace.push_back({r, got.first});
    return got;
  };
  if (value_at(radii.back()).first < threshold)
    throw InfeasibleError("no radius meets the risk threshold");
  size_t lo = 0, hi = radii.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (value_at(radii[mid]).first >= threshold)
      hi = mid;
    else
      lo = mid + 1;
  }
  auto [prob, table] = value_at(radii[lo]);
  CenterSolution sol;
  sol.radius = radii[lo];
  sol.success_probability = prob;
  sol.centers = reconstruct_centers(table, tree, d);
  return sol;
}

VarResult traced_adaptive(const KCenterInstance& inst, int k, double rho,
                          std::vector<TraceEntry>& trace) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0, 1]");
  if (k < 0) throw ValidationError("k must be nonnegative");
  auto tree = build_rooted_tree(inst);
  auto d = all_pairs_distances(tree);
  auto radii = candidate_radii(d);
  auto failure_at = [&](double r) {
    double f = failure_probability(tree, d, inst.probs, k, r);
    trace.push_back({r, f});
    return f;
  };
  if (failure_at(radii.back()) > rho + 1e-9)
    throw InfeasibleError("no radius meets the risk threshold");
  size_t lo = 0, hi = radii.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (failure_at(radii[mid]) <= rho + 1e-9)
      hi = mid;
    else
      lo = mid + 1;
  }
  VarResult res;
  res.radius = radii[lo];
  res.failure_probability = failure_at(radii[lo]);
  res.k = k;
  res.rho = rho;
  return res;
}

json trace_json(const std::vector<TraceEntry>& trace) {
  json arr = json::array();
  for (const auto& e : trace) arr.push_back({{"r", e.r}, {"value", e.value}});
  return arr;
}

int cmd_solve_kcenter(const std::string& instance_path, const std::string& mode,
                      int k, double rho, std::optional<double> radius,
                      const std::string& out_path) {
  auto t0 = std::chrono::steady_clock::now();
  std::string doc = read_file(instance_path);
  auto inst = std::get<KCenterInstance>(parse_instance(doc));
  json report = base_report("solve-kcenter", doc);
  json result;
  result["mode"] = mode;
  result["k"] = k;
  result["rho"] = rho;
  std::vector<TraceEntry> trace;
  if (radius) {
    // single-radius evaluation, no search
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    result["r"] = *radius;
    if (mode == "nonadaptive") {
      auto [prob, table] = max_success_probability(tree, d, inst.probs, k, *radius);
      result["success_probability"] = prob;
      result["feasible"] = prob >= (1.0 - rho) - 1e-9;
      if (k > 0 && k < inst.n)
        result["centers"] = reconstruct_centers(table, tree, d);
    } else {
      double f = failure_probability(tree, d, inst.probs, k, *radius);
      result["failure_probability"] = f;
      result["feasible"] = f <= rho + 1e-9;
    }
  } else if (mode == "nonadaptive") {
    auto sol = traced_nonadaptive(inst, k, rho, trace);
    result["r_star"] = sol.radius;
    result["success_probability"] = sol.success_probability;
    result["centers"] = sol.centers;
  } else {
    auto var = traced_adaptive(inst, k, rho, trace);
    result["r_star"] = var.radius;
    result["failure_probability"] = var.failure_probability;
  }
  report["result"] = result;
  report["trace"] = trace_json(trace);
  report["timings"] = {{"total_ms", now_ms(t0)}};
  emit(report, out_path);
  return 0;
}

int cmd_solve_setcover(const std::string& instance_path, double rho,
                       bool with_oracle, const std::string& out_path) {
  auto t0 = std::chrono::steady_clock::now();
  std::string doc = read_file(instance_path);
  auto inst = std::get<SetCoverInstance>(parse_instance(doc));
  json report = base_report("solve-setcover", doc);
  auto sol = solve_chance_setcover(inst, rho);
  json result;
  result["rho"] = rho;
  result["set_ids"] = sol.set_ids;
  result["total_cost"] = sol.total_cost;
  result["uncovered_elements"] = sol.uncovered_elements;
  result["violation_probability"] = sol.violation_probability;
  if (with_oracle) {
    auto [opt_cost, opt_sel] = orc::brute_force_setcover_opt(inst, rho);
    result["oracle_cost"] = opt_cost;
    result["oracle_set_ids"] = opt_sel;
    result["ratio"] = opt_cost > 0.0 ? sol.total_cost / opt_cost : 1.0;
    result["ratio_bound"] = std::log(static_cast<double>(inst.n)) + 1.0;
  }
  report["result"] = result;
  report["timings"] = {{"total_ms", now_ms(t0)}};
  emit(report, out_path);
  return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& mode, int k,
               std::optional<double> radius, long samples, std::uint64_t seed,
               const std::string& out_path) {
  auto t0 = std::chrono::steady_clock::now();
  std::string doc = read_file(instance_path);
  json report = base_report("verify", doc);
  json result;
  result["mode"] = mode;
  if (mode == "hardness") {
    auto g = std::get<GraphInstance>(parse_instance(doc));
    auto rep = orc::verify_hardness_sandwich(g);
    result["n"] = rep.n;
    result["m"] = rep.m;
    result["mis_count"] = rep.mis_count;
    result["p"] = rep.p;
    result["f_m"] = rep.f_m;
    result["lower"] = rep.lower;
    result["upper"] = rep.upper;
    result["identity_holds"] = rep.identity_holds;
    result["sandwich_holds"] = rep.sandwich_holds;
  } else {
    auto inst = std::get<KCenterInstance>(parse_instance(doc));
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    auto radii = radius ? std::vector<double>{*radius} : candidate_radii(d);
    result["k"] = k;
    double worst = 0.0;
    json per_radius = json::array();
    for (double r : radii) {
      double solver_value, oracle_value;
      if (mode == "nonadaptive") {
        solver_value = max_success_probability(tree, d, inst.probs, k, r).first;
        oracle_value = orc::brute_force_nonadaptive_opt(d, inst.probs, k, r).first;
      } else {
        solver_value = failure_probability(tree, d, inst.probs, k, r);
        oracle_value = orc::brute_force_adaptive_failure(d, inst.probs, k, r);
      }
      double diff = std::abs(solver_value - oracle_value);
      worst = std::max(worst, diff);
      per_radius.push_back({{"r", r},
                            {"solver", solver_value},
                            {"oracle", oracle_value},
                            {"difference", diff}});
    }
    result["per_radius"] = per_radius;
    result["max_difference"] = worst;
    result["agrees"] = worst <= 1e-9;
    if (samples > 0) {
      if (!radius)
        throw ValidationError("--samples requires --radius");
      double r = *radius;
      auto mc = orc::monte_carlo_failure(inst, k, r,
                                         static_cast<std::uint64_t>(samples), seed);
      double exact = mode == "nonadaptive"
                         ? 1.0 - max_success_probability(tree, d, inst.probs, k, r).first
                         : failure_probability(tree, d, inst.probs, k, r);
      result["monte_carlo"] = {{"samples", samples},
                               {"seed", seed},
                               {"estimate", mc.estimate},
                               {"standard_error", mc.standard_error},
                               {"exact", exact},
                               {"within_3_sigma",
                                std::abs(mc.estimate - exact) <=
                                    3.0 * mc.standard_error + 1e-12}};
    }
  }
  report["result"] = result;
  report["timings"] = {{"total_ms", now_ms(t0)}};
  emit(report, out_path);
  return 0;
}

int cmd_gen(const std::string& type, int n, int m, std::uint64_t seed,
            const std::string& out_path) {
  std::string doc;
  if (type == "tree")
    doc = serialize_instance(generate_random_tree(n, seed));
  else
    doc = serialize_instance(generate_random_setcover(n, m > 0 ? m : n, seed));
  if (out_path.empty()) {
    std::cout << doc << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file: " + out_path);
    out << doc << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& suite, const std::vector<int>& sizes,
              const std::vector<int>& ks, std::uint64_t seed,
              const std::string& out_path) {
  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "bench";
  report["suite"] = suite;
  json cells = json::array();
  std::vector<double> log_n, log_t;
  for (int n : sizes) {
    for (int k : ks) {
      auto inst = generate_random_tree(n, seed);
      auto t0 = std::chrono::steady_clock::now();
      if (suite == "nonadaptive")
        solve_nonadaptive(inst, k, 0.5);
      else
        solve_adaptive_var(inst, k, 0.5);
      double ms = now_ms(t0);
      cells.push_back({{"n", n}, {"k", k}, {"ms", ms}});
      if (k == ks.front()) {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_t.push_back(std::log(std::max(ms, 1e-3)));
      }
    }
  }
  report["cells"] = cells;
  if (log_n.size() >= 2) {
    // least-squares slope of log t vs log n at the first k
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < log_n.size(); ++i) {
      sx += log_n[i];
      sy += log_t[i];
      sxx += log_n[i] * log_n[i];
      sxy += log_n[i] * log_t[i];
    }
    double den = log_n.size() * sxx - sx * sx;
    report["growth_exponent"] = (log_n.size() * sxy - sx * sy) / den;
  }
  emit(report, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chance-constrained covering solvers on tree metrics"};
  app.require_subcommand(1);

  std::string instance_path, mode, out_path, type = "tree", suite;
  int k = -1, n = 0, m = 0;
  double rho = 0.0;
  double radius_flag = -1.0;
  bool has_radius = false, with_oracle = false;
  long samples = 0;
  std::uint64_t seed = 0;
  std::vector<int> sizes, ks;

  auto* sk = app.add_subcommand("solve-kcenter", "exact k-center solve");
  sk->add_option("--instance", instance_path)->required();
  sk->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"nonadaptive", "adaptive"}));
  sk->add_option("--k", k)->required();
  sk->add_option("--rho", rho)->required();
  sk->add_option("--radius", radius_flag)->each([&](const std::string&) {
    has_radius = true;
  });
  sk->add_option("--out", out_path);

  auto* sc = app.add_subcommand("solve-setcover", "greedy chance set cover");
  sc->add_option("--instance", instance_path)->required();
  sc->add_option("--rho", rho)->required();
  sc->add_flag("--oracle", with_oracle);
  sc->add_option("--out", out_path);

  auto* vf = app.add_subcommand("verify", "solver vs oracle comparison");
  vf->add_option("--instance", instance_path)->required();
  vf->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"nonadaptive", "adaptive", "hardness"}));
  vf->add_option("--k", k);
  vf->add_option("--radius", radius_flag)->each([&](const std::string&) {
    has_radius = true;
  });
  vf->add_option("--samples", samples);
  vf->add_option("--seed", seed);
  vf->add_option("--out", out_path);

  auto* gn = app.add_subcommand("gen", "random instance generator");
  gn->add_option("--type", type)->check(CLI::IsMember({"tree", "setcover"}));
  gn->add_option("--n", n)->required();
  gn->add_option("--m", m);
  gn->add_option("--seed", seed)->required();
  gn->add_option("--out", out_path);

  auto* bn = app.add_subcommand("bench", "timing suite");
  bn->add_option("--suite", suite)
      ->required()
      ->check(CLI::IsMember({"nonadaptive", "adaptive"}));
  bn->add_option("--sizes", sizes)->required()->delimiter(',');
  bn->add_option("--k", ks)->required()->delimiter(',');
  bn->add_option("--seed", seed);
  bn->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::optional<double> radius =
        has_radius ? std::optional<double>(radius_flag) : std::nullopt;
    if (sk->parsed())
      return cmd_solve_kcenter(instance_path, mode, k, rho, radius, out_path);
    if (sc->parsed())
      return cmd_solve_setcover(instance_path, rho, with_oracle, out_path);
    if (vf->parsed()) {
      if (mode != "hardness" && k < 0) {
        std::cerr << "verify: --k is required for mode " << mode << "\n";
        return 2;
      }
      return cmd_verify(instance_path, mode, k, radius, samples, seed, out_path);
    }
    if (gn->parsed()) return cmd_gen(type, n, m, seed, out_path);
    if (bn->parsed()) {
      if (sizes.empty() || ks.empty()) {
        std::cerr << "bench: --sizes and --k must be nonempty\n";
        return 2;
      }
      return cmd_bench(suite, sizes, ks, seed, out_path);
    }
  } catch (const SizeGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
