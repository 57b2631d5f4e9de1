#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "stochcover/instance.hpp"
#include "stochcover/tree.hpp"

// Independent ground-truth engines: exhaustive enumeration, Monte Carlo, and
// the hardness-identity verifier. Everything here is deliberately brute force;
// size guards are hard errors so an oracle never returns an approximation.

namespace stochcover::oracle {

inline constexpr int kMaxEnumVertices = 16;
inline constexpr int kMaxAdaptiveEnumVertices = 14;
inline constexpr int kMaxSetcoverEnumSets = 20;
inline constexpr int kMaxMisVertices = 20;
inline constexpr int kMaxEdgeCoverVertices = 14;
inline constexpr int kMaxSandwichVertices = 12;

// P(every present vertex within r of `centers`), closed form.
inline double closed_form_success(const DistanceMatrix& d,
                                  const std::vector<VertexId>& centers,
                                  const std::vector<double>& probs, double r) {
  double prob = 1.0;
  for (int v = 0; v < d.n(); ++v) {
    bool covered = false;
    for (VertexId c : centers)
      if (d(v, c) <= r) {
        covered = true;
        break;
      }
    if (!covered) prob *= 1.0 - probs[v];
  }
  return prob;
}

// Exact max of closed_form_success over all center sets of size min(k,n).
// Lexicographically smallest maximizer wins.
inline std::pair<double, std::vector<VertexId>> brute_force_nonadaptive_opt(
    const DistanceMatrix& d, const std::vector<double>& probs, int k, double r) {
  const int n = d.n();
  if (n > kMaxEnumVertices)
    throw SizeGuardError("brute_force_nonadaptive_opt: n exceeds enumeration guard");
  const int size = std::min(k, n);
  std::vector<VertexId> centers(size);
  for (int i = 0; i < size; ++i) centers[i] = i;
  std::vector<VertexId> best_centers = centers;
  double best = closed_form_success(d, centers, probs, r);
  if (size > 0) {
    // next lexicographic combination
    while (true) {
      int i = size - 1;
      while (i >= 0 && centers[i] == n - size + i) --i;
      if (i < 0) break;
      ++centers[i];
      for (int j = i + 1; j < size; ++j) centers[j] = centers[j - 1] + 1;
      double val = closed_form_success(d, centers, probs, r);
      if (val > best) {
        best = val;
        best_centers = centers;
      }
    }
  }
  return {best, best_centers};
}

namespace detail {

inline std::uint32_t coverage_mask(const DistanceMatrix& d, VertexId center,
                                   std::uint32_t subset, double r) {
  std::uint32_t covered = 0;
  for (int v = 0; v < d.n(); ++v)
    if ((subset >> v & 1u) && d(v, center) <= r) covered |= 1u << v;
  return covered;
}

inline bool coverable_with(const DistanceMatrix& d, std::uint32_t uncovered,
                           double r, int budget) {
  if (uncovered == 0) return true;
  if (budget == 0) return false;
  int v = std::countr_zero(uncovered);
  for (int c = 0; c < d.n(); ++c) {
    if (d(v, c) > r) continue;
    if (coverable_with(d, uncovered & ~coverage_mask(d, c, uncovered, r), r,
                       budget - 1))
      return true;
  }
  return false;
}

}  // namespace detail

// Smallest c such that some center set of size c covers every subset vertex
// within r. Exhaustive.
inline int min_cover_size(const DistanceMatrix& d,
                          const std::vector<VertexId>& subset, double r) {
  if (d.n() > kMaxEnumVertices)
    throw SizeGuardError("min_cover_size: n exceeds enumeration guard");
  std::uint32_t mask = 0;
  for (VertexId v : subset) mask |= 1u << v;
  if (mask == 0) return 0;
  for (int c = 1; c <= d.n(); ++c)
    if (detail::coverable_with(d, mask, r, c)) return c;
  return d.n();  // unreachable: centers at the subset itself always work
}

inline int min_cover_size_mask(const DistanceMatrix& d, std::uint32_t mask,
                               double r) {
  std::vector<VertexId> subset;
  for (int v = 0; v < d.n(); ++v)
    if (mask >> v & 1u) subset.push_back(v);
  return min_cover_size(d, subset, r);
}

// Sum over all 2^n subsets of P(subset) * 1[min cover > k].
inline double brute_force_adaptive_failure(const DistanceMatrix& d,
                                           const std::vector<double>& probs,
                                           int k, double r) {
  const int n = d.n();
  if (n > kMaxAdaptiveEnumVertices)
    throw SizeGuardError("brute_force_adaptive_failure: n exceeds enumeration guard");
  double failure = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double weight = 1.0;
    for (int v = 0; v < n; ++v)
      weight *= (mask >> v & 1u) ? probs[v] : 1.0 - probs[v];
    if (weight == 0.0) continue;
    if (min_cover_size_mask(d, mask, r) > k) failure += weight;
  }
  return failure;
}

inline double exact_violation_probability_of_uncovered(
    const std::vector<double>& probs, const std::vector<int>& uncovered) {
  double covered_all = 1.0;
  for (int e : uncovered) covered_all *= 1.0 - probs[e];
  return 1.0 - covered_all;
}

// Minimum-cost selection with exact violation <= rho, over all 2^m selections.
// Lexicographically smallest (as a bitmask, fewer low sets first) tie-break.
inline std::pair<double, std::vector<int>> brute_force_setcover_opt(
    const SetCoverInstance& inst, double rho) {
  const int m = static_cast<int>(inst.sets.size());
  if (m > kMaxSetcoverEnumSets)
    throw SizeGuardError("brute_force_setcover_opt: set count exceeds enumeration guard");
  double best_cost = std::numeric_limits<double>::infinity();
  std::uint32_t best_sel = 0;
  bool found = false;
  for (std::uint32_t sel = 0; sel < (1u << m); ++sel) {
    std::vector<bool> covered(inst.n, false);
    double cost = 0.0;
    for (int i = 0; i < m; ++i)
      if (sel >> i & 1u) {
        cost += inst.sets[i].cost;
        for (int e : inst.sets[i].members) covered[e] = true;
      }
    if (cost >= best_cost) continue;
    std::vector<int> uncovered;
    for (int e = 0; e < inst.n; ++e)
      if (!covered[e]) uncovered.push_back(e);
    double violation =
        exact_violation_probability_of_uncovered(inst.element_probs, uncovered);
    if (violation <= rho + 1e-12) {
      best_cost = cost;
      best_sel = sel;
      found = true;
    }
  }
  if (!found) throw InfeasibleError("no selection meets the risk threshold");
  std::vector<int> out;
  for (int i = 0; i < m; ++i)
    if (best_sel >> i & 1u) out.push_back(i);
  return {best_cost, out};
}

struct MonteCarloResult {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

inline int monte_carlo_threads() {
  if (const char* env = std::getenv("STOCHCOVER_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Sharded Monte Carlo estimate of the adaptive failure probability. The
// sample stream is split into fixed-size shards with derived seeds, so the
// result is identical for any thread count or shard schedule.
inline MonteCarloResult monte_carlo_failure(const KCenterInstance& inst, int k,
                                            double r, std::uint64_t samples,
                                            std::uint64_t seed,
                                            int threads = monte_carlo_threads()) {
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (inst.n > kMaxEnumVertices)
    throw SizeGuardError("monte_carlo_failure: n exceeds enumeration guard");
  const RootedTree tree = build_rooted_tree(inst);
  const DistanceMatrix d = all_pairs_distances(tree);

  constexpr std::uint64_t kShardSize = 4096;
  const std::uint64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<std::uint64_t> shard_failures(shards, 0);

  auto run_shard = [&](std::uint64_t s) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
    std::uint64_t count = std::min(kShardSize, samples - s * kShardSize);
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint32_t mask = 0;
      for (int v = 0; v < inst.n; ++v)
        if (rng.next_double() < inst.probs[v]) mask |= 1u << v;
      if (min_cover_size_mask(d, mask, r) > k) ++failures;
    }
    shard_failures[s] = failures;
  };

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t s = next.fetch_add(1); s < shards; s = next.fetch_add(1))
      run_shard(s);
  };
  int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(shards)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::uint64_t failures = 0;
  for (std::uint64_t f : shard_failures) failures += f;
  MonteCarloResult res;
  res.samples = samples;
  res.estimate = static_cast<double>(failures) / static_cast<double>(samples);
  res.standard_error =
      std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(samples));
  return res;
}

// Exact (m, I): size of a maximum independent set and how many there are.
inline std::pair<int, std::uint64_t> count_max_independent_sets(
    const GraphInstance& g) {
  if (g.n > kMaxMisVertices)
    throw SizeGuardError("count_max_independent_sets: n exceeds enumeration guard");
  std::vector<std::uint32_t> adj(g.n, 0);
  for (const auto& e : g.edges) {
    adj[e.u] |= 1u << e.v;
    adj[e.v] |= 1u << e.u;
  }
  int best = 0;
  std::uint64_t count = 1;  // the empty set
  for (std::uint32_t mask = 1; mask < (1u << g.n); ++mask) {
    bool independent = true;
    for (std::uint32_t rest = mask; rest;) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      if (adj[v] & mask) {
        independent = false;
        break;
      }
    }
    if (!independent) continue;
    int size = std::popcount(mask);
    if (size > best) {
      best = size;
      count = 1;
    } else if (size == best) {
      ++count;
    }
  }
  return {best, count};
}

namespace detail {

// Exact minimum number of edges touching every vertex of `uncovered`.
// Branches on the lowest uncovered vertex.
inline void min_edge_cover_dfs(const std::vector<std::vector<std::uint32_t>>& incident,
                               std::uint32_t uncovered, int used, int& best) {
  if (used >= best) return;
  if (uncovered == 0) {
    best = used;
    return;
  }
  int v = std::countr_zero(uncovered);
  for (std::uint32_t cover : incident[v])
    min_edge_cover_dfs(incident, uncovered & ~cover, used + 1, best);
}

}  // namespace detail

struct EdgeCoverFailure {
  double f = 0.0;                       // failure probability at the given k
  std::vector<std::uint64_t> counts;    // counts[i] = N_i(G,k)
};

// f(k) = sum_i N_i(G,k) p^i (1-p)^{n-i}, where a subset fails iff its minimum
// edge cover needs at least k edges (so a size-m independent set fails at
// k = m, matching the maximum-independent-set count identity). The empty
// subset never fails.
inline EdgeCoverFailure edge_cover_failure(const GraphInstance& g, int k, double p) {
  if (g.n > kMaxEdgeCoverVertices)
    throw SizeGuardError("edge_cover_failure: n exceeds enumeration guard");
  std::vector<std::uint32_t> vertex_deg(g.n, 0);
  std::vector<std::vector<std::uint32_t>> incident(g.n);
  for (const auto& e : g.edges) {
    std::uint32_t cover = (1u << e.u) | (1u << e.v);
    incident[e.u].push_back(cover);
    incident[e.v].push_back(cover);
    ++vertex_deg[e.u];
    ++vertex_deg[e.v];
  }
  for (int v = 0; v < g.n; ++v)
    if (vertex_deg[v] == 0)
      throw ValidationError("edge_cover_failure: graph has an isolated vertex");

  EdgeCoverFailure out;
  out.counts.assign(g.n + 1, 0);
  for (std::uint32_t mask = 1; mask < (1u << g.n); ++mask) {
    int best = g.n + 1;  // any subset is coverable with |subset| edges
    detail::min_edge_cover_dfs(incident, mask, 0, best);
    if (best >= k) ++out.counts[std::popcount(mask)];
  }
  const double q = 1.0 - p;
  for (int i = 0; i <= g.n; ++i) {
    if (out.counts[i] == 0) continue;
    out.f += static_cast<double>(out.counts[i]) * std::pow(p, i) *
             std::pow(q, g.n - i);
  }
  return out;
}

struct HardnessReport {
  int n = 0;
  int m = 0;                 // maximum independent set size
  std::uint64_t mis_count = 0;  // I(G)
  double p = 0.0;
  double f_m = 0.0;          // edge-cover failure probability at k = m
  double lower = 0.0;        // f(m) / (3 p^m (1-p)^{n-m})
  double upper = 0.0;        // f(m) / (p^m (1-p)^{n-m})
  bool identity_holds = false;   // N_m(G,m) == I(G)
  bool sandwich_holds = false;   // lower <= I(G) <= upper
};

// Desk-scale check of the hardness reduction: the count identity plus the
// sandwich bounds at p = 2^-n.
inline HardnessReport verify_hardness_sandwich(const GraphInstance& g) {
  if (g.n > kMaxSandwichVertices)
    throw SizeGuardError("verify_hardness_sandwich: n exceeds enumeration guard");
  HardnessReport rep;
  rep.n = g.n;
  auto [m, count] = count_max_independent_sets(g);
  rep.m = m;
  rep.mis_count = count;
  rep.p = std::exp2(-g.n);
  auto ec = edge_cover_failure(g, m, rep.p);
  rep.f_m = ec.f;
  rep.identity_holds =
      m <= g.n && ec.counts[m] == count;
  const double scale = std::pow(rep.p, m) * std::pow(1.0 - rep.p, g.n - m);
  rep.lower = rep.f_m / (3.0 * scale);
  rep.upper = rep.f_m / scale;
  const double I = static_cast<double>(count);
  rep.sandwich_holds =
      rep.lower <= I * (1.0 + 1e-9) && I <= rep.upper * (1.0 + 1e-9);
  return rep;
}

}  // namespace stochcover::oracle
