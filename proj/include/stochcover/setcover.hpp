#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stochcover/instance.hpp"

// Non-adaptive stochastic set cover via the exact reformulation to partial
// set cover: leaving element j uncovered costs penalty l_j = ln 1/(1-p_j),
// and a selection meets the probabilistic constraint iff its total uncovered
// penalty stays within the budget l = ln 1/(1-rho). The transform is exact;
// only the covering step is approximate (greedy), and feasibility of the
// output is always certified with the exact probability formula, never the
// penalty proxy.

namespace stochcover {

struct PartialCoverInstance {
  std::vector<CoverSet> sets;
  std::vector<double> penalties;    // l_j; ignored for mandatory elements
  std::vector<bool> mandatory;      // p_j == 1
  double budget = 0.0;              // l
};

struct CoverSolution {
  std::vector<int> set_ids;
  double total_cost = 0.0;
  std::vector<int> uncovered_elements;
  double violation_probability = 0.0;
};

inline double exact_violation_probability(const SetCoverInstance& inst,
                                          const std::vector<int>& chosen_sets) {
  std::vector<bool> covered(inst.n, false);
  for (int i : chosen_sets)
    for (int e : inst.sets[i].members) covered[e] = true;
  double all_absent = 1.0;
  for (int e = 0; e < inst.n; ++e)
    if (!covered[e]) all_absent *= 1.0 - inst.element_probs[e];
  return 1.0 - all_absent;
}

inline PartialCoverInstance to_partial_cover(const SetCoverInstance& inst,
                                             double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0, 1]");
  PartialCoverInstance pc;
  pc.sets = inst.sets;
  pc.penalties.assign(inst.n, 0.0);
  pc.mandatory.assign(inst.n, false);
  std::vector<bool> coverable(inst.n, false);
  for (const auto& s : inst.sets)
    for (int e : s.members) coverable[e] = true;
  for (int e = 0; e < inst.n; ++e) {
    if (inst.element_probs[e] >= 1.0) {
      pc.mandatory[e] = true;
      if (!coverable[e])
        throw InfeasibleError("a certain element belongs to no set");
    } else {
      pc.penalties[e] = -std::log1p(-inst.element_probs[e]);  // ln 1/(1-p)
    }
  }
  pc.budget = rho >= 1.0 ? std::numeric_limits<double>::infinity()
                         : -std::log1p(-rho);
  return pc;
}

// Weighted greedy for the partial cover: mandatory elements first (plain
// set-cover greedy), then penalty mass per unit cost until the uncovered
// penalty fits the budget. Gains are capped at the still-needed excess so the
// classical H_n charging bound applies. Redundant picks are pruned in reverse
// order against the exact feasibility check.
inline std::vector<int> greedy_partial_cover(const PartialCoverInstance& pc) {
  const int m = static_cast<int>(pc.sets.size());
  const int n = static_cast<int>(pc.penalties.size());
  std::vector<bool> covered(n, false);
  std::vector<int> picks;
  std::vector<bool> chosen(m, false);

  auto cover_with = [&](int i) {
    picks.push_back(i);
    chosen[i] = true;
    for (int e : pc.sets[i].members) covered[e] = true;
  };

  // phase 1: mandatory elements
  auto mandatory_left = [&] {
    for (int e = 0; e < n; ++e)
      if (pc.mandatory[e] && !covered[e]) return true;
    return false;
  };
  while (mandatory_left()) {
    int best = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (chosen[i]) continue;
      int gain = 0;
      for (int e : pc.sets[i].members)
        if (pc.mandatory[e] && !covered[e]) ++gain;
      if (gain == 0) continue;
      double ratio = gain / pc.sets[i].cost;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = i;
      }
    }
    if (best < 0) throw InfeasibleError("mandatory element not coverable");
    cover_with(best);
  }

  // phase 2: shed uncovered penalty down to the budget
  auto residual = [&] {
    double p = 0.0;
    for (int e = 0; e < n; ++e)
      if (!pc.mandatory[e] && !covered[e]) p += pc.penalties[e];
    return p;
  };
  while (residual() > pc.budget + 1e-12) {
    const double need = residual() - pc.budget;
    int best = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (chosen[i]) continue;
      double gain = 0.0;
      for (int e : pc.sets[i].members)
        if (!pc.mandatory[e] && !covered[e]) gain += pc.penalties[e];
      gain = std::min(gain, need);
      if (gain <= 0.0) continue;
      double ratio = gain / pc.sets[i].cost;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = i;
      }
    }
    if (best < 0)
      throw InfeasibleError("uncovered penalty cannot be reduced to the budget");
    cover_with(best);
  }

  // prune, newest first
  for (int idx = static_cast<int>(picks.size()) - 1; idx >= 0; --idx) {
    std::vector<bool> cov(n, false);
    for (int j = 0; j < static_cast<int>(picks.size()); ++j)
      if (j != idx)
        for (int e : pc.sets[picks[j]].members) cov[e] = true;
    bool ok = true;
    double pen = 0.0;
    for (int e = 0; e < n && ok; ++e) {
      if (cov[e]) continue;
      if (pc.mandatory[e])
        ok = false;
      else
        pen += pc.penalties[e];
    }
    if (ok && pen <= pc.budget + 1e-12) picks.erase(picks.begin() + idx);
  }
  std::sort(picks.begin(), picks.end());
  return picks;
}

inline CoverSolution solve_chance_setcover(const SetCoverInstance& inst,
                                           double rho) {
  PartialCoverInstance pc = to_partial_cover(inst, rho);
  CoverSolution sol;
  sol.set_ids = greedy_partial_cover(pc);
  std::vector<bool> covered(inst.n, false);
  for (int i : sol.set_ids) {
    sol.total_cost += inst.sets[i].cost;
    for (int e : inst.sets[i].members) covered[e] = true;
  }
  for (int e = 0; e < inst.n; ++e)
    if (!covered[e]) sol.uncovered_elements.push_back(e);
  // feasibility is decided by the probability itself, not the penalty proxy
  sol.violation_probability = exact_violation_probability(inst, sol.set_ids);
  if (sol.violation_probability > rho + 1e-12)
    throw InfeasibleError("greedy cover exceeds the risk threshold");
  return sol;
}

}  // namespace stochcover
