#pragma once

#include <algorithm>
#include <cassert>
#include <set>
#include <vector>

#include "stochcover/instance.hpp"
#include "stochcover/tree.hpp"

// Exact non-adaptive stochastic k-center on tree metrics.
//
// For a fixed radius r the solver maximizes the success probability
// P(every present vertex within r of the chosen centers) with a bottom-up
// dynamic program over two tables:
//
//   H(v, j)      best success probability for the subtree under v using at
//                most j centers inside it.
//   R(v, l, j, v2)  best probability for the partial subtree made of v, its
//                first l child edges and their subtrees, given that v2 is the
//                center closest to v; j counts v2 itself plus centers inside
//                the partial subtree.
//
// The optimal radius is then the smallest candidate radius whose maximized
// success probability clears the risk threshold (feasibility is monotone in
// r, so binary search applies).

namespace stochcover {

struct SuccessTable {
  int k = 0;
  double r = 0.0;
  // H[v][j], j in [0, k]
  std::vector<std::vector<double>> H;
  // R[v] indexed by (l * (k+1) + j) * n + v2, l in [0, #children(v)]
  std::vector<std::vector<double>> R;
  // subtree vertex lists, ascending id (deterministic argmax scans)
  std::vector<std::vector<VertexId>> subtree;

  double r_value(const RootedTree& t, VertexId v, int l, int j, VertexId v2) const {
    const int n = t.n();
    return R[v][(static_cast<size_t>(l) * (k + 1) + j) * n + v2];
  }
};

struct CenterSolution {
  std::vector<VertexId> centers;
  double radius = 0.0;
  double success_probability = 0.0;
};

inline std::pair<double, SuccessTable> max_success_probability(
    const RootedTree& tree, const DistanceMatrix& d,
    const std::vector<double>& probs, int k, double r) {
  const int n = tree.n();
  const int keff = std::min(k, n);

  SuccessTable table;
  table.k = keff;
  table.r = r;
  table.H.assign(n, std::vector<double>(keff + 1, 0.0));
  table.R.resize(n);
  table.subtree.assign(n, {});

  for (VertexId v1 : tree.postorder) {
    const auto& kids = tree.children[v1];
    const int t1 = static_cast<int>(kids.size());
    auto& sub = table.subtree[v1];
    sub.push_back(v1);
    for (VertexId c : kids)
      sub.insert(sub.end(), table.subtree[c].begin(), table.subtree[c].end());
    std::sort(sub.begin(), sub.end());

    auto& R = table.R[v1];
    R.assign(static_cast<size_t>(t1 + 1) * (keff + 1) * n, 0.0);
    auto at = [&](int l, int j, VertexId v2) -> double& {
      return R[(static_cast<size_t>(l) * (keff + 1) + j) * n + v2];
    };

    // l = 0: the partial subtree is just v1
    for (VertexId v2 = 0; v2 < n; ++v2) {
      for (int j = 1; j <= keff; ++j) {
        if (j > 1)
          at(0, j, v2) = 1.0;
        else
          at(0, 1, v2) = d(v1, v2) <= r ? 1.0 : 1.0 - probs[v1];
      }
    }

    for (int l = 1; l <= t1; ++l) {
      const VertexId v3 = kids[l - 1];
      const int t3 = static_cast<int>(tree.children[v3].size());
      const auto& childR = table.R[v3];
      auto child_at = [&](int j, VertexId v2) {
        return childR[(static_cast<size_t>(t3) * (keff + 1) + j) * n + v2];
      };
      for (VertexId v2 = 0; v2 < n; ++v2) {
        for (int j = 1; j <= keff; ++j) {
          double best = 0.0;
          // v2 stays closest for the new child subtree as well; it is
          // re-counted on both sides, hence j - j1 + 1
          for (int j1 = 1; j1 <= j; ++j1) {
            double val = at(l - 1, j1, v2) * child_at(j - j1 + 1, v2);
            if (val > best) best = val;
          }
          // or the child subtree has its own closest center
          for (int j2 = 1; j2 <= j; ++j2) {
            double val = at(l - 1, j2, v2) * table.H[v3][j - j2];
            if (val > best) best = val;
          }
          at(l, j, v2) = best;
        }
      }
    }

    // H(v1, 0): the random subtree subset must be empty
    double empty = 1.0 - probs[v1];
    for (VertexId c : kids) empty *= table.H[c][0];
    table.H[v1][0] = empty;
    for (int j = 1; j <= keff; ++j) {
      double best = 0.0;
      for (VertexId v2 : sub) {
        double val = at(t1, j, v2);
        if (val > best) best = val;
      }
      table.H[v1][j] = best;
    }
  }

  return {table.H[tree.root][keff], std::move(table)};
}

namespace detail {

inline void expand_r_state(const SuccessTable& table, const RootedTree& tree,
                           const DistanceMatrix& d, VertexId v1, int l, int j,
                           VertexId v2, std::set<VertexId>& centers);

inline void expand_h_state(const SuccessTable& table, const RootedTree& tree,
                           const DistanceMatrix& d, VertexId v, int j,
                           std::set<VertexId>& centers) {
  if (j == 0) return;  // no centers in this subtree
  const int t = static_cast<int>(tree.children[v].size());
  const double target = table.H[v][j];
  for (VertexId v2 : table.subtree[v])
    if (table.r_value(tree, v, t, j, v2) == target) {
      centers.insert(v2);
      expand_r_state(table, tree, d, v, t, j, v2, centers);
      return;
    }
  assert(false && "H value has no witnessing center");
}

inline void expand_r_state(const SuccessTable& table, const RootedTree& tree,
                           const DistanceMatrix& d, VertexId v1, int l, int j,
                           VertexId v2, std::set<VertexId>& centers) {
  if (j == 0) return;
  if (l == 0) {
    // spare in-subtree budget covers v1 directly
    if (j > 1) centers.insert(v1);
    return;
  }
  const VertexId v3 = tree.children[v1][l - 1];
  const int t3 = static_cast<int>(tree.children[v3].size());
  const double target = table.r_value(tree, v1, l, j, v2);
  for (int j1 = 1; j1 <= j; ++j1) {
    double val = table.r_value(tree, v1, l - 1, j1, v2) *
                 table.r_value(tree, v3, t3, j - j1 + 1, v2);
    if (val == target) {
      expand_r_state(table, tree, d, v1, l - 1, j1, v2, centers);
      expand_r_state(table, tree, d, v3, t3, j - j1 + 1, v2, centers);
      return;
    }
  }
  for (int j2 = 1; j2 <= j; ++j2) {
    double val = table.r_value(tree, v1, l - 1, j2, v2) * table.H[v3][j - j2];
    if (val == target) {
      expand_r_state(table, tree, d, v1, l - 1, j2, v2, centers);
      expand_h_state(table, tree, d, v3, j - j2, centers);
      return;
    }
  }
  assert(false && "R value has no witnessing split");
}

}  // namespace detail

// Second pass over a retained table: returns a center set whose closed-form
// success probability equals the DP optimum.
inline std::vector<VertexId> reconstruct_centers(const SuccessTable& table,
                                                 const RootedTree& tree,
                                                 const DistanceMatrix& d) {
  std::set<VertexId> centers;
  detail::expand_h_state(table, tree, d, tree.root, table.k, centers);
  return {centers.begin(), centers.end()};
}

inline CenterSolution solve_nonadaptive(const KCenterInstance& inst, int k,
                                        double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0, 1]");
  if (k < 0) throw ValidationError("k must be nonnegative");

  if (k >= inst.n) {
    // a center at every vertex covers everything at radius 0
    CenterSolution sol;
    sol.radius = 0.0;
    sol.success_probability = 1.0;
    for (VertexId v = 0; v < inst.n; ++v) sol.centers.push_back(v);
    return sol;
  }

  const RootedTree tree = build_rooted_tree(inst);
  const DistanceMatrix d = all_pairs_distances(tree);
  const std::vector<double> radii = candidate_radii(d);
  const double threshold = (1.0 - rho) - 1e-9;

  auto value_at = [&](double r) {
    return max_success_probability(tree, d, inst.probs, k, r);
  };

  // feasibility is monotone in r: binary search the smallest feasible radius
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

}  // namespace stochcover
