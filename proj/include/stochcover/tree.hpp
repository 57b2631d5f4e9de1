#pragma once

#include <algorithm>
#include <vector>

#include "stochcover/instance.hpp"

namespace stochcover {

// Rooted, child-ordered view of a KCenterInstance. Children are kept in
// ascending id order so DP state enumeration is reproducible.
struct RootedTree {
  VertexId root = 0;
  std::vector<VertexId> parent;        // parent[root] == -1
  std::vector<double> parent_weight;   // weight of edge to parent
  std::vector<std::vector<VertexId>> children;
  std::vector<VertexId> postorder;     // every child before its parent, root last

  int n() const { return static_cast<int>(parent.size()); }
};

inline RootedTree build_rooted_tree(const KCenterInstance& inst,
                                    std::optional<VertexId> root_override = {}) {
  RootedTree t;
  t.root = root_override.value_or(inst.root);
  t.parent.assign(inst.n, -1);
  t.parent_weight.assign(inst.n, 0.0);
  t.children.assign(inst.n, {});

  std::vector<std::vector<std::pair<VertexId, double>>> adj(inst.n);
  for (const auto& e : inst.edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  for (auto& a : adj)
    std::sort(a.begin(), a.end());

  // iterative DFS; children collected in ascending id order
  std::vector<VertexId> stack{t.root};
  std::vector<bool> seen(inst.n, false);
  seen[t.root] = true;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (auto [u, w] : adj[v])
      if (!seen[u]) {
        seen[u] = true;
        t.parent[u] = v;
        t.parent_weight[u] = w;
        t.children[v].push_back(u);
        stack.push_back(u);
      }
  }
  std::vector<std::pair<VertexId, size_t>> frames{{t.root, 0}};
  while (!frames.empty()) {
    auto& [v, idx] = frames.back();
    if (idx < t.children[v].size()) {
      VertexId c = t.children[v][idx++];
      frames.push_back({c, 0});
    } else {
      t.postorder.push_back(v);
      frames.pop_back();
    }
  }
  return t;
}

struct DistanceMatrix {
  std::vector<std::vector<double>> d;

  int n() const { return static_cast<int>(d.size()); }
  double operator()(VertexId u, VertexId v) const { return d[u][v]; }
};

// Exact tree path metric. Rows are filled by DFS from each source and then
// mirrored so d(u,v) == d(v,u) bit-for-bit.
inline DistanceMatrix all_pairs_distances(const RootedTree& tree) {
  const int n = tree.n();
  DistanceMatrix m;
  m.d.assign(n, std::vector<double>(n, 0.0));

  std::vector<std::vector<std::pair<VertexId, double>>> adj(n);
  for (VertexId v = 0; v < n; ++v)
    if (tree.parent[v] >= 0) {
      adj[v].push_back({tree.parent[v], tree.parent_weight[v]});
      adj[tree.parent[v]].push_back({v, tree.parent_weight[v]});
    }

  for (VertexId src = 0; src < n; ++src) {
    std::vector<VertexId> stack{src};
    std::vector<bool> seen(n, false);
    seen[src] = true;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (auto [u, w] : adj[v])
        if (!seen[u]) {
          seen[u] = true;
          m.d[src][u] = m.d[src][v] + w;
          stack.push_back(u);
        }
    }
  }
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) m.d[v][u] = m.d[u][v];
  return m;
}

// Sorted unique values of {0} plus all pairwise distances. An optimal radius
// always equals one of these, so binary search over this list is lossless.
inline std::vector<double> candidate_radii(const DistanceMatrix& d) {
  std::vector<double> out{0.0};
  for (int u = 0; u < d.n(); ++u)
    for (int v = u + 1; v < d.n(); ++v) out.push_back(d(u, v));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace stochcover
