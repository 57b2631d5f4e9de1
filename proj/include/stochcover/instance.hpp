#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stochcover/random.hpp"

namespace stochcover {

using VertexId = int;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightedEdge {
  VertexId u = 0;
  VertexId v = 0;
  double w = 1.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// A tree (for the exact solvers) with independent per-vertex presence
// probabilities.
struct KCenterInstance {
  int n = 0;
  std::vector<WeightedEdge> edges;
  std::vector<double> probs;
  VertexId root = 0;

  friend bool operator==(const KCenterInstance&, const KCenterInstance&) = default;
};

struct CoverSet {
  double cost = 1.0;
  std::vector<int> members;

  friend bool operator==(const CoverSet&, const CoverSet&) = default;
};

struct SetCoverInstance {
  int n = 0;  // element count
  std::vector<double> element_probs;
  std::vector<CoverSet> sets;

  friend bool operator==(const SetCoverInstance&, const SetCoverInstance&) = default;

  // elements not covered by any set (legal, but flagged for callers)
  std::vector<int> uncoverable_elements() const {
    std::vector<bool> covered(n, false);
    for (const auto& s : sets)
      for (int e : s.members) covered[e] = true;
    std::vector<int> out;
    for (int e = 0; e < n; ++e)
      if (!covered[e]) out.push_back(e);
    return out;
  }
};

// Simple undirected graph with a uniform presence probability, used by the
// hardness-verification oracles.
struct GraphInstance {
  int n = 0;
  std::vector<WeightedEdge> edges;  // w ignored unless stated otherwise
  double p = 0.5;

  friend bool operator==(const GraphInstance&, const GraphInstance&) = default;
};

using ProblemInstance = std::variant<KCenterInstance, SetCoverInstance, GraphInstance>;

namespace detail {

inline void check_prob(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError(what + ": probability out of [0,1]");
}

// connected + acyclic on all n vertices
inline void check_tree(int n, const std::vector<WeightedEdge>& edges) {
  if (static_cast<int>(edges.size()) != n - 1)
    throw ValidationError("tree must have exactly n-1 edges");
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) {
    int a = find(e.u), b = find(e.v);
    if (a == b) throw ValidationError("edges form a cycle");
    parent[a] = b;
  }
  // n-1 successful unions on n vertices imply connectivity
}

}  // namespace detail

inline void validate(const KCenterInstance& inst) {
  if (inst.n < 1) throw ValidationError("instance needs at least one vertex");
  if (static_cast<int>(inst.probs.size()) != inst.n)
    throw ValidationError("probability list length must equal vertex count");
  for (double p : inst.probs) detail::check_prob(p, "vertex");
  for (const auto& e : inst.edges) {
    if (e.u < 0 || e.u >= inst.n || e.v < 0 || e.v >= inst.n || e.u == e.v)
      throw ValidationError("edge endpoint out of range");
    if (!(e.w >= 0.0)) throw ValidationError("negative edge weight");
  }
  if (inst.root < 0 || inst.root >= inst.n)
    throw ValidationError("root out of range");
  detail::check_tree(inst.n, inst.edges);
}

inline void validate(const SetCoverInstance& inst) {
  if (inst.n < 0) throw ValidationError("negative element count");
  if (static_cast<int>(inst.element_probs.size()) != inst.n)
    throw ValidationError("probability list length must equal element count");
  for (double p : inst.element_probs) detail::check_prob(p, "element");
  for (const auto& s : inst.sets) {
    if (!(s.cost > 0.0)) throw ValidationError("set cost must be positive");
    for (int e : s.members)
      if (e < 0 || e >= inst.n) throw ValidationError("set member out of range");
  }
}

inline void validate(const GraphInstance& inst) {
  if (inst.n < 1) throw ValidationError("graph needs at least one vertex");
  detail::check_prob(inst.p, "vertex");
  std::vector<std::vector<bool>> seen(inst.n, std::vector<bool>(inst.n, false));
  for (const auto& e : inst.edges) {
    if (e.u < 0 || e.u >= inst.n || e.v < 0 || e.v >= inst.n)
      throw ValidationError("edge endpoint out of range");
    if (e.u == e.v) throw ValidationError("self-loop");
    if (seen[e.u][e.v]) throw ValidationError("duplicate edge");
    seen[e.u][e.v] = seen[e.v][e.u] = true;
  }
}

// ---------------------------------------------------------------------------
// Document schema (JSON):
//   {"type":"tree"|"graph", "vertices":[{"id":..,"p":..}],
//    "edges":[{"u":..,"v":..,"w":..}], "root":..}
//   {"type":"setcover", "elements":[{"id":..,"p":..}],
//    "sets":[{"id":..,"cost":..,"members":[..]}]}
// ---------------------------------------------------------------------------

inline ProblemInstance parse_instance(const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed document: ") + e.what());
  }
  try {
    if (!doc.contains("type")) throw ValidationError("missing type");
    const std::string type = doc.at("type");
    if (type == "tree" || type == "graph") {
      std::vector<double> probs;
      const auto& verts = doc.at("vertices");
      probs.resize(verts.size(), -1.0);
      for (const auto& v : verts) {
        int id = v.at("id");
        if (id < 0 || id >= static_cast<int>(probs.size()))
          throw ValidationError("vertex id not dense in [0,n)");
        if (probs[id] >= 0.0) throw ValidationError("duplicate vertex id");
        probs[id] = v.at("p");
      }
      std::vector<WeightedEdge> edges;
      if (doc.contains("edges"))
        for (const auto& e : doc.at("edges")) {
          WeightedEdge we;
          we.u = e.at("u");
          we.v = e.at("v");
          we.w = e.contains("w") ? e.at("w").get<double>() : 1.0;
          edges.push_back(we);
        }
      if (type == "tree") {
        KCenterInstance inst;
        inst.n = static_cast<int>(probs.size());
        inst.probs = std::move(probs);
        inst.edges = std::move(edges);
        inst.root = doc.contains("root") ? doc.at("root").get<int>() : 0;
        validate(inst);
        return inst;
      }
      GraphInstance g;
      g.n = static_cast<int>(probs.size());
      g.edges = std::move(edges);
      g.p = probs.empty() ? 0.5 : probs[0];
      for (double p : probs)
        if (p != g.p)
          throw ValidationError("graph instances use a uniform probability");
      validate(g);
      return g;
    }
    if (type == "setcover") {
      SetCoverInstance inst;
      const auto& elems = doc.at("elements");
      inst.n = static_cast<int>(elems.size());
      inst.element_probs.resize(inst.n, -1.0);
      for (const auto& e : elems) {
        int id = e.at("id");
        if (id < 0 || id >= inst.n)
          throw ValidationError("element id not dense in [0,n)");
        if (inst.element_probs[id] >= 0.0)
          throw ValidationError("duplicate element id");
        inst.element_probs[id] = e.at("p");
      }
      std::vector<std::pair<int, CoverSet>> indexed;
      for (const auto& s : doc.at("sets")) {
        CoverSet cs;
        cs.cost = s.at("cost");
        for (int m : s.at("members")) cs.members.push_back(m);
        indexed.emplace_back(s.at("id").get<int>(), std::move(cs));
      }
      std::sort(indexed.begin(), indexed.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [id, cs] : indexed) inst.sets.push_back(std::move(cs));
      validate(inst);
      return inst;
    }
    throw ValidationError("unknown instance type: " + type);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("schema violation: ") + e.what());
  }
}

inline std::string serialize_instance(const ProblemInstance& instance) {
  nlohmann::ordered_json doc;
  if (const auto* kc = std::get_if<KCenterInstance>(&instance)) {
    doc["type"] = "tree";
    doc["vertices"] = nlohmann::json::array();
    for (int i = 0; i < kc->n; ++i)
      doc["vertices"].push_back({{"id", i}, {"p", kc->probs[i]}});
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : kc->edges)
      doc["edges"].push_back({{"u", e.u}, {"v", e.v}, {"w", e.w}});
    doc["root"] = kc->root;
  } else if (const auto* sc = std::get_if<SetCoverInstance>(&instance)) {
    doc["type"] = "setcover";
    doc["elements"] = nlohmann::json::array();
    for (int i = 0; i < sc->n; ++i)
      doc["elements"].push_back({{"id", i}, {"p", sc->element_probs[i]}});
    doc["sets"] = nlohmann::json::array();
    for (int i = 0; i < static_cast<int>(sc->sets.size()); ++i)
      doc["sets"].push_back({{"id", i},
                             {"cost", sc->sets[i].cost},
                             {"members", sc->sets[i].members}});
  } else {
    const auto& g = std::get<GraphInstance>(instance);
    doc["type"] = "graph";
    doc["vertices"] = nlohmann::json::array();
    for (int i = 0; i < g.n; ++i)
      doc["vertices"].push_back({{"id", i}, {"p", g.p}});
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
      doc["edges"].push_back({{"u", e.u}, {"v", e.v}});
  }
  return doc.dump(2);
}

// Uniform random attachment tree: vertex i > 0 attaches to a uniform vertex
// below it. Deterministic per (n, seed, laws).
inline KCenterInstance generate_random_tree(int n, std::uint64_t seed,
                                            const Law& prob_law = Law::uniform(0.0, 1.0),
                                            const Law& weight_law = Law::uniform(0.5, 2.0)) {
  if (n < 1) throw ValidationError("n must be at least 1");
  Rng rng(seed);
  KCenterInstance inst;
  inst.n = n;
  for (int i = 1; i < n; ++i) {
    WeightedEdge e;
    e.u = static_cast<int>(rng.next_below(i));
    e.v = i;
    e.w = weight_law.sample(rng);
    if (e.w < 0.0) e.w = 0.0;
    inst.edges.push_back(e);
  }
  for (int i = 0; i < n; ++i)
    inst.probs.push_back(std::clamp(prob_law.sample(rng), 0.0, 1.0));
  return inst;
}

inline SetCoverInstance generate_random_setcover(int n, int m, std::uint64_t seed,
                                                 const Law& prob_law = Law::uniform(0.0, 1.0),
                                                 const Law& cost_law = Law::uniform(0.5, 3.0)) {
  if (n < 1 || m < 1) throw ValidationError("need at least one element and one set");
  Rng rng(seed);
  SetCoverInstance inst;
  inst.n = n;
  for (int i = 0; i < n; ++i)
    inst.element_probs.push_back(std::clamp(prob_law.sample(rng), 0.0, 1.0));
  for (int i = 0; i < m; ++i) {
    CoverSet s;
    s.cost = std::max(1e-3, cost_law.sample(rng));
    for (int e = 0; e < n; ++e)
      if (rng.next_double() < 0.35) s.members.push_back(e);
    if (s.members.empty()) s.members.push_back(static_cast<int>(rng.next_below(n)));
    inst.sets.push_back(std::move(s));
  }
  return inst;
}

inline GraphInstance generate_random_graph(int n, std::uint64_t seed,
                                           double edge_prob = 0.4,
                                           double vertex_prob = 0.5) {
  if (n < 2) throw ValidationError("graph generator needs n >= 2");
  Rng rng(seed);
  GraphInstance g;
  g.n = n;
  g.p = vertex_prob;
  std::vector<int> degree(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.next_double() < edge_prob) {
        g.edges.push_back({u, v, 1.0});
        ++degree[u];
        ++degree[v];
      }
  // attach isolated vertices so edge-cover oracles accept the graph
  for (int u = 0; u < n; ++u)
    if (degree[u] == 0) {
      int v = static_cast<int>(rng.next_below(n - 1));
      if (v >= u) ++v;
      g.edges.push_back({std::min(u, v), std::max(u, v), 1.0});
      ++degree[u];
      ++degree[v];
    }
  return g;
}

}  // namespace stochcover
