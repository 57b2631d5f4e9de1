#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <vector>

#include "stochcover/instance.hpp"
#include "stochcover/tree.hpp"

// Exact adaptive failure probability P(the revealed vertex subset needs more
// than k centers at radius r) on tree metrics.
//
// Every random subset of a subtree is classified by a covering profile
// (j, d, d'): minimum center count j, closest-center distance d to the
// subtree root among minimum covers, and the maximal distance d' at which an
// external center lets the subtree get by with j-1 centers (sentinel -d when
// no such helper exists). The solver folds sparse probability distributions
// over these classes up the tree and sums the root mass with j > k.
//
// Internally each class is tracked in an equivalent canonical form produced
// by a bottom-up minimum-cover computation: the number of centers already
// forced, the forced center closest to the current subtree root, and the
// deepest still-pending demand vertex. A center is forced exactly when its
// demand would leave radius range of the next root; pending demands account
// for the final +1 and are precisely the states an external helper can save.
// This keeps every distance comparison a plain distance-matrix lookup, so the
// DP and the enumeration oracle agree bit-for-bit.

namespace stochcover {

struct Profile {
  int j = 0;
  double d = 0.0;
  double dprime = 0.0;
  bool no_helper = false;  // d' = -d sentinel

  friend auto operator<=>(const Profile&, const Profile&) = default;
};

namespace detail {

struct CoverState {
  int centers = 0;
  VertexId cov = -1;  // forced center closest to the current root, -1 if none
  VertexId dem = -1;  // deepest pending demand vertex, -1 if none

  friend auto operator<=>(const CoverState&, const CoverState&) = default;
};

}  // namespace detail

// Sparse probability mass over covering profiles of one subtree.
class ProfileDistribution {
 public:
  VertexId root = -1;
  std::vector<bool> members;  // vertex set of the subtree
  std::map<detail::CoverState, double> mass;

  double total_mass() const {
    double t = 0.0;
    for (const auto& [s, m] : mass) t += m;
    return t;
  }

  int min_centers(const detail::CoverState& s) const {
    return s.centers + (s.dem >= 0 ? 1 : 0);
  }

  // Exposed (j, d, d') view. d' uses the actual-vertex convention:
  // the farthest vertex outside the subtree whose presence as a center saves
  // one internal center; sentinel when no such vertex exists.
  std::map<Profile, double> profiles(const DistanceMatrix& d, double r) const {
    std::map<Profile, double> out;
    for (const auto& [s, m] : mass) {
      Profile p;
      if (s.centers == 0 && s.dem < 0) {
        p = Profile{0, 0.0, 0.0, false};
      } else if (s.dem >= 0) {
        p.j = s.centers + 1;
        p.d = 0.0;  // a minimum cover may put the final center at the root
        double best = -1.0;
        bool found = false;
        for (int v = 0; v < d.n(); ++v) {
          if (members[v]) continue;
          if (d(v, s.dem) > r) continue;
          found = true;
          best = std::max(best, d(v, root));
        }
        if (found) {
          p.dprime = best;
        } else {
          p.no_helper = true;
          p.dprime = -p.d;
        }
      } else {
        p.j = s.centers;
        p.d = d(s.cov, root);
        p.no_helper = true;  // forced centers are out of helper reach
        p.dprime = -p.d;
      }
      out[p] += m;
    }
    return out;
  }
};

// Distribution for a one-vertex subtree: the vertex is either present (one
// pending demand) or absent (the empty profile).
inline ProfileDistribution leaf_distribution(VertexId v, double p_v,
                                             const DistanceMatrix& d, double r) {
  ProfileDistribution dist;
  dist.root = v;
  dist.members.assign(d.n(), false);
  dist.members[v] = true;
  if (p_v < 1.0) dist.mass[detail::CoverState{0, -1, -1}] = 1.0 - p_v;
  if (p_v > 0.0) dist.mass[detail::CoverState{0, -1, v}] = p_v;
  return dist;
}

namespace detail {

inline VertexId better_cov(const DistanceMatrix& d, VertexId root, VertexId a,
                           VertexId b) {
  if (a < 0) return b;
  if (b < 0) return a;
  double da = d(a, root), db = d(b, root);
  if (da != db) return da < db ? a : b;
  return std::min(a, b);
}

}  // namespace detail

// Folds a child's distribution into its parent's partial distribution. The
// child's pending demands that fall out of radius range of the parent force a
// center at the child's root; remaining states combine by independence, with
// cross coverage checked against the tree metric.
inline ProfileDistribution merge_distributions(const DistanceMatrix& d, double r,
                                               const ProfileDistribution& left,
                                               const ProfileDistribution& child) {
  const VertexId v1 = left.root;
  ProfileDistribution out;
  out.root = v1;
  out.members = left.members;
  for (int v = 0; v < d.n(); ++v)
    if (child.members[v]) out.members[v] = true;

  // lift child states to the parent root
  std::map<detail::CoverState, double> lifted;
  for (const auto& [s, m] : child.mass) {
    detail::CoverState t = s;
    if (t.dem >= 0 && d(t.dem, v1) > r) {
      // demand leaves range: a center inside the child subtree is forced, and
      // the child's root is the dominant spot for it
      ++t.centers;
      t.cov = detail::better_cov(d, v1, t.cov, child.root);
      t.dem = -1;
    }
    lifted[t] += m;
  }

  for (const auto& [s1, m1] : left.mass) {
    for (const auto& [s2, m2] : lifted) {
      detail::CoverState c;
      c.centers = s1.centers + s2.centers;
      c.cov = detail::better_cov(d, v1, s1.cov, s2.cov);
      auto covered = [&](VertexId z) {
        return (s1.cov >= 0 && d(s1.cov, z) <= r) ||
               (s2.cov >= 0 && d(s2.cov, z) <= r);
      };
      VertexId dem = -1;
      for (VertexId z : {s1.dem, s2.dem}) {
        if (z < 0 || covered(z)) continue;
        if (dem < 0 || d(z, v1) > d(dem, v1) ||
            (d(z, v1) == d(dem, v1) && z < dem))
          dem = z;
      }
      c.dem = dem;
      out.mass[c] += m1 * m2;
    }
  }
  return out;
}

struct AdaptiveDiagnostics {
  double worst_mass_deviation = 0.0;  // max |total mass - 1| over subtree states
};

// Exact P(minimum cover of the revealed subset needs more than k centers).
inline double failure_probability(const RootedTree& tree, const DistanceMatrix& d,
                                  const std::vector<double>& probs, int k, double r,
                                  AdaptiveDiagnostics* diag = nullptr) {
  std::vector<ProfileDistribution> dists(tree.n());
  double worst = 0.0;
  for (VertexId v : tree.postorder) {
    ProfileDistribution acc = leaf_distribution(v, probs[v], d, r);
    for (VertexId c : tree.children[v]) {
      acc = merge_distributions(d, r, acc, dists[c]);
      dists[c].mass.clear();
      worst = std::max(worst, std::abs(acc.total_mass() - 1.0));
    }
    dists[v] = std::move(acc);
  }
  const ProfileDistribution& rootDist = dists[tree.root];
  worst = std::max(worst, std::abs(rootDist.total_mass() - 1.0));
  if (diag) diag->worst_mass_deviation = worst;
  double failure = 0.0;
  for (const auto& [s, m] : rootDist.mass)
    if (rootDist.min_centers(s) > k) failure += m;
  return failure;
}

struct VarResult {
  double radius = 0.0;
  double failure_probability = 0.0;
  int k = 0;
  double rho = 0.0;
};

// Smallest candidate radius whose adaptive failure probability is within the
// risk budget. Failure is nonincreasing in r, so binary search applies.
inline VarResult solve_adaptive_var(const KCenterInstance& inst, int k, double rho,
                                    AdaptiveDiagnostics* diag = nullptr) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0, 1]");
  if (k < 0) throw ValidationError("k must be nonnegative");

  const RootedTree tree = build_rooted_tree(inst);
  const DistanceMatrix d = all_pairs_distances(tree);
  const std::vector<double> radii = candidate_radii(d);

  AdaptiveDiagnostics local;
  double worst = 0.0;
  auto failure_at = [&](double r) {
    double f = failure_probability(tree, d, inst.probs, k, r, &local);
    worst = std::max(worst, local.worst_mass_deviation);
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
  if (diag) diag->worst_mass_deviation = worst;
  return res;
}

}  // namespace stochcover
