#include <catch2/catch_amalgamated.hpp>

#include "stochcover/kcenter_adaptive.hpp"
#include "stochcover/kcenter_nonadaptive.hpp"
#include "stochcover/oracle.hpp"

using namespace stochcover;
namespace orc = stochcover::oracle;

namespace {

KCenterInstance two_vertices(double w, std::vector<double> probs = {0.5, 0.5}) {
  KCenterInstance inst;
  inst.n = 2;
  inst.probs = std::move(probs);
  inst.edges = {{0, 1, w}};
  return inst;
}

}  // namespace

TEST_CASE("leaf distribution") {
  KCenterInstance single;
  single.n = 1;
  single.probs = {0.5};
  auto d = all_pairs_distances(build_rooted_tree(single));
  auto dist = leaf_distribution(0, 0.5, d, 1.0);
  auto prof = dist.profiles(d, 1.0);
  REQUIRE(prof.size() == 2);
  // absent half: the empty profile
  REQUIRE(prof.at(Profile{0, 0.0, 0.0, false}) == 0.5);
  // present half: one pending demand, no external vertex exists to help
  REQUIRE(prof.at(Profile{1, 0.0, -0.0, true}) == 0.5);

  // leaf of a two-vertex edge: the neighbor is an in-range helper at w <= r
  auto pair = two_vertices(1.0);
  auto dp = all_pairs_distances(build_rooted_tree(pair));
  auto leaf = leaf_distribution(1, 0.5, dp, 1.0);
  auto lp = leaf.profiles(dp, 1.0);
  REQUIRE(lp.at(Profile{1, 0.0, 1.0, false}) == 0.5);

  // deterministic vertex has no absent branch
  auto det = leaf_distribution(0, 1.0, d, 1.0);
  REQUIRE(det.mass.size() == 1);
  REQUIRE(det.total_mass() == 1.0);
}

TEST_CASE("merging distributions") {
  SECTION("absent child is the identity") {
    auto inst = two_vertices(2.0, {0.5, 0.0});
    auto t = build_rooted_tree(inst);
    auto d = all_pairs_distances(t);
    auto parent = leaf_distribution(0, 0.5, d, 1.0);
    auto child = leaf_distribution(1, 0.0, d, 1.0);
    auto merged = merge_distributions(d, 1.0, parent, child);
    REQUIRE(merged.mass == parent.mass);
  }
  SECTION("far child demand forces a center") {
    auto inst = two_vertices(2.0, {1.0, 1.0});
    auto t = build_rooted_tree(inst);
    auto d = all_pairs_distances(t);
    auto merged = merge_distributions(d, 1.0, leaf_distribution(0, 1.0, d, 1.0),
                                      leaf_distribution(1, 1.0, d, 1.0));
    REQUIRE(merged.mass.size() == 1);
    auto prof = merged.profiles(d, 1.0);
    // child forced its own center, parent demand still pending: j = 2
    REQUIRE(prof.begin()->first.j == 2);
    REQUIRE(prof.begin()->second == 1.0);
  }
  SECTION("near child demand is consolidated") {
    auto inst = two_vertices(1.0, {1.0, 1.0});
    auto t = build_rooted_tree(inst);
    auto d = all_pairs_distances(t);
    auto merged = merge_distributions(d, 1.0, leaf_distribution(0, 1.0, d, 1.0),
                                      leaf_distribution(1, 1.0, d, 1.0));
    auto prof = merged.profiles(d, 1.0);
    REQUIRE(prof.size() == 1);
    // one center at the root covers both: j = 1
    REQUIRE(prof.begin()->first.j == 1);
  }
}

TEST_CASE("failure probability base cases") {
  KCenterInstance single;
  single.n = 1;
  single.probs = {0.5};
  auto t = build_rooted_tree(single);
  auto d = all_pairs_distances(t);
  REQUIRE(failure_probability(t, d, single.probs, 0, 0.0) == 0.5);
  REQUIRE(failure_probability(t, d, single.probs, 1, 0.0) == 0.0);

  auto pair = two_vertices(2.0, {1.0, 1.0});
  auto tp = build_rooted_tree(pair);
  auto dp = all_pairs_distances(tp);
  REQUIRE(failure_probability(tp, dp, pair.probs, 1, 1.0) == 1.0);
  REQUIRE(failure_probability(tp, dp, pair.probs, 1, 2.0) == 0.0);
  REQUIRE(failure_probability(tp, dp, pair.probs, 2, 0.0) == 0.0);
}

TEST_CASE("adaptive solver matches enumeration on random trees") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    int n = 3 + static_cast<int>(seed % 6);  // 3..8
    auto inst = generate_random_tree(n, seed);
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    for (double r : candidate_radii(d)) {
      for (int k = 0; k <= n; ++k) {
        AdaptiveDiagnostics diag;
        double dp = failure_probability(tree, d, inst.probs, k, r, &diag);
        double ref = orc::brute_force_adaptive_failure(d, inst.probs, k, r);
        REQUIRE(dp == Catch::Approx(ref).margin(1e-9));
        REQUIRE(diag.worst_mass_deviation <= 1e-9);
      }
    }
  }
}

TEST_CASE("solver is root invariant") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = generate_random_tree(7, seed);
    auto t0 = build_rooted_tree(inst);
    auto d0 = all_pairs_distances(t0);
    double base = failure_probability(t0, d0, inst.probs, 2, 1.5);
    for (VertexId root = 1; root < inst.n; ++root) {
      auto t = build_rooted_tree(inst, root);
      auto dr = all_pairs_distances(t);
      REQUIRE(failure_probability(t, dr, inst.probs, 2, 1.5) ==
              Catch::Approx(base).margin(1e-12));
    }
  }
}

TEST_CASE("adaptive failure never exceeds the non-adaptive one") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = generate_random_tree(7, seed);
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    for (int k = 0; k <= 3; ++k)
      for (double r : candidate_radii(d)) {
        double adaptive = failure_probability(tree, d, inst.probs, k, r);
        double nonadaptive =
            1.0 - max_success_probability(tree, d, inst.probs, k, r).first;
        REQUIRE(adaptive <= nonadaptive + 1e-12);
      }
  }
}

TEST_CASE("value-at-risk radius search") {
  auto pair = two_vertices(2.0, {1.0, 1.0});
  auto var = solve_adaptive_var(pair, 1, 0.1);
  REQUIRE(var.radius == 2.0);
  REQUIRE(var.failure_probability == 0.0);

  // with rho = 1 any radius is acceptable
  auto lax = solve_adaptive_var(pair, 1, 1.0);
  REQUIRE(lax.radius == 0.0);

  KCenterInstance single;
  single.n = 1;
  single.probs = {0.5};
  auto s = solve_adaptive_var(single, 0, 0.5);
  REQUIRE(s.radius == 0.0);
  REQUIRE(s.failure_probability == 0.5);
  REQUIRE_THROWS_AS(solve_adaptive_var(single, 0, 0.25), InfeasibleError);
  REQUIRE_THROWS_AS(solve_adaptive_var(single, 0, 0.0), ValidationError);
}

TEST_CASE("value-at-risk agrees with exhaustive scan") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = generate_random_tree(7, seed);
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    const int k = 2;
    const double rho = 0.2;
    double expect = -1.0;
    for (double r : candidate_radii(d)) {
      if (failure_probability(tree, d, inst.probs, k, r) <= rho + 1e-9) {
        expect = r;
        break;
      }
    }
    if (expect < 0) {
      REQUIRE_THROWS_AS(solve_adaptive_var(inst, k, rho), InfeasibleError);
    } else {
      auto var = solve_adaptive_var(inst, k, rho);
      REQUIRE(var.radius == expect);
    }
  }
}
