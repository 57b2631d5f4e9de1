#include <catch2/catch_amalgamated.hpp>

#include "stochcover/kcenter_nonadaptive.hpp"
#include "stochcover/oracle.hpp"

using namespace stochcover;
namespace orc = stochcover::oracle;

namespace {

KCenterInstance path3(std::vector<double> probs = {1, 1, 1}) {
  KCenterInstance inst;
  inst.n = 3;
  inst.probs = std::move(probs);
  inst.edges = {{0, 1, 1}, {1, 2, 1}};
  return inst;
}

}  // namespace

TEST_CASE("single-vertex success table") {
  KCenterInstance inst;
  inst.n = 1;
  inst.probs = {0.7};
  auto tree = build_rooted_tree(inst);
  auto d = all_pairs_distances(tree);
  auto [p1, t1] = max_success_probability(tree, d, inst.probs, 1, 0.0);
  REQUIRE(p1 == 1.0);
  auto [p0, t0] = max_success_probability(tree, d, inst.probs, 0, 0.0);
  REQUIRE(p0 == Catch::Approx(0.3));
}

TEST_CASE("path with one center") {
  auto inst = path3();
  auto tree = build_rooted_tree(inst);
  auto d = all_pairs_distances(tree);
  auto [p, table] = max_success_probability(tree, d, inst.probs, 1, 1.0);
  REQUIRE(p == 1.0);
  REQUIRE(reconstruct_centers(table, tree, d) == std::vector<VertexId>{1});
  auto [p0, table0] = max_success_probability(tree, d, inst.probs, 1, 0.0);
  REQUIRE(p0 == 0.0);  // two deterministic vertices always uncovered
}

TEST_CASE("solver matches enumeration on random trees") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    int n = 4 + static_cast<int>(seed % 6);  // 4..9
    auto inst = generate_random_tree(n, seed);
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    for (int k = 0; k <= 3; ++k) {
      for (double r : candidate_radii(d)) {
        auto [opt, centers] = orc::brute_force_nonadaptive_opt(d, inst.probs, k, r);
        auto [dp, table] = max_success_probability(tree, d, inst.probs, k, r);
        REQUIRE(dp == Catch::Approx(opt).margin(1e-9));
        if (k > 0) {
          auto picked = reconstruct_centers(table, tree, d);
          REQUIRE(!picked.empty());
          REQUIRE(static_cast<int>(picked.size()) <= k);
          double realized = orc::closed_form_success(d, picked, inst.probs, r);
          REQUIRE(realized == Catch::Approx(dp).margin(1e-12));
        }
      }
    }
  }
}

TEST_CASE("success probability is monotone in radius and k") {
  auto inst = generate_random_tree(9, 5);
  auto tree = build_rooted_tree(inst);
  auto d = all_pairs_distances(tree);
  double prev = -1.0;
  for (double r : candidate_radii(d)) {
    double p = max_success_probability(tree, d, inst.probs, 2, r).first;
    REQUIRE(p >= prev - 1e-15);
    prev = p;
  }
  prev = -1.0;
  for (int k = 0; k <= 5; ++k) {
    double p = max_success_probability(tree, d, inst.probs, k, 1.0).first;
    REQUIRE(p >= prev - 1e-15);
    prev = p;
  }
}

TEST_CASE("optimum is root invariant") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = generate_random_tree(8, seed);
    auto t0 = build_rooted_tree(inst);
    auto d = all_pairs_distances(t0);
    double base = max_success_probability(t0, d, inst.probs, 2, 1.5).first;
    for (VertexId root = 1; root < inst.n; ++root) {
      auto t = build_rooted_tree(inst, root);
      auto dr = all_pairs_distances(t);
      double p = max_success_probability(t, dr, inst.probs, 2, 1.5).first;
      REQUIRE(p == Catch::Approx(base).margin(1e-12));
    }
  }
}

TEST_CASE("degenerate probabilities") {
  auto zeros = path3({0, 0, 0});
  auto tz = build_rooted_tree(zeros);
  auto dz = all_pairs_distances(tz);
  REQUIRE(max_success_probability(tz, dz, zeros.probs, 0, 0.0).first == 1.0);

  auto ones = path3({1, 1, 1});
  auto to = build_rooted_tree(ones);
  auto dn = all_pairs_distances(to);
  REQUIRE(max_success_probability(to, dn, ones.probs, 1, 0.5).first == 0.0);
  REQUIRE(max_success_probability(to, dn, ones.probs, 3, 0.0).first == 1.0);
}

TEST_CASE("radius search") {
  auto inst = path3();
  auto sol = solve_nonadaptive(inst, 1, 0.5);
  REQUIRE(sol.radius == 1.0);
  REQUIRE(sol.centers == std::vector<VertexId>{1});
  REQUIRE(sol.success_probability == 1.0);

  // rho = 1 accepts anything, so the smallest candidate radius wins
  auto lax = solve_nonadaptive(inst, 1, 1.0);
  REQUIRE(lax.radius == 0.0);

  // k >= n short circuit
  auto all = solve_nonadaptive(inst, 5, 0.1);
  REQUIRE(all.radius == 0.0);
  REQUIRE(all.centers == std::vector<VertexId>{0, 1, 2});

  REQUIRE_THROWS_AS(solve_nonadaptive(inst, 1, 0.0), ValidationError);
  REQUIRE_THROWS_AS(solve_nonadaptive(inst, -1, 0.5), ValidationError);
}

TEST_CASE("radius search agrees with exhaustive scan") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = generate_random_tree(8, seed);
    auto tree = build_rooted_tree(inst);
    auto d = all_pairs_distances(tree);
    const double rho = 0.3;
    const double threshold = (1.0 - rho) - 1e-9;
    double expect = -1.0;
    for (double r : candidate_radii(d)) {
      if (max_success_probability(tree, d, inst.probs, 2, r).first >= threshold) {
        expect = r;
        break;
      }
    }
    if (expect < 0) {
      REQUIRE_THROWS_AS(solve_nonadaptive(inst, 2, rho), InfeasibleError);
    } else {
      auto sol = solve_nonadaptive(inst, 2, rho);
      REQUIRE(sol.radius == expect);
      REQUIRE(sol.success_probability >= threshold);
    }
  }
}
