#include <catch2/catch_amalgamated.hpp>

#include "relsheaf/finspace.hpp"
#include "relsheaf/order_complex.hpp"
#include "spaces_for_tests.hpp"

using namespace relsheaf;

TEST_CASE("pseudocircle order and opens", "[finspace]") {
  FinSpace x = fixtures::pseudocircle();
  int a = 0, b = 1, c = 2, d = 3;
  CHECK(x.leq(c, a));
  CHECK(x.leq(d, b));
  CHECK_FALSE(x.leq(a, c));
  CHECK_FALSE(x.leq(c, d));
  CHECK(x.up_mask(c) == 0b0111);  // U_c = {a,b,c}
  CHECK(x.up_mask(a) == 0b0001);
  // Seven opens: {}, {a}, {b}, {ab}, {abc}, {abd}, X.
  CHECK(x.all_upsets().size() == 7);
  CHECK(x.is_upset(fixtures::arc_mask()));
  CHECK_FALSE(x.is_upset(0b0100));
  CHECK(x.height() == 1);
}

TEST_CASE("antisymmetry enforced", "[finspace]") {
  CHECK_THROWS_AS(FinSpace::from_hasse({"x", "y"}, {{0, 1}, {1, 0}}), Error);
}

TEST_CASE("continuous maps are exactly the monotone ones", "[finspace]") {
  FinSpace psc = fixtures::pseudocircle();
  FinSpace pt = FinSpace::point();
  std::vector<int> to_pt(4, 0);
  ContinuousMap f(psc, pt, to_pt);
  CHECK(f.preimage(OpenSet::whole(pt)).mask == psc.full_mask());
  // Swapping one closed point under an order-reversing assignment fails.
  FinSpace sier = fixtures::sierpinski();
  CHECK_THROWS_AS(ContinuousMap(sier, sier, std::vector<int>{1, 0}), Error);
}

TEST_CASE("open subspace preserves relative order", "[finspace]") {
  FinSpace psc = fixtures::pseudocircle();
  SubspaceData arc = open_subspace(psc, fixtures::arc_mask());
  REQUIRE(arc.space.size() == 3);
  CHECK(arc.space.name(0) == "a");
  CHECK(arc.space.name(2) == "c");
  CHECK(arc.space.leq(2, 0));
  CHECK_FALSE(arc.space.leq(0, 2));
  CHECK(arc.inclusion.preimage(psc.up_mask(3)) == 0b011);  // U_d ∩ arc = {a,b}
}

TEST_CASE("order complex oracle on known spaces", "[finspace][oracle]") {
  // Point: H = (1, 0, 0).
  auto pt = order_complex::cohomology_dims(FinSpace::point(), 2);
  CHECK(pt == std::vector<int>{1, 0, 0});
  // Sierpinski: contractible.
  auto s = order_complex::cohomology_dims(fixtures::sierpinski(), 2);
  CHECK(s == std::vector<int>{1, 0, 0});
  // Pseudocircle: the order complex is a 4-cycle, a circle.
  auto c = order_complex::cohomology_dims(fixtures::pseudocircle(), 2);
  CHECK(c == std::vector<int>{1, 1, 0});
}
