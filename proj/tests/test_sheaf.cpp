#include <catch2/catch_amalgamated.hpp>

#include "relsheaf/sheaf.hpp"
#include "spaces_for_tests.hpp"

using namespace relsheaf;

namespace {

// 0 -> j_!Q_{X\{c}} -> Q_X -> skyscraper at c -> 0 on the pseudocircle.
struct SkyscraperSES {
  Sheaf sub, mid, quot;
  SheafMorphism incl, proj;
};

SkyscraperSES skyscraper_ses() {
  FinSpace psc = fixtures::pseudocircle();
  SkyscraperSES out;
  out.mid = Sheaf::constant(psc, 1);
  out.quot = Sheaf::skyscraper(psc, 2, 1);  // closed point c
  std::vector<Matrix> proj;
  for (int x = 0; x < 4; ++x)
    proj.push_back(x == 2 ? Matrix::identity(1) : Matrix::zero(0, 1));
  out.proj = SheafMorphism(out.mid, out.quot, std::move(proj));
  auto ker = kernel_sheaf(out.proj);
  out.sub = ker.sheaf;
  out.incl = ker.inclusion;
  return out;
}

}  // namespace

TEST_CASE("sections of the constant sheaf", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  Sheaf q = Sheaf::constant(psc, 1);
  CHECK(q.sections(psc.full_mask()).dim == 1);   // connected
  CHECK(q.sections(uint64_t(0)).dim == 0);       // empty open
  CHECK(q.sections(fixtures::arc_mask()).dim == 1);
  CHECK(q.sections(uint64_t(0b0011)).dim == 2);  // {a,b} is discrete
}

TEST_CASE("sections over a minimal open recover the stalk", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  auto ses = skyscraper_ses();
  for (const Sheaf& f : {ses.sub, ses.mid, ses.quot})
    for (int x = 0; x < psc.size(); ++x)
      CHECK(f.sections(psc.up_mask(x)).dim == f.stalk_dim(x));
}

TEST_CASE("restriction maps compose", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  Sheaf q = Sheaf::constant(psc, 2);
  uint64_t full = psc.full_mask(), arc = fixtures::arc_mask(), ab = 0b0011;
  Matrix r1 = q.restriction_map(full, arc);
  Matrix r2 = q.restriction_map(arc, ab);
  CHECK(r2 * r1 == q.restriction_map(full, ab));
}

TEST_CASE("relative sections", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  Sheaf q = Sheaf::constant(psc, 1);
  OpenSet whole = OpenSet::whole(psc);
  OpenSet arc(psc, fixtures::arc_mask());
  OpenSet none = OpenSet::empty(psc);
  CHECK(relative_sections(q, whole, none).dim() == 1);
  CHECK(relative_sections(q, whole, whole).dim() == 0);
  // A global constant vanishing on the arc is zero.
  CHECK(relative_sections(q, whole, arc).dim() == 0);
}

TEST_CASE("kernel and cokernel sheaves", "[sheaf]") {
  auto ses = skyscraper_ses();
  SECTION("identity has zero kernel and cokernel") {
    auto id = SheafMorphism::identity(ses.mid);
    CHECK(kernel_sheaf(id).sheaf.stalk_dims() == std::vector<int>{0, 0, 0, 0});
    CHECK(cokernel_sheaf(id).sheaf.stalk_dims() == std::vector<int>{0, 0, 0, 0});
  }
  SECTION("zero map gives back source and target") {
    auto z = SheafMorphism::zero(ses.mid, ses.quot);
    CHECK(kernel_sheaf(z).sheaf.stalk_dims() == ses.mid.stalk_dims());
    CHECK(cokernel_sheaf(z).sheaf.stalk_dims() == ses.quot.stalk_dims());
  }
  SECTION("skyscraper quotient is exact stalkwise") {
    for (int x = 0; x < 4; ++x) {
      int r = rank(ses.proj.comp(x));
      CHECK(ses.sub.stalk_dim(x) + r == ses.mid.stalk_dim(x));
      CHECK(cokernel_sheaf(ses.incl).sheaf.stalk_dim(x) == ses.quot.stalk_dim(x));
    }
    // j_!Q on the open complement {a,b,d}: stalks (1,1,0,1).
    CHECK(ses.sub.stalk_dims() == std::vector<int>{1, 1, 0, 1});
  }
}

TEST_CASE("pushforward", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  FinSpace pt = FinSpace::point();
  Sheaf q = Sheaf::constant(psc, 1);
  SECTION("identity map is the identity functor") {
    auto f = ContinuousMap::identity(psc);
    Sheaf p = pushforward(f, q);
    CHECK(p == q);
  }
  SECTION("empty source pushes to the zero sheaf") {
    FinSpace empty = FinSpace::from_hasse({}, {});
    ContinuousMap f(empty, pt, {});
    Sheaf p = pushforward(f, Sheaf::constant(empty, 3));
    CHECK(p.stalk_dims() == std::vector<int>{0});
  }
  SECTION("pseudocircle to point: stalk is the global sections") {
    ContinuousMap f(psc, pt, {0, 0, 0, 0});
    Sheaf p = pushforward(f, q);
    CHECK(p.stalk_dims() == std::vector<int>{1});
  }
  SECTION("product structure survives when fiber order is compatible") {
    ContinuousMap f(psc, pt, {0, 0, 0, 0});
    Sheaf g = pushforward(f, Sheaf::product(psc, {1, 2, 0, 1}));
    CHECK(g.is_product());
    CHECK(g.stalk_dim(0) == 4);
  }
}

TEST_CASE("inverse image", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  Sheaf q = Sheaf::constant(psc, 2);
  SECTION("identity") {
    CHECK(inverse_image(ContinuousMap::identity(psc), q) == q);
  }
  SECTION("constant pulls back to constant along any map") {
    FinSpace pt = FinSpace::point();
    ContinuousMap f(psc, pt, {0, 0, 0, 0});
    Sheaf s = inverse_image(f, Sheaf::constant(pt, 2));
    CHECK(s == q);
  }
  SECTION("open embedding restricts: sections agree") {
    SubspaceData arc = open_subspace(psc, fixtures::arc_mask());
    Sheaf r = inverse_image(arc.inclusion, q);
    CHECK(r.sections(arc.space.full_mask()).dim ==
          q.sections(fixtures::arc_mask()).dim);
    Sheaf g = Sheaf::product(psc, {1, 1, 2, 1});
    Sheaf rg = inverse_image(arc.inclusion, g);
    CHECK(rg.is_product());
  }
}

TEST_CASE("adjunction units", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  SECTION("identity map gives identity unit and counit") {
    Sheaf q = Sheaf::constant(psc, 1);
    auto f = ContinuousMap::identity(psc);
    SheafMorphism unit = adjunction_unit(f, q);
    SheafMorphism counit = adjunction_counit(f, q);
    for (int x = 0; x < psc.size(); ++x) {
      CHECK(unit.comp(x) == Matrix::identity(1));
      CHECK(counit.comp(x) == Matrix::identity(1));
    }
  }
  SECTION("open embedding: unit restricts constants") {
    SubspaceData arc = open_subspace(psc, fixtures::arc_mask());
    Sheaf q = Sheaf::constant(psc, 1);
    SheafMorphism unit = adjunction_unit(arc.inclusion, q);
    // Stalks of i_*i^{-1}Q: dim of sections over U_x ∩ arc: (1,1,1,1) here,
    // except U_d ∩ arc = {a,b} is disconnected: dim 2 at d.
    CHECK(unit.target().stalk_dims() == std::vector<int>{1, 1, 1, 2});
    unit.validate();
  }
  SECTION("empty source: unit lands in the zero sheaf") {
    FinSpace empty = FinSpace::from_hasse({}, {});
    FinSpace pt = FinSpace::point();
    ContinuousMap f(empty, pt, {});
    SheafMorphism unit = adjunction_unit(f, Sheaf::constant(pt, 2));
    CHECK(unit.target().stalk_dims() == std::vector<int>{0});
  }
}

TEST_CASE("direct sums keep section dimensions", "[sheaf]") {
  FinSpace psc = fixtures::pseudocircle();
  Sheaf a = Sheaf::product(psc, {1, 0, 2, 0});
  Sheaf b = Sheaf::product(psc, {0, 1, 1, 1});
  auto sum = direct_sum({a, b});
  CHECK(sum.sum.is_product());
  for (uint64_t mask : {psc.full_mask(), fixtures::arc_mask(), uint64_t(0b0011)})
    CHECK(sum.sum.sections(mask).dim ==
          a.sections(mask).dim + b.sections(mask).dim);
  for (auto& m : sum.incl) m.validate();
  // Mixed, non-product sum.
  auto mixed = direct_sum({Sheaf::constant(psc, 1), b});
  CHECK_FALSE(mixed.sum.is_product());
  CHECK(mixed.sum.sections(psc.full_mask()).dim ==
        1 + b.sections(psc.full_mask()).dim);
  for (auto& m : mixed.incl) m.validate();
}

TEST_CASE("sheaf complexes and relative section complexes", "[sheaf]") {
  auto ses = skyscraper_ses();
  FinSpace psc = fixtures::pseudocircle();
  SheafComplex k({ses.mid, ses.quot}, {ses.proj});
  Complex global = k.section_complex(psc.full_mask());
  CHECK(global.dim(0) == 1);
  CHECK(global.dim(1) == 1);
  auto rel = relative_section_complex(k, psc.full_mask(), fixtures::arc_mask());
  // Global sections vanishing on the arc: constants die, skyscraper at c too.
  CHECK(rel.complex.dim(0) == 0);
  CHECK(rel.complex.dim(1) == 0);
  auto rel2 = relative_section_complex(k, psc.full_mask(), 0b0011);
  CHECK(rel2.complex.dim(0) == 0);
  CHECK(rel2.complex.dim(1) == 1);
}
